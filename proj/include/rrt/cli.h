#ifndef RRT_CLI_H_
#define RRT_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace rrt::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidInput = 2;
inline constexpr int kExitDegenerate = 3;
inline constexpr int kExitIo = 4;

// Runs one command line. `args[0]` is the program name. Output that is not
// written to --out goes to `out`; diagnostics go to `err`.
int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rrt::cli

#endif  // RRT_CLI_H_
