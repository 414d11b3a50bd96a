#ifndef RRT_CLI_OUTPUT_H_
#define RRT_CLI_OUTPUT_H_

// Tabular output shared by every subcommand. A command produces one or more
// sections; each section is a list of records with identical keys.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace rrt::cli {

struct Fixed {
  double value = 0.0;
  int decimals = 10;
};

// std::monostate renders as "none" (text) or null (records).
using Value = std::variant<std::monostate, std::string, std::int64_t, bool, Fixed>;

struct Record {
  std::vector<std::pair<std::string, Value>> fields;

  Record& Add(std::string key, Value value) {
    fields.emplace_back(std::move(key), std::move(value));
    return *this;
  }
  Record& Add(std::string key, double value, int decimals = 10) {
    return Add(std::move(key), Fixed{value, decimals});
  }
  Record& Add(std::string key, std::int64_t value) {
    return Add(std::move(key), Value{value});
  }
  Record& Add(std::string key, int value) {
    return Add(std::move(key), static_cast<std::int64_t>(value));
  }
  Record& Add(std::string key, bool value) { return Add(std::move(key), Value{value}); }
  Record& Add(std::string key, const char* value) {
    return Add(std::move(key), std::string(value));
  }
};

struct Section {
  std::string name;
  std::vector<Record> records;
};

enum class Format { kTable, kCsv, kRecords };

std::optional<Format> ParseFormat(std::string_view name);

// Locale-independent fixed-point rendering; "-0.00" is printed as "0.00".
std::string FormatFixed(double value, int decimals);

std::string RenderValue(const Value& value);

// kCsv: header plus rows per section, sections separated by a blank line.
// kTable: the same, with space-aligned columns.
// kRecords: one JSON object per line, led by "record": <section name>.
void Render(const std::vector<Section>& sections, Format format, std::ostream& os);

}  // namespace rrt::cli

#endif  // RRT_CLI_OUTPUT_H_
