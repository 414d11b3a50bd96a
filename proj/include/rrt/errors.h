#ifndef RRT_ERRORS_H_
#define RRT_ERRORS_H_

#include <stdexcept>
#include <string>

namespace rrt {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A population truth violates the joint-distribution constraints.
class AdmissibilityError : public Error {
 public:
  using Error::Error;
};

// A design probability, count, or sample size is outside its domain.
class InvalidParams : public Error {
 public:
  using Error::Error;
};

// The design is valid but a formula's denominator vanishes at these
// probabilities (e.g. P = 0.5 for Warner decks, P + T = 1 for the crossed
// model).
class DegenerateDesign : public Error {
 public:
  using Error::Error;
};

// The requested model has no respondent-level mechanism to simulate.
class UnsimulableModel : public Error {
 public:
  using Error::Error;
};

}  // namespace rrt

#endif  // RRT_ERRORS_H_
