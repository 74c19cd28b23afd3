#pragma once

#include <stdexcept>
#include <string>

namespace slcalib {

/** Thrown when an input violates a documented admissibility condition:
 *  out-of-range parameters, initial states that fail their constraint
 *  equations, malformed files, and similar caller errors. */
class invalid_params : public std::invalid_argument {
 public:
  explicit invalid_params(const std::string& what_arg)
      : std::invalid_argument(what_arg) {}
};

/** Thrown when a computation fails numerically: non-finite values, an
 *  exceeded iteration budget, a singular linear solve, or an internal
 *  identity that should hold for admissible inputs but does not. */
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& what_arg)
      : std::runtime_error(what_arg) {}
};

}  // namespace slcalib
