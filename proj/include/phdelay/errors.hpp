#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace phdelay {

/// Operand shapes do not fit together.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An operation was called on data that violates its stated precondition
/// (non-finite entries, a matrix that should be definite but is not, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed system, matrix or history document.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parsed system breaks one or more type invariants. All violations are
/// collected, not just the first.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> violations)
      : std::runtime_error(join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out = "invalid system:";
    for (const auto& s : v) {
      out += " ";
      out += s;
      out += ";";
    }
    return out;
  }

  std::vector<std::string> violations_;
};

}  // namespace phdelay
