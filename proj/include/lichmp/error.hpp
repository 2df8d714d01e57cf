#pragma once

#include <stdexcept>
#include <string>

namespace lichmp {

enum class ErrorKind {
  Dimension,
  Spec,
  DomainMismatch,
  Coercivity,
  Parameter,
  ConditionB,
  Normalization,
  Support,
  Geometry,
  SaddleLost,
  Precondition,
  Hypothesis,
  Parse,
  Validation,
  Io,
};

const char* to_string(ErrorKind kind);

/// Exception carrying a machine-readable error category.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace lichmp
