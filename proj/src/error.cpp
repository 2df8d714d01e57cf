#include <lichmp/error.hpp>

namespace lichmp {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Dimension: return "dimension-error";
    case ErrorKind::Spec: return "spec-error";
    case ErrorKind::DomainMismatch: return "domain-error";
    case ErrorKind::Coercivity: return "coercivity-error";
    case ErrorKind::Parameter: return "parameter-error";
    case ErrorKind::ConditionB: return "condition-B-error";
    case ErrorKind::Normalization: return "normalization-error";
    case ErrorKind::Support: return "support-error";
    case ErrorKind::Geometry: return "geometry-error";
    case ErrorKind::SaddleLost: return "saddle-lost-error";
    case ErrorKind::Precondition: return "precondition-error";
    case ErrorKind::Hypothesis: return "hypothesis-error";
    case ErrorKind::Parse: return "parse-error";
    case ErrorKind::Validation: return "validation-error";
    case ErrorKind::Io: return "io-error";
  }
  return "error";
}

}  // namespace lichmp
