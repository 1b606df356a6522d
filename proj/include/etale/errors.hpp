#pragma once

#include <stdexcept>
#include <string>

namespace etale {

enum class ErrorKind {
  GenericityViolation,
  RangeViolation,
  HypothesisViolation,
  PairNotDefined,
  NotAUnit,
  PrecisionExhausted,
  SingularJacobian,
  ExponentPrecisionTooLow,
  NotInvertible,
  NonConvergence,
  InadmissibleS,
  ConfigInvalid,
};

inline const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::GenericityViolation: return "GenericityViolation";
    case ErrorKind::RangeViolation: return "RangeViolation";
    case ErrorKind::HypothesisViolation: return "HypothesisViolation";
    case ErrorKind::PairNotDefined: return "PairNotDefined";
    case ErrorKind::NotAUnit: return "NotAUnit";
    case ErrorKind::PrecisionExhausted: return "PrecisionExhausted";
    case ErrorKind::SingularJacobian: return "SingularJacobian";
    case ErrorKind::ExponentPrecisionTooLow: return "ExponentPrecisionTooLow";
    case ErrorKind::NotInvertible: return "NotInvertible";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::InadmissibleS: return "InadmissibleS";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
  }
  return "Unknown";
}

/// Every library failure carries a kind; `what()` is "<Kind>: <detail>".
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + detail), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& detail) { throw Error(kind, detail); }

inline void require(bool cond, ErrorKind kind, const std::string& detail) {
  if (!cond) fail(kind, detail);
}

}  // namespace etale
