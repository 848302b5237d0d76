#pragma once

#include <stdexcept>
#include <string>

namespace gpwpc {

enum class ErrorKind {
  InvalidParameter,
  SingularPoint,
  DivergentIntegral,
  Capacity,
  NumericalFailure,
  BudgetExceeded,
  InvalidWeight,
  IncompleteData,
  FieldOverflow,
  SamplerFailure,
  InsufficientData,
  Io,
  Config,
};

const char* to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries one of the kinds above so that
/// callers (the CLI in particular) can map it onto an exit status.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::SingularPoint: return "singular-point";
    case ErrorKind::DivergentIntegral: return "divergent-integral";
    case ErrorKind::Capacity: return "capacity";
    case ErrorKind::NumericalFailure: return "numerical-failure";
    case ErrorKind::BudgetExceeded: return "budget-exceeded";
    case ErrorKind::InvalidWeight: return "invalid-weight";
    case ErrorKind::IncompleteData: return "incomplete-data";
    case ErrorKind::FieldOverflow: return "field-overflow";
    case ErrorKind::SamplerFailure: return "sampler-failure";
    case ErrorKind::InsufficientData: return "insufficient-data";
    case ErrorKind::Io: return "io";
    case ErrorKind::Config: return "config";
  }
  return "unknown";
}

}  // namespace gpwpc
