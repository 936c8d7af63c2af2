#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ssf {

/// Failure classes raised by the numerical kernels.  The names double as the
/// flag strings written into sweep records.
enum class ErrorKind {
  NotHermitian,
  NotUnitary,
  KernelAtZero,
  IndexMismatch,
  DomainViolation,
  SingularM,
  RefinementLimitExceeded,
  EndpointDivergence,
  BranchAtThreshold,
  BoundaryUndefined,
  ResolventIdentityViolation,
  PoleHit,
  NonInvertibleSymbol,
  AdmissibilityViolation,
  MethodDisagreement,
  UnwindFailure,
  AnchorNotReached,
  EigenvalueAtLambda,
  InvalidArgument,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ssf
