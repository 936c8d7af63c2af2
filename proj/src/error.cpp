#include "ssf/error.hpp"

namespace ssf {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotUnitary: return "NotUnitary";
    case ErrorKind::KernelAtZero: return "KernelAtZero";
    case ErrorKind::IndexMismatch: return "IndexMismatch";
    case ErrorKind::DomainViolation: return "DomainViolation";
    case ErrorKind::SingularM: return "SingularM";
    case ErrorKind::RefinementLimitExceeded: return "RefinementLimitExceeded";
    case ErrorKind::EndpointDivergence: return "EndpointDivergence";
    case ErrorKind::BranchAtThreshold: return "BranchAtThreshold";
    case ErrorKind::BoundaryUndefined: return "BoundaryUndefined";
    case ErrorKind::ResolventIdentityViolation: return "ResolventIdentityViolation";
    case ErrorKind::PoleHit: return "PoleHit";
    case ErrorKind::NonInvertibleSymbol: return "NonInvertibleSymbol";
    case ErrorKind::AdmissibilityViolation: return "AdmissibilityViolation";
    case ErrorKind::MethodDisagreement: return "MethodDisagreement";
    case ErrorKind::UnwindFailure: return "UnwindFailure";
    case ErrorKind::AnchorNotReached: return "AnchorNotReached";
    case ErrorKind::EigenvalueAtLambda: return "EigenvalueAtLambda";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace ssf
