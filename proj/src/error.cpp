#include "hvrfif/error.hpp"

#include <utility>

namespace hvrfif {

std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonIncreasingAbscissas: return "NonIncreasingAbscissas";
    case ErrorCode::TooFewNodes: return "TooFewNodes";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::DomainTooSmall: return "DomainTooSmall";
    case ErrorCode::DomainCountOutOfRange: return "DomainCountOutOfRange";
    case ErrorCode::RegionNotSmallerThanDomain: return "RegionNotSmallerThanDomain";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::FactorNotContractive: return "FactorNotContractive";
    case ErrorCode::InvalidFactor: return "InvalidFactor";
    case ErrorCode::NotContractive: return "NotContractive";
    case ErrorCode::ContractionHypothesisViolated: return "ContractionHypothesisViolated";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::UnreachableRegion: return "UnreachableRegion";
    case ErrorCode::EndpointConditionViolated: return "EndpointConditionViolated";
    case ErrorCode::InvalidResolution: return "InvalidResolution";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::HypothesisViolated: return "HypothesisViolated";
    case ErrorCode::NonPositiveExponent: return "NonPositiveExponent";
    case ErrorCode::InsufficientScales: return "InsufficientScales";
    case ErrorCode::EndpointMoved: return "EndpointMoved";
    case ErrorCode::OrderViolated: return "OrderViolated";
    case ErrorCode::PerturbationMismatch: return "PerturbationMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_name(code)) + ": " + message), code_(code) {}

NoConvergenceError::NoConvergenceError(const std::string& message, std::vector<double> residuals)
    : Error(ErrorCode::NoConvergence, message), residuals_(std::move(residuals)) {}

}  // namespace hvrfif
