#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hvrfif {

enum class ErrorCode {
  // model
  NonIncreasingAbscissas,
  TooFewNodes,
  NonFiniteValue,
  DomainTooSmall,
  DomainCountOutOfRange,
  RegionNotSmallerThanDomain,
  IndexOutOfRange,
  FactorNotContractive,
  InvalidFactor,
  // construction
  NotContractive,
  ContractionHypothesisViolated,
  OutOfDomain,
  UnreachableRegion,
  EndpointConditionViolated,
  // evaluator
  InvalidResolution,
  NoConvergence,
  // smoothness
  DomainError,
  HypothesisViolated,
  NonPositiveExponent,
  InsufficientScales,
  // stability
  EndpointMoved,
  OrderViolated,
  PerturbationMismatch,
  // io
  ParseError,
  IoError,
};

std::string_view error_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by the fixed-point solver; carries the residual of every sweep.
class NoConvergenceError : public Error {
 public:
  NoConvergenceError(const std::string& message, std::vector<double> residuals);

  const std::vector<double>& residuals() const noexcept { return residuals_; }

 private:
  std::vector<double> residuals_;
};

}  // namespace hvrfif
