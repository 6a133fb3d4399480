#pragma once

#include <stdexcept>
#include <string>

namespace pharec {

enum class ErrorCode {
  NonFiniteState,
  InvalidStep,
  UnknownKind,
  NonPositiveRadius,
  NoAnalyticForm,
  NoConvergence,
  DegenerateDesign,
  ShapeMismatch,
  ZeroDof,
  ArityMismatch,
  ComplexMultiplier,
  TooShort,
  BasinEscape,
  InsufficientSamples,
  NonUniformSampling,
  InsufficientCoverage,
  EmptyRadiusData,
  UnknownPair,
  ZeroVariance,
  IoError,
  InvalidConfig,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// True for errors caused by user input rather than numerics.
bool is_usage_error(ErrorCode code);

}  // namespace pharec
