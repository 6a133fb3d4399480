#include "pharec/error.hpp"

namespace pharec {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::InvalidStep: return "InvalidStep";
    case ErrorCode::UnknownKind: return "UnknownKind";
    case ErrorCode::NonPositiveRadius: return "NonPositiveRadius";
    case ErrorCode::NoAnalyticForm: return "NoAnalyticForm";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DegenerateDesign: return "DegenerateDesign";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::ZeroDof: return "ZeroDof";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::ComplexMultiplier: return "ComplexMultiplier";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::BasinEscape: return "BasinEscape";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::NonUniformSampling: return "NonUniformSampling";
    case ErrorCode::InsufficientCoverage: return "InsufficientCoverage";
    case ErrorCode::EmptyRadiusData: return "EmptyRadiusData";
    case ErrorCode::UnknownPair: return "UnknownPair";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

bool is_usage_error(ErrorCode code) {
  return code == ErrorCode::InvalidConfig || code == ErrorCode::IoError ||
         code == ErrorCode::UnknownKind || code == ErrorCode::UnknownPair;
}

}  // namespace pharec
