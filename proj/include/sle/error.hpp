#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sle {

enum class ErrorCode {
  kAsymmetricInput,
  kOnAsymptote,
  kNotOnSurface,
  kBadC,
  kCharacteristic,
  kDegreeTooLow,
  kNoConvergence,
  kOutOfDomain,
  kNearSingularImage,
  kSphereTooBig,
  kNotMonotone,
  kDegenerateProfile,
  kParse,
  kMissingArtifacts,
  kBadConfig,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kAsymmetricInput: return "ASYMMETRIC_INPUT";
    case ErrorCode::kOnAsymptote: return "ON_ASYMPTOTE";
    case ErrorCode::kNotOnSurface: return "NOT_ON_SURFACE";
    case ErrorCode::kBadC: return "BAD_C";
    case ErrorCode::kCharacteristic: return "CHARACTERISTIC";
    case ErrorCode::kDegreeTooLow: return "DEGREE_TOO_LOW";
    case ErrorCode::kNoConvergence: return "NO_CONVERGENCE";
    case ErrorCode::kOutOfDomain: return "OUT_OF_DOMAIN";
    case ErrorCode::kNearSingularImage: return "NEAR_SINGULAR_IMAGE";
    case ErrorCode::kSphereTooBig: return "SPHERE_TOO_BIG";
    case ErrorCode::kNotMonotone: return "NOT_MONOTONE";
    case ErrorCode::kDegenerateProfile: return "DEGENERATE_PROFILE";
    case ErrorCode::kParse: return "PARSE";
    case ErrorCode::kMissingArtifacts: return "MISSING_ARTIFACTS";
    case ErrorCode::kBadConfig: return "BAD_CONFIG";
  }
  return "UNKNOWN";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sle
