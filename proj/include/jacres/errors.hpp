#pragma once

#include <stdexcept>
#include <string>

namespace jacres {

// Failure vocabulary shared by the whole library. Input-side codes describe
// mathematically invalid data (CLI exit 2), numeric-side codes describe a
// computation that could not be completed reliably (CLI exit 1).
enum class ErrorCode {
  ClosedGap,
  NonReal,
  BranchAmbiguity,
  PoleHit,
  DegreeMismatch,
  ClassificationAmbiguous,
  InvalidConfiguration,
  OnSpectrum,
  NoSuchMass,
  InterlacingViolation,
  GuardViolated,
  LostPrecision,
  QuadratureUnderresolved,
  NoTailFound,
  NotFreeTail,
  BadInput,
};

inline const char* error_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::ClosedGap: return "ClosedGap";
    case ErrorCode::NonReal: return "NonReal";
    case ErrorCode::BranchAmbiguity: return "BranchAmbiguity";
    case ErrorCode::PoleHit: return "PoleHit";
    case ErrorCode::DegreeMismatch: return "DegreeMismatch";
    case ErrorCode::ClassificationAmbiguous: return "ClassificationAmbiguous";
    case ErrorCode::InvalidConfiguration: return "InvalidConfiguration";
    case ErrorCode::OnSpectrum: return "OnSpectrum";
    case ErrorCode::NoSuchMass: return "NoSuchMass";
    case ErrorCode::InterlacingViolation: return "InterlacingViolation";
    case ErrorCode::GuardViolated: return "GuardViolated";
    case ErrorCode::LostPrecision: return "LostPrecision";
    case ErrorCode::QuadratureUnderresolved: return "QuadratureUnderresolved";
    case ErrorCode::NoTailFound: return "NoTailFound";
    case ErrorCode::NotFreeTail: return "NotFreeTail";
    case ErrorCode::BadInput: return "BadInput";
  }
  return "UnknownError";
}

// True for codes that mean "the input itself is mathematically invalid".
inline bool input_side(ErrorCode c) {
  switch (c) {
    case ErrorCode::ClosedGap:
    case ErrorCode::NonReal:
    case ErrorCode::InvalidConfiguration:
    case ErrorCode::OnSpectrum:
    case ErrorCode::NoSuchMass:
    case ErrorCode::InterlacingViolation:
    case ErrorCode::GuardViolated:
    case ErrorCode::BadInput:
      return true;
    default:
      return false;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(std::string(error_name(code)) + ": " + msg), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace jacres
