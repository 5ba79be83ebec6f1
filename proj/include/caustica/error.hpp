#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace caustica {

enum class ErrorCode {
  UnknownFamily,
  MissingParam,
  ExtraParam,
  InvalidWeights,
  ZeroPolynomial,
  BothConstantInVar,
  DidNotConverge,
  CausticTarget,
  DegenerateSystem,
  OnCriticalCurve,
  NonSimpleRoot,
  NonHomogeneousInput,
  NonIsolatedInfinity,
  RootsAtInfinityPresent,
  NonIntegerCount,
  EmptyCriticalSet,
  InvalidArgument,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownFamily: return "UnknownFamily";
    case ErrorCode::MissingParam: return "MissingParam";
    case ErrorCode::ExtraParam: return "ExtraParam";
    case ErrorCode::InvalidWeights: return "InvalidWeights";
    case ErrorCode::ZeroPolynomial: return "ZeroPolynomial";
    case ErrorCode::BothConstantInVar: return "BothConstantInVar";
    case ErrorCode::DidNotConverge: return "DidNotConverge";
    case ErrorCode::CausticTarget: return "CausticTarget";
    case ErrorCode::DegenerateSystem: return "DegenerateSystem";
    case ErrorCode::OnCriticalCurve: return "OnCriticalCurve";
    case ErrorCode::NonSimpleRoot: return "NonSimpleRoot";
    case ErrorCode::NonHomogeneousInput: return "NonHomogeneousInput";
    case ErrorCode::NonIsolatedInfinity: return "NonIsolatedInfinity";
    case ErrorCode::RootsAtInfinityPresent: return "RootsAtInfinityPresent";
    case ErrorCode::NonIntegerCount: return "NonIntegerCount";
    case ErrorCode::EmptyCriticalSet: return "EmptyCriticalSet";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

// Every failure in the library surfaces as this exception; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace caustica
