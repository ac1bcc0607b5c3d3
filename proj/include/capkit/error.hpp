#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace capkit {

enum class Errc {
  InvalidDomain,
  InvalidArgument,
  InvalidCount,
  PointOutsideDomain,
  PoleOutsideDomain,
  PoleEvaluation,
  SolveFailed,
  RadiusTooLarge,
  ContourNotFound,
  ResolutionTooLow,
  BasisDegenerate,
  NoClosedForm,
  ChainViolation,
  ParseError,
};

inline std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::InvalidDomain: return "InvalidDomain";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::InvalidCount: return "InvalidCount";
    case Errc::PointOutsideDomain: return "PointOutsideDomain";
    case Errc::PoleOutsideDomain: return "PoleOutsideDomain";
    case Errc::PoleEvaluation: return "PoleEvaluation";
    case Errc::SolveFailed: return "SolveFailed";
    case Errc::RadiusTooLarge: return "RadiusTooLarge";
    case Errc::ContourNotFound: return "ContourNotFound";
    case Errc::ResolutionTooLow: return "ResolutionTooLow";
    case Errc::BasisDegenerate: return "BasisDegenerate";
    case Errc::NoClosedForm: return "NoClosedForm";
    case Errc::ChainViolation: return "ChainViolation";
    case Errc::ParseError: return "ParseError";
  }
  return "Unknown";
}

// All library failures surface as this exception; code() identifies the
// condition so callers (and the CLI exit-code mapping) can branch on it.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace capkit
