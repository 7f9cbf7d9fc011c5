#include "phodge/errors.hpp"

namespace phodge {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::PrimeMismatch: return "PrimeMismatch";
    case Errc::DivisionByZero: return "DivisionByZero";
    case Errc::PrecisionExhausted: return "PrecisionExhausted";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::LengthExceeded: return "LengthExceeded";
    case Errc::DepthExceeded: return "DepthExceeded";
    case Errc::DegreeExceeded: return "DegreeExceeded";
    case Errc::NonDivisible: return "NonDivisible";
    case Errc::NotAUnit: return "NotAUnit";
    case Errc::NonConvergent: return "NonConvergent";
    case Errc::PhiUnavailable: return "PhiUnavailable";
    case Errc::ModelUnsupported: return "ModelUnsupported";
    case Errc::GaloisUnsupported: return "GaloisUnsupported";
    case Errc::NotNormalized: return "NotNormalized";
    case Errc::CoefficientMismatch: return "CoefficientMismatch";
    case Errc::InvalidModule: return "InvalidModule";
    case Errc::WindowExhausted: return "WindowExhausted";
    case Errc::NotRegular: return "NotRegular";
    case Errc::ResonanceObstruction: return "ResonanceObstruction";
    case Errc::NotUnipotentFormally: return "NotUnipotentFormally";
    case Errc::FrobeniusMissing: return "FrobeniusMissing";
    case Errc::LogDivergent: return "LogDivergent";
    case Errc::ChiTrivial: return "ChiTrivial";
    case Errc::BasisSingular: return "BasisSingular";
    case Errc::IoError: return "IoError";
    case Errc::SchemaError: return "SchemaError";
    case Errc::UnknownCommand: return "UnknownCommand";
    case Errc::KindMismatch: return "KindMismatch";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace phodge
