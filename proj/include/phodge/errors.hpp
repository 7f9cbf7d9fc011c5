#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace phodge {

enum class Errc {
  PrimeMismatch,
  DivisionByZero,
  PrecisionExhausted,
  LengthMismatch,
  LengthExceeded,
  DepthExceeded,
  DegreeExceeded,
  NonDivisible,
  NotAUnit,
  NonConvergent,
  PhiUnavailable,
  ModelUnsupported,
  GaloisUnsupported,
  NotNormalized,
  CoefficientMismatch,
  InvalidModule,
  WindowExhausted,
  NotRegular,
  ResonanceObstruction,
  NotUnipotentFormally,
  FrobeniusMissing,
  LogDivergent,
  ChiTrivial,
  BasisSingular,
  IoError,
  SchemaError,
  UnknownCommand,
  KindMismatch,
  InvalidArgument,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace phodge
