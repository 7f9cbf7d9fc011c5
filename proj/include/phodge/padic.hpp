#pragma once

#include <optional>
#include <ostream>
#include <vector>

#include "phodge/arith.hpp"

namespace phodge {

/// An element of Q_p known modulo p^abs_precision.
///
/// Nonzero values are stored as p^valuation * unit with 0 < unit < p^rel,
/// rel = abs_precision - valuation and p not dividing unit. A value whose
/// known digits are all zero is the tracked zero "0 mod p^abs_precision".
/// Arithmetic never reports more digits than the inputs justify.
class PadicNumber {
 public:
  PadicNumber() = default;

  static PadicNumber zero(long p, long abs_prec);
  static PadicNumber from_integer(long p, const Integer& x, long abs_prec);
  static PadicNumber from_rational(long p, const Rational& x, long abs_prec);
  /// An exact constant carried at rel_prec significant digits.
  static PadicNumber exact(long p, const Rational& x, long rel_prec);
  static PadicNumber from_digits(long p, long valuation, const std::vector<long>& digits,
                                 long abs_prec);

  long prime() const { return p_; }
  bool is_zero() const { return unit_ == 0; }
  std::optional<long> valuation() const;
  /// Valuation, or the absolute precision for a tracked zero (a lower bound).
  long valuation_bound() const { return is_zero() ? abs_prec_ : val_; }
  long abs_precision() const { return abs_prec_; }
  long rel_precision() const { return is_zero() ? 0 : abs_prec_ - val_; }
  const Integer& unit() const { return unit_; }
  /// Base-p digits of the unit part, least significant first.
  std::vector<long> digits() const;
  /// The rational representative p^valuation * unit.
  Rational lift() const;

  /// Same value at a lower absolute precision.
  PadicNumber reduce(long abs_prec) const;
  /// Same value at absolute precision min(current, abs_prec).
  PadicNumber cap(long abs_prec) const { return abs_prec < abs_prec_ ? reduce(abs_prec) : *this; }

  PadicNumber operator-() const;
  PadicNumber inverse() const;
  PadicNumber pow(long n) const;

  friend PadicNumber operator+(const PadicNumber& a, const PadicNumber& b);
  friend PadicNumber operator-(const PadicNumber& a, const PadicNumber& b);
  friend PadicNumber operator*(const PadicNumber& a, const PadicNumber& b);
  friend PadicNumber operator/(const PadicNumber& a, const PadicNumber& b);
  PadicNumber& operator+=(const PadicNumber& b) { return *this = *this + b; }
  PadicNumber& operator-=(const PadicNumber& b) { return *this = *this - b; }
  PadicNumber& operator*=(const PadicNumber& b) { return *this = *this * b; }

  /// Identical representation (value and precision).
  friend bool operator==(const PadicNumber& a, const PadicNumber& b) {
    return a.p_ == b.p_ && a.abs_prec_ == b.abs_prec_ && a.val_ == b.val_ && a.unit_ == b.unit_;
  }
  /// Equal at the common precision: a - b is a tracked zero.
  friend bool congruent(const PadicNumber& a, const PadicNumber& b) { return (a - b).is_zero(); }

  friend std::ostream& operator<<(std::ostream& os, const PadicNumber& x);

 private:
  PadicNumber(long p, long val, Integer unit, long abs_prec)
      : p_(p), val_(val), unit_(std::move(unit)), abs_prec_(abs_prec) {}
  static PadicNumber normalized(long p, long base_val, const Integer& scaled, long abs_prec);

  long p_ = 0;
  long val_ = 0;
  Integer unit_ = 0;
  long abs_prec_ = 0;
};

enum class ArithOp { Add, Sub, Mul, Div };

/// Checked binary arithmetic over Q_p.
PadicNumber qp_arith(const PadicNumber& a, const PadicNumber& b, ArithOp op);

}  // namespace phodge
