#include "phodge/padic.hpp"

#include <algorithm>

#include "phodge/errors.hpp"

namespace phodge {

namespace {

void check_prime(long p) {
  if (!is_prime(p)) fail(Errc::InvalidArgument, "p = " + std::to_string(p) + " is not prime");
}

void same_prime(const PadicNumber& a, const PadicNumber& b) {
  if (a.prime() != b.prime())
    fail(Errc::PrimeMismatch,
         "p = " + std::to_string(a.prime()) + " vs p = " + std::to_string(b.prime()));
}

}  // namespace

PadicNumber PadicNumber::normalized(long p, long base_val, const Integer& scaled, long abs_prec) {
  if (abs_prec <= base_val) return PadicNumber(p, 0, 0, abs_prec);
  Integer s = mod_floor(scaled, ppow(p, abs_prec - base_val));
  if (s == 0) return PadicNumber(p, 0, 0, abs_prec);
  long v = *vp(s, p);
  mpz_divexact(s.get_mpz_t(), s.get_mpz_t(), ppow(p, v).get_mpz_t());
  return PadicNumber(p, base_val + v, std::move(s), abs_prec);
}

PadicNumber PadicNumber::zero(long p, long abs_prec) {
  check_prime(p);
  return PadicNumber(p, 0, 0, abs_prec);
}

PadicNumber PadicNumber::from_integer(long p, const Integer& x, long abs_prec) {
  check_prime(p);
  return normalized(p, 0, x, abs_prec);
}

PadicNumber PadicNumber::from_rational(long p, const Rational& x, long abs_prec) {
  check_prime(p);
  if (x == 0) return PadicNumber(p, 0, 0, abs_prec);
  long v = *vp(x, p);
  if (abs_prec <= v) return PadicNumber(p, 0, 0, abs_prec);
  Rational u = x;
  if (v > 0) u /= Rational(ppow(p, v));
  if (v < 0) u *= Rational(ppow(p, -v));
  Integer unit = rational_mod(u, p, abs_prec - v);
  return PadicNumber(p, v, std::move(unit), abs_prec);
}

PadicNumber PadicNumber::exact(long p, const Rational& x, long rel_prec) {
  if (x == 0) return zero(p, rel_prec);
  return from_rational(p, x, *vp(x, p) + rel_prec);
}

PadicNumber PadicNumber::from_digits(long p, long valuation, const std::vector<long>& digits,
                                     long abs_prec) {
  check_prime(p);
  Integer u = 0;
  for (std::size_t i = digits.size(); i-- > 0;) {
    if (digits[i] < 0 || digits[i] >= p) fail(Errc::SchemaError, "digit out of range");
    u = u * p + digits[i];
  }
  return normalized(p, valuation, u, abs_prec);
}

std::optional<long> PadicNumber::valuation() const {
  if (is_zero()) return std::nullopt;
  return val_;
}

std::vector<long> PadicNumber::digits() const {
  std::vector<long> out;
  Integer u = unit_;
  for (long i = 0; i < rel_precision(); ++i) {
    Integer d;
    mpz_fdiv_qr_ui(u.get_mpz_t(), d.get_mpz_t(), u.get_mpz_t(), static_cast<unsigned long>(p_));
    out.push_back(d.get_si());
  }
  return out;
}

Rational PadicNumber::lift() const {
  if (is_zero()) return 0;
  Rational r(unit_);
  if (val_ >= 0) return r * Rational(ppow(p_, val_));
  return r / Rational(ppow(p_, -val_));
}

PadicNumber PadicNumber::reduce(long abs_prec) const {
  if (abs_prec > abs_prec_)
    fail(Errc::PrecisionExhausted, "value known only mod p^" + std::to_string(abs_prec_));
  if (is_zero()) return PadicNumber(p_, 0, 0, abs_prec);
  return normalized(p_, val_, unit_, abs_prec);
}

PadicNumber PadicNumber::operator-() const {
  if (is_zero()) return *this;
  return PadicNumber(p_, val_, ppow(p_, abs_prec_ - val_) - unit_, abs_prec_);
}

PadicNumber operator+(const PadicNumber& a, const PadicNumber& b) {
  same_prime(a, b);
  const long p = a.p_;
  const long n = std::min(a.abs_prec_, b.abs_prec_);
  const long m = std::min(a.valuation_bound(), b.valuation_bound());
  if (m >= n) return PadicNumber(p, 0, 0, n);
  Integer s = 0;
  if (!a.is_zero()) s += a.unit_ * ppow(p, a.val_ - m);
  if (!b.is_zero()) s += b.unit_ * ppow(p, b.val_ - m);
  return PadicNumber::normalized(p, m, s, n);
}

PadicNumber operator-(const PadicNumber& a, const PadicNumber& b) { return a + (-b); }

PadicNumber operator*(const PadicNumber& a, const PadicNumber& b) {
  same_prime(a, b);
  const long p = a.p_;
  if (a.is_zero() || b.is_zero()) {
    long n = std::min(a.abs_prec_ + b.valuation_bound(), b.abs_prec_ + a.valuation_bound());
    return PadicNumber(p, 0, 0, n);
  }
  const long v = a.val_ + b.val_;
  const long r = std::min(a.rel_precision(), b.rel_precision());
  Integer u = mod_floor(a.unit_ * b.unit_, ppow(p, r));
  return PadicNumber(p, v, std::move(u), v + r);
}

PadicNumber operator/(const PadicNumber& a, const PadicNumber& b) {
  same_prime(a, b);
  if (b.is_zero()) fail(Errc::DivisionByZero, "divisor is zero mod p^" + std::to_string(b.abs_prec_));
  const long p = a.p_;
  if (a.is_zero()) return PadicNumber(p, 0, 0, a.abs_prec_ - b.val_);
  const long v = a.val_ - b.val_;
  const long r = std::min(a.rel_precision(), b.rel_precision());
  const Integer& m = ppow(p, r);
  Integer u = mod_floor(a.unit_ * mod_inverse(b.unit_, m), m);
  return PadicNumber(p, v, std::move(u), v + r);
}

PadicNumber PadicNumber::inverse() const {
  return PadicNumber(p_, 0, 1, rel_precision()) / *this;
}

PadicNumber PadicNumber::pow(long n) const {
  if (n < 0) return inverse().pow(-n);
  if (n == 0) return PadicNumber(p_, 0, 1, std::max(rel_precision(), 1L));
  PadicNumber base = *this;
  std::optional<PadicNumber> result;
  for (long k = n; k > 0; k >>= 1) {
    if (k & 1) result = result ? *result * base : base;
    if (k > 1) base = base * base;
  }
  return *result;
}

std::ostream& operator<<(std::ostream& os, const PadicNumber& x) {
  if (x.is_zero()) return os << "O(" << x.p_ << "^" << x.abs_prec_ << ")";
  return os << x.lift() << " + O(" << x.p_ << "^" << x.abs_prec_ << ")";
}

PadicNumber qp_arith(const PadicNumber& a, const PadicNumber& b, ArithOp op) {
  switch (op) {
    case ArithOp::Add: return a + b;
    case ArithOp::Sub: return a - b;
    case ArithOp::Mul: return a * b;
    case ArithOp::Div: return a / b;
  }
  fail(Errc::InvalidArgument, "unknown arithmetic op");
}

}  // namespace phodge
