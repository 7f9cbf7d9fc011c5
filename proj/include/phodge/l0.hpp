#pragma once

// Exact coefficients for filtered modules.
//
// L0 = K0 = W(F_q)[1/p] is approximated by its dense subfield Q(ζ), ζ the
// Teichmüller lift of the first generator of F_q^* (q = p^f). For f = 1 the
// subfield is Q itself. Arithmetic is exact; σ is ζ ↦ ζ^p; valuations are
// computed through the embedding into K0 and are exact because the embedding
// is injective.

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "phodge/qpoly.hpp"
#include "phodge/unramified.hpp"

namespace phodge {

class L0Field;
using L0Ptr = std::shared_ptr<const L0Field>;

class L0Field {
 public:
  static L0Ptr get(long p, long f);

  long prime() const { return p_; }
  long residue_degree() const { return f_; }
  /// ζ has order m = p^f − 1 (m = 1 when f = 1).
  long order() const { return m_; }
  /// Degree of Q(ζ) over Q.
  long degree() const { return static_cast<long>(phi_.size()) - 1; }
  const QPoly& cyclotomic() const { return phi_; }
  /// Residue of ζ in F_q (f > 1 only).
  const FqElement& generator() const { return gen_; }
  FieldPtr unramified() const { return K_; }

 private:
  L0Field(long p, long f);
  long p_, f_, m_;
  QPoly phi_;
  FieldPtr K_;
  FqElement gen_;
};

class L0Number {
 public:
  L0Number() = default;
  L0Number(L0Ptr F, std::vector<Rational> coeffs);

  static L0Number zero(const L0Ptr& F);
  static L0Number rational(const L0Ptr& F, const Rational& x);
  static L0Number zeta_power(const L0Ptr& F, long k);

  const L0Ptr& field() const { return F_; }
  /// Coordinates on 1, ζ, ..., ζ^(d−1).
  const std::vector<Rational>& coeffs() const { return c_; }
  bool is_zero() const;
  bool is_rational() const;
  /// The value, which must lie in Q.
  Rational to_rational() const;
  std::optional<long> valuation() const;

  L0Number operator-() const;
  L0Number inverse() const;
  L0Number sigma(long k = 1) const;
  L0Number pow(long n) const;

  friend L0Number operator+(const L0Number& a, const L0Number& b);
  friend L0Number operator-(const L0Number& a, const L0Number& b);
  friend L0Number operator*(const L0Number& a, const L0Number& b);
  friend L0Number operator/(const L0Number& a, const L0Number& b) { return a * b.inverse(); }
  L0Number& operator+=(const L0Number& b) { return *this = *this + b; }
  L0Number& operator-=(const L0Number& b) { return *this = *this - b; }
  L0Number& operator*=(const L0Number& b) { return *this = *this * b; }
  friend bool operator==(const L0Number& a, const L0Number& b) { return a.c_ == b.c_; }

  std::string to_string() const;

 private:
  L0Ptr F_;
  std::vector<Rational> c_;
};

std::ostream& operator<<(std::ostream& os, const L0Number& a);

}  // namespace phodge
