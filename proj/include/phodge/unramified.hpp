#pragma once

// The unramified extension K0 = W(F_q)[1/p] of degree f over Q_p.
//
// Elements carry coordinates in the basis of Teichmüller lifts
// [a], [a]^p, ..., [a]^(p^(f-1)) of a normal basis of F_q, so the
// Frobenius σ is a cyclic shift of coordinates.

#include <memory>
#include <ostream>
#include <random>
#include <vector>

#include "phodge/fp_poly.hpp"
#include "phodge/padic.hpp"

namespace phodge {

class UnramifiedField;
using FieldPtr = std::shared_ptr<const UnramifiedField>;

class UnramifiedField {
 public:
  /// Shared context for (p, f) with structure constants known mod p^cap at least.
  static FieldPtr get(long p, long f, long cap = 64);

  long prime() const { return p_; }
  long degree() const { return f_; }
  long cap() const { return cap_; }
  /// Defining polynomial of F_q over F_p (monic, power basis).
  const FpPoly& modulus() const { return modulus_; }
  /// The normal element a of F_q (power basis).
  const FpPoly& normal_element() const { return normal_; }

  // Residue field arithmetic in the power basis.
  FpPoly res_add(const FpPoly& a, const FpPoly& b) const { return fp::add(a, b, p_); }
  FpPoly res_sub(const FpPoly& a, const FpPoly& b) const { return fp::sub(a, b, p_); }
  FpPoly res_mul(const FpPoly& a, const FpPoly& b) const { return fp::mulmod(a, b, modulus_, p_); }
  FpPoly res_pow(const FpPoly& a, u64 e) const { return fp::powmod(a, e, modulus_, p_); }
  FpPoly res_inv(const FpPoly& a) const;
  /// Coordinates in the normal basis a^(p^i).
  std::vector<u64> res_to_normal(const FpPoly& a) const;
  FpPoly res_from_normal(const std::vector<u64>& c) const;
  /// Inverse of x -> x^p.
  FpPoly res_frob_inv(const FpPoly& a) const;

  const Integer& structure(long i, long j, long k) const { return c_[(i * f_ + j) * f_ + k]; }
  /// Coordinate of 1 (the same in every slot).
  const Integer& one_coord() const { return one_; }

  /// Teichmüller lift of a in power-basis form mod p^prec, then converted to coordinates.
  std::vector<Integer> teichmuller_coords(const FpPoly& a, long prec) const;

  UnramifiedField(long p, long f, long cap);

 private:
  std::vector<Integer> to_coords(const std::vector<Integer>& power, long prec) const;

  long p_, f_, cap_;
  FpPoly modulus_;
  FpPoly normal_;
  std::vector<std::vector<u64>> normal_inv_;  // power basis -> normal basis mod p
  std::vector<std::vector<Integer>> tinv_;     // power basis -> Teichmüller coordinates mod p^cap
  std::vector<Integer> c_;
  Integer one_;
};

/// An element of F_q.
struct FqElement {
  FieldPtr field;
  FpPoly value;  // power basis, trimmed

  static FqElement zero(FieldPtr K) { return {std::move(K), {}}; }
  static FqElement one(FieldPtr K) { return {std::move(K), {1}}; }
  static FqElement from_int(FieldPtr K, long a);
  static FqElement random(FieldPtr K, std::mt19937_64& rng);

  bool is_zero() const { return value.empty(); }
  FqElement operator+(const FqElement& b) const { return {field, field->res_add(value, b.value)}; }
  FqElement operator-(const FqElement& b) const { return {field, field->res_sub(value, b.value)}; }
  FqElement operator-() const { return {field, field->res_sub({}, value)}; }
  FqElement operator*(const FqElement& b) const { return {field, field->res_mul(value, b.value)}; }
  FqElement inverse() const { return {field, field->res_inv(value)}; }
  FqElement pow(u64 e) const { return {field, field->res_pow(value, e)}; }
  FqElement frobenius() const { return pow(static_cast<u64>(field->prime())); }
  FqElement frobenius_inverse() const { return {field, field->res_frob_inv(value)}; }
  friend bool operator==(const FqElement& a, const FqElement& b) { return a.value == b.value; }
  friend bool operator<(const FqElement& a, const FqElement& b) { return a.value < b.value; }
};

std::ostream& operator<<(std::ostream& os, const FqElement& a);

class UnramifiedElement {
 public:
  UnramifiedElement() = default;
  UnramifiedElement(FieldPtr K, std::vector<PadicNumber> coords);

  static UnramifiedElement zero(FieldPtr K, long abs_prec);
  static UnramifiedElement one(FieldPtr K, long rel_prec) { return exact(K, 1, rel_prec); }
  static UnramifiedElement from_padic(FieldPtr K, const PadicNumber& x);
  static UnramifiedElement from_rational(FieldPtr K, const Rational& x, long abs_prec);
  /// Exact rational constant carried at rel_prec significant digits.
  static UnramifiedElement exact(FieldPtr K, const Rational& x, long rel_prec);
  static UnramifiedElement random(FieldPtr K, long abs_prec, std::mt19937_64& rng, long min_val = 0);

  const FieldPtr& field() const { return K_; }
  long prime() const { return K_->prime(); }
  long degree() const { return K_->degree(); }
  const std::vector<PadicNumber>& coords() const { return c_; }
  long abs_precision() const { return c_.front().abs_precision(); }
  bool is_zero() const;
  std::optional<long> valuation() const;
  long valuation_bound() const;
  /// The Q_p value when f = 1 or the element lies in Q_p.
  PadicNumber in_qp() const;
  bool is_rational() const;

  UnramifiedElement reduce(long abs_prec) const;
  UnramifiedElement cap(long abs_prec) const;

  UnramifiedElement operator-() const;
  friend UnramifiedElement operator+(const UnramifiedElement& a, const UnramifiedElement& b);
  friend UnramifiedElement operator-(const UnramifiedElement& a, const UnramifiedElement& b);
  friend UnramifiedElement operator*(const UnramifiedElement& a, const UnramifiedElement& b);
  friend UnramifiedElement operator/(const UnramifiedElement& a, const UnramifiedElement& b);
  UnramifiedElement& operator+=(const UnramifiedElement& b) { return *this = *this + b; }
  UnramifiedElement& operator-=(const UnramifiedElement& b) { return *this = *this - b; }
  UnramifiedElement& operator*=(const UnramifiedElement& b) { return *this = *this * b; }
  UnramifiedElement scale(const PadicNumber& s) const;
  UnramifiedElement inverse() const;
  UnramifiedElement pow(long n) const;
  /// σ^k.
  UnramifiedElement frobenius(long k = 1) const;
  /// Product of the σ-conjugates, an element of Q_p.
  PadicNumber norm() const;
  /// Residue in F_q; requires valuation >= 0 and abs precision >= 1.
  FqElement residue() const;

  friend bool operator==(const UnramifiedElement& a, const UnramifiedElement& b) { return a.c_ == b.c_; }
  friend bool congruent(const UnramifiedElement& a, const UnramifiedElement& b) { return (a - b).is_zero(); }
  friend std::ostream& operator<<(std::ostream& os, const UnramifiedElement& x);

 private:
  FieldPtr K_;
  std::vector<PadicNumber> c_;
};

UnramifiedElement unramified_frobenius(const UnramifiedElement& x);
/// The (q-1)-th root of unity (or 0) lifting a, mod p^prec.
UnramifiedElement teichmuller_residue(const FqElement& a, long prec);

}  // namespace phodge
