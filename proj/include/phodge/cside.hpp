#pragma once

// Finite approximations of C: the fields K0(p^(1/p^M)) (kummer) and
// K0(ζ_(p^M)) (cyclotomic), in the power basis of ρ = p^(1/p^M) resp. ζ.

#include <map>
#include <memory>
#include <optional>
#include <ostream>

#include "phodge/tilt.hpp"

namespace phodge {

class CSideField {
 public:
  static std::shared_ptr<const CSideField> get(TiltModel kind, const FieldPtr& K, long M);

  CSideField(TiltModel kind, FieldPtr K, long M);
  TiltModel kind() const { return kind_; }
  const FieldPtr& field() const { return K_; }
  long prime() const { return K_->prime(); }
  long depth() const { return M_; }
  /// Basis size: p^M (kummer) or φ(p^M) (cyclotomic).
  long dim() const { return dim_; }
  /// Ramification index, equal to dim().
  long ram() const { return dim_; }

  struct Term {
    long index;
    long sign;
  };
  /// ρ^i ρ^j expressed in the basis, with an extra factor p^carry (kummer only).
  const std::vector<Term>& product(long i, long j, long& carry) const;
  /// Image of the basis index i of depth M in depth M' >= M, as a list of terms.
  std::vector<Term> embed_index(long i, long target_depth) const;
  /// ζ^k reduced to the basis for any integer k (cyclotomic).
  std::vector<Term> zeta_power(const Integer& k) const;

 private:
  TiltModel kind_;
  FieldPtr K_;
  long M_;
  long dim_;
  std::vector<std::vector<Term>> table_;
  std::vector<long> carry_;
};

using CSidePtr = std::shared_ptr<const CSideField>;

class CSideElement {
 public:
  CSideElement() = default;
  static CSideElement zero(CSidePtr F) { return CSideElement(std::move(F)); }
  static CSideElement from_k0(CSidePtr F, const UnramifiedElement& x);
  static CSideElement basis(CSidePtr F, long index, const UnramifiedElement& coeff);
  /// Coordinates as stored (index -> value), e.g. read back from JSON.
  static CSideElement from_coeffs(CSidePtr F, std::map<long, UnramifiedElement> c);

  const CSidePtr& field() const { return F_; }
  const std::map<long, UnramifiedElement>& coeffs() const { return c_; }
  /// Coordinate at a basis index (exact zero when absent).
  std::optional<UnramifiedElement> coeff(long index) const;

  bool is_zero() const;
  /// Valuation normalized by v(p) = 1; nullopt when zero at the tracked precision.
  std::optional<Rational> valuation() const;
  /// Precision in valuation units; nullopt for an exact zero.
  std::optional<Rational> precision() const;
  /// The element viewed in a field of larger depth.
  CSideElement lift_to(long depth) const;
  /// The element reduced to absolute precision n on every coordinate (kummer: coordinate precision).
  CSideElement cap(long n) const;

  friend CSideElement operator+(const CSideElement& a, const CSideElement& b);
  friend CSideElement operator-(const CSideElement& a, const CSideElement& b);
  friend CSideElement operator*(const CSideElement& a, const CSideElement& b);
  CSideElement operator-() const;
  CSideElement scale(const UnramifiedElement& s) const;
  CSideElement pow(long n) const;

  friend bool congruent(const CSideElement& a, const CSideElement& b) { return (a - b).is_zero(); }
  friend bool operator==(const CSideElement& a, const CSideElement& b);
  friend std::ostream& operator<<(std::ostream& os, const CSideElement& x);

 private:
  explicit CSideElement(CSidePtr F) : F_(std::move(F)) {}
  void add_to(long index, const UnramifiedElement& v);

  CSidePtr F_;
  std::map<long, UnramifiedElement> c_;
};

}  // namespace phodge
