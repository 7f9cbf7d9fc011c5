#pragma once

// W(R)[1/p] in the desk model, θ, truncated B_dR^+ and B_st.
//
// WRElement: finite K0-combinations of Teichmüller monomials [π]^e or
// [ε]^e. An element may be an approximation known only modulo p^w_prec
// in W(R) (Teichmüller lifts of non-monomial tilt elements).
//
// BdRElement: Σ c_i X^i mod X^N with c_i in the C-side field, where X is
// ξ = [π] - p (kummer) or [ε] - 1 (cyclotomic), and the C-side field sits
// inside B_dR^+ through its canonical embedding.

#include <climits>
#include <optional>
#include <string>
#include <vector>

#include "phodge/cside.hpp"

namespace phodge {

class WRElement {
 public:
  WRElement() = default;
  static WRElement zero(ModelPtr M) { return WRElement(std::move(M)); }
  static WRElement constant(ModelPtr M, const UnramifiedElement& a);
  static WRElement rational(ModelPtr M, const Rational& a);
  /// a·[g]^e with g = π or ε.
  static WRElement monomial(ModelPtr M, const UnramifiedElement& a, const Rational& e);
  /// [π] - p (kummer) or [ε] - 1 (cyclotomic).
  static WRElement uniformizer(ModelPtr M);
  /// Teichmüller lift [x]; exact for monomials, otherwise correct modulo p^prec.
  static WRElement teichmuller(const TiltElement& x, long prec);
  /// Σ p^n [a_n^(1/p^n)], correct modulo p^prec.
  static WRElement from_witt(const WittVector<TiltElement>& w, long prec);

  const ModelPtr& model() const { return M_; }
  const std::map<Rational, UnramifiedElement>& terms() const { return t_; }
  long w_precision() const { return w_prec_; }
  bool exact() const { return w_prec_ == kExactPrecision; }
  long depth() const;

  friend WRElement operator+(const WRElement& a, const WRElement& b);
  friend WRElement operator-(const WRElement& a, const WRElement& b);
  friend WRElement operator*(const WRElement& a, const WRElement& b);
  WRElement operator-() const;
  WRElement scale(const UnramifiedElement& s) const;
  WRElement pow(long n) const;
  /// φ: [g]^e -> [g]^(pe), σ on coefficients.
  WRElement frobenius() const;

  friend std::ostream& operator<<(std::ostream& os, const WRElement& x);

 private:
  explicit WRElement(ModelPtr M) : M_(std::move(M)) {}
  void add_term(const Rational& e, const UnramifiedElement& a);

  ModelPtr M_;
  std::map<Rational, UnramifiedElement> t_;
  long w_prec_ = kExactPrecision;
};

/// θ([g]^e): p^e realized in K0(p^(1/p^M)), or ζ_(p^k)^a for e = a/p^k.
CSideElement theta_monomial(const ModelPtr& M, const Rational& e);
CSideElement theta(const WRElement& w);
CSideElement theta(const WittVector<TiltElement>& w, long prec);
/// x^(n) for a monomial tilt element.
CSideElement theta_tower(const TiltElement& x, long n);

class BdRElement {
 public:
  BdRElement() = default;
  static BdRElement zero(ModelPtr M, long N);
  static BdRElement from_cside(ModelPtr M, const CSideElement& c, long N);
  static BdRElement rational(ModelPtr M, const Rational& a, long N);
  /// X itself (ξ or [ε] - 1) mod X^N.
  static BdRElement uniformizer(ModelPtr M, long N);
  BdRElement(ModelPtr M, std::vector<CSideElement> c);

  const ModelPtr& model() const { return M_; }
  long order() const { return static_cast<long>(c_.size()); }
  const std::vector<CSideElement>& coeffs() const { return c_; }
  const CSideElement& operator[](long i) const { return c_[i]; }
  bool is_zero() const;
  /// Smallest j with c_j nonzero (the filtration degree); order() when zero.
  long fil_degree() const;
  BdRElement truncate(long N) const;

  friend BdRElement operator+(const BdRElement& a, const BdRElement& b);
  friend BdRElement operator-(const BdRElement& a, const BdRElement& b);
  friend BdRElement operator*(const BdRElement& a, const BdRElement& b);
  BdRElement operator-() const;
  BdRElement scale(const CSideElement& s) const;
  BdRElement scale(const Rational& s) const;
  BdRElement pow(long n) const;

  friend bool congruent(const BdRElement& a, const BdRElement& b) { return (a - b).is_zero(); }
  friend std::ostream& operator<<(std::ostream& os, const BdRElement& x);

 private:
  ModelPtr M_;
  std::vector<CSideElement> c_;
};

/// ξ-adic (resp. ([ε]-1)-adic) expansion mod Fil^N; the constant term is
/// certified against θ.
BdRElement xi_expand(const WRElement& w, long N);
BdRElement xi_expand(const WittVector<TiltElement>& w, long N);

struct LogReport {
  BdRElement value;
  long terms = 0;               // number of series terms summed
  Rational gamma;               // valuation of the constant term of the argument (or -1 when it is 0)
  Rational certified_valuation; // every omitted term has coefficients of at least this valuation
  std::string certificate;
};

/// log(1 + z) mod Fil^N, z given mod Fil^N; target is the p-adic precision
/// the omitted tail must exceed.
LogReport log_series(const BdRElement& z, long target);
/// log[π] = Σ (-1)^(n+1) ξ^n / (n p^n) mod Fil^N (kummer model).
BdRElement log_pi(const ModelPtr& M, long N);
/// t = log[ε] mod Fil^N (cyclotomic model).
BdRElement t_element(const ModelPtr& M, long N);
/// log[a] for a unit a of the tilt model, mod Fil^N.
LogReport log_unit(const TiltElement& a, long N);

/// An element of B_dR = B_dR^+[1/t]: num / t^t_power.
struct BdRFraction {
  BdRElement num;
  long t_power = 0;
};
BdRFraction operator*(const BdRFraction& a, const BdRFraction& b);

// ---- B_st

/// A crystalline presentation Σ a_k t^k with a_k in W(R)[1/p].
struct CrisPresentation {
  std::vector<WRElement> t_coeffs;
};

struct BstCoefficient {
  BdRElement value;
  std::optional<CrisPresentation> pres;
};

class BstElement {
 public:
  BstElement() = default;
  BstElement(ModelPtr M, long N, std::vector<BstCoefficient> c);
  static BstElement zero(ModelPtr M, long N);
  static BstElement from_bdr(const BdRElement& v);
  static BstElement from_presentation(ModelPtr M, const CrisPresentation& pres, long N);
  /// u = log[π] as the formal generator.
  static BstElement u(ModelPtr M, long N);

  const ModelPtr& model() const { return M_; }
  long order() const { return N_; }
  long degree() const { return static_cast<long>(c_.size()) - 1; }
  const std::vector<BstCoefficient>& coeffs() const { return c_; }

  friend BstElement operator+(const BstElement& a, const BstElement& b);
  friend BstElement operator-(const BstElement& a, const BstElement& b);
  friend BstElement operator*(const BstElement& a, const BstElement& b);
  BstElement scale(const Rational& s) const;

  /// Values agree at the tracked precision (presentations ignored).
  friend bool congruent(const BstElement& a, const BstElement& b);

 private:
  ModelPtr M_;
  long N_ = 0;
  std::vector<BstCoefficient> c_;
};

/// Value in B_dR^+ of a presentation (t realized as log[ε]; kummer needs t-degree 0).
BdRElement realize(const CrisPresentation& pres, const ModelPtr& M, long N);
CrisPresentation frobenius(const CrisPresentation& pres);

enum class BstAction { Phi, N };
BstElement bst_action(const BstElement& x, BstAction which);
/// Image in B_dR^+/Fil^N with u -> log[π] (kummer model).
BdRElement bst_to_bdr(const BstElement& x);

}  // namespace phodge
