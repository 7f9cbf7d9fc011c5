#pragma once

// Laurent series over L0 on finite windows, connection modules, Sen operators
// and the D0 lattice predicate.
//
// A series stores a_n for n in a window [lo, hi]. Outside the window a
// coefficient is unknown, except beyond a side flagged exact, where it is
// zero. Each stored coefficient is known modulo p^prec. Operations return
// exactly the coefficients they can determine from what is known and throw
// WindowExhausted when nothing is left.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "phodge/linalg.hpp"

namespace phodge {

struct Coef {
  L0Number value;
  long prec = kExactPrecision;  // value is known modulo p^prec

  bool exact() const { return prec == kExactPrecision; }
  /// A lower bound for the valuation of the true coefficient; kExactPrecision for an exact zero.
  long vlow() const;
};

class RobbaSeries {
 public:
  RobbaSeries() = default;
  /// coeffs[k] is a_(lo+k).
  RobbaSeries(L0Ptr F, long lo, std::vector<Coef> coeffs, bool lower_exact, bool upper_exact);

  static RobbaSeries zero(const L0Ptr& F);
  static RobbaSeries constant(const L0Ptr& F, const L0Number& c);
  static RobbaSeries monomial(const L0Ptr& F, const L0Number& c, long n);
  /// The Laurent polynomial Σ c[k] x^(lo+k), exact on both sides.
  static RobbaSeries laurent(const L0Ptr& F, long lo, const std::vector<L0Number>& c);
  static RobbaSeries laurent(const L0Ptr& F, long lo, const std::vector<Rational>& c);

  const L0Ptr& field() const { return F_; }
  long prime() const { return F_->prime(); }
  long lo() const { return lo_; }
  long hi() const { return lo_ + static_cast<long>(c_.size()) - 1; }
  bool lower_exact() const { return lower_exact_; }
  bool upper_exact() const { return upper_exact_; }
  bool is_polynomial() const { return lower_exact_ && upper_exact_; }
  /// Inner radius as an exponent ρ: convergence is asserted for 0 < v(x) < ρ.
  /// nullopt means the whole punctured disc.
  const std::optional<Rational>& radius() const { return rho_; }
  RobbaSeries with_radius(std::optional<Rational> rho) const;

  bool known(long n) const;
  /// WindowExhausted when a_n is unknown.
  Coef coef(long n) const;
  const std::vector<Coef>& stored() const { return c_; }
  bool all_exact() const;

  RobbaSeries operator-() const;
  friend RobbaSeries operator+(const RobbaSeries& a, const RobbaSeries& b);
  friend RobbaSeries operator-(const RobbaSeries& a, const RobbaSeries& b);
  friend RobbaSeries operator*(const RobbaSeries& a, const RobbaSeries& b);

  /// d/dx.
  RobbaSeries derive() const;
  RobbaSeries scale(const L0Number& c) const;
  /// x^k · f.
  RobbaSeries shift(long k) const;
  /// σ^k on coefficients.
  RobbaSeries sigma(long k = 1) const;
  /// Restriction to [lo, hi] ∩ window; sides that get cut become inexact.
  RobbaSeries truncate(long lo, long hi) const;
  /// 1/f, for f with an exact lower side and a leading coefficient known to be
  /// nonzero. The result has at most `terms` coefficients.
  RobbaSeries inverse(long terms) const;

  /// Inexact coefficients replaced by small representatives modulo p^prec.
  RobbaSeries reduced() const;
  /// Every known coefficient vanishes modulo its precision.
  bool is_zero() const;
  std::string to_string(const std::string& var = "x") const;

 private:
  void normalize();

  L0Ptr F_;
  long lo_ = 0;
  std::vector<Coef> c_;
  bool lower_exact_ = true;
  bool upper_exact_ = true;
  std::optional<Rational> rho_;
};

std::ostream& operator<<(std::ostream& os, const RobbaSeries& f);

/// Comparison on the window where both are known, modulo `prec` when given.
struct Agreement {
  bool equal = true;
  long lo = 0, hi = -1;
  std::optional<long> first_mismatch;
};
Agreement compare(const RobbaSeries& a, const RobbaSeries& b, long prec = kExactPrecision);

enum class RobbaOp { Add, Mul, Derive };
/// Derive ignores g.
RobbaSeries robba_arith(const RobbaSeries& f, const RobbaSeries& g, RobbaOp op);

struct GaussValue {
  Rational value;
  long argmin = 0;
  /// The minimum sits on an end of the window whose far side is unknown.
  bool boundary = false;
  /// Some coefficient entered only through its precision.
  bool lower_bound_only = false;
  /// v(a_n) + n·s increases strictly toward every unknown side over the last stored indices.
  bool tail_decreasing = true;
};

/// min over the window of v(a_n) + n·s. InvalidArgument outside (0, ρ) or for
/// the zero series.
GaussValue gauss_valuation(const RobbaSeries& f, const Rational& s);

/// min v(a_n) over the window: the valuation of a bounded element. nullopt for zero.
std::optional<long> sup_valuation(const RobbaSeries& f);
bool is_integral(const RobbaSeries& f);

/// f(x^p + p·z) with σ on the coefficients. z must be an integral Laurent
/// polynomial; when f has negative powers z must have degree < p so that
/// (x^p + p z)^(−1) expands in x^(−1). `window` bounds the output; without it
/// a side that would be infinite is cut 32 places past the leading term.
RobbaSeries frobenius_pullback(const RobbaSeries& f, const RobbaSeries& z,
                               std::optional<std::pair<long, long>> window = std::nullopt);

class SeriesMatrix {
 public:
  SeriesMatrix() = default;
  /// Zero matrix.
  SeriesMatrix(L0Ptr F, long rows, long cols);
  static SeriesMatrix identity(const L0Ptr& F, long n);
  static SeriesMatrix constant(const L0Matrix& m);
  /// Σ_k coeffs[k] t^(lo+k), exact.
  static SeriesMatrix from_coefficients(const L0Ptr& F, long lo, const std::vector<L0Matrix>& coeffs);

  const L0Ptr& field() const { return F_; }
  long rows() const { return r_; }
  long cols() const { return c_; }
  RobbaSeries& operator()(long i, long j) { return a_[i * c_ + j]; }
  const RobbaSeries& operator()(long i, long j) const { return a_[i * c_ + j]; }

  /// Matrix of the t^n coefficients; WindowExhausted when any entry is unknown there.
  L0Matrix coefficient(long n) const;
  /// Window on which every entry is known; LONG_MIN / LONG_MAX for a side on
  /// which every entry is exact.
  std::pair<long, long> known_window() const;
  bool lower_exact() const;

  SeriesMatrix operator-() const;
  friend SeriesMatrix operator+(const SeriesMatrix& a, const SeriesMatrix& b);
  friend SeriesMatrix operator-(const SeriesMatrix& a, const SeriesMatrix& b);
  friend SeriesMatrix operator*(const SeriesMatrix& a, const SeriesMatrix& b);
  SeriesMatrix scale(const RobbaSeries& s) const;
  SeriesMatrix scale(const L0Number& s) const;
  SeriesMatrix derive() const;
  SeriesMatrix shift(long k) const;
  SeriesMatrix sigma(long k = 1) const;
  SeriesMatrix truncate(long lo, long hi) const;
  SeriesMatrix reduced() const;
  SeriesMatrix frobenius(const RobbaSeries& z, std::optional<std::pair<long, long>> window = std::nullopt) const;

  RobbaSeries det() const;
  /// BasisSingular when the determinant is zero on its window.
  SeriesMatrix inverse(long terms) const;

  bool is_zero() const;
  /// min valuation over every known coefficient; nullopt when all are zero.
  std::optional<long> valuation() const;

 private:
  L0Ptr F_;
  long r_ = 0, c_ = 0;
  std::vector<RobbaSeries> a_;
};

Agreement compare(const SeriesMatrix& a, const SeriesMatrix& b, long prec = kExactPrecision);

enum class Pole { Logarithmic, Holomorphic };
const char* pole_name(Pole p);

struct FrobeniusData {
  RobbaSeries z;
  SeriesMatrix phi;  // φ_D(e_j) = Σ_i phi(i,j) e_i
};

/// ∇(e_j) = Σ_i A(i,j) e_i ⊗ ω with ω = dt/t or dt. Vectors are columns.
struct ConnectionModule {
  L0Ptr field;
  long h = 0;
  SeriesMatrix A;
  Pole pole = Pole::Holomorphic;
  std::optional<FrobeniusData> frobenius;

  long prime() const { return field->prime(); }
};

/// InvalidModule on shape or field mismatches.
void require_valid(const ConnectionModule& M);

struct ExponentFactor {
  QPoly poly;  // monic, irreducible over Q
  long multiplicity = 1;
  std::optional<Rational> root;  // for linear factors
};

struct ResidueReport {
  L0Matrix residue;
  std::vector<L0Number> charpoly;  // low degree first
  /// Whether the characteristic polynomial has rational coefficients and was factored.
  bool factored = false;
  std::vector<ExponentFactor> factors;
  /// Rational exponents with multiplicity, increasing.
  std::vector<Rational> exponents;
  bool nilpotent = false;
  /// nullopt when not decided (non-rational characteristic polynomial).
  std::optional<bool> semisimple;
};

/// A holomorphic module is read as t·A·dt/t and has residue 0. NotRegular when
/// A may have negative-index coefficients.
ResidueReport residue_exponents(const ConnectionModule& M);

struct FormalSolution {
  long order = 0;
  /// Holomorphic: Y ≡ I mod t with dY = −A·Y·dt, mod t^order.
  /// Logarithmic: the gauge P ≡ I mod t with t·dP/dt + A·P = P·R, mod t^order.
  SeriesMatrix Y;
  bool unipotent = false;
  L0Matrix residue;  // R, logarithmic case
  /// Logarithmic case: rows spanning ker R^k for k = 1, 2, ... up to everything.
  /// Transported by P they give the increasing filtration with trivial graded pieces.
  std::vector<L0Matrix> filtration;
};

/// NotRegular, WindowExhausted, ResonanceObstruction, NotUnipotentFormally.
FormalSolution solve_horizontal_formal(const ConnectionModule& M, long N);
/// dY/dt + A·Y (holomorphic) or t·dP/dt + A·P − P·R (logarithmic), on the
/// window where it is determined.
SeriesMatrix formal_residual(const ConnectionModule& M, const FormalSolution& S);

struct FrobeniusCheck {
  bool pass = false;
  /// Window on which both sides were compared.
  long lo = 0, hi = -1;
  /// Last index through which the relation holds.
  long verified_through = 0;
  std::optional<long> first_failure;
  SeriesMatrix lhs, rhs;
};

/// ∇∘φ_D = (φ_D ⊗ φ)∘∇ with φ(x) = x^p + p z, compared modulo p^prec:
/// Φ' + AΦ = Φ·φ(A)·φ(x)' for dx, x Φ' + AΦ = Φ·φ(A)·x φ(x)'/φ(x) for dx/x.
FrobeniusCheck frobenius_structure_check(const ConnectionModule& M, long prec = kExactPrecision,
                                         std::optional<std::pair<long, long>> window = std::nullopt);

struct GammaActionData {
  L0Ptr field;
  SeriesMatrix gamma;  // power series in t, read mod t^r
  Rational chi;        // χ(γ), a 1-unit
  long chi_prec = kExactPrecision;
  long r = 8;
};

struct SenResult {
  SeriesMatrix nabla0;  // mod t^r, coefficients mod p^prec
  Rational log_chi;     // log χ(γ) mod p^(prec + v(log χ))
  long prec = 0;
  long r = 0;
  long log_terms = 0;  // terms of the matrix logarithm that were summed
  long guard = 0;      // extra digits carried so that the roundtrip reaches prec
};

/// ∇0 = log(γ)/log χ(γ) mod t^r, to at least p^prec, carrying enough extra
/// digits that sen_exponentiate reproduces γ modulo p^prec. ChiTrivial,
/// LogDivergent.
SenResult sen_connection(const GammaActionData& g, long prec);
/// exp(log χ(γ)·∇0) mod t^r; the coefficient precision is a certified bound
/// derived from the precision of ∇0.
SeriesMatrix sen_exponentiate(const SenResult& s);

struct D0Result {
  bool pass = false;
  long order = 0;
  /// The gauged matrix in dt/t form, mod t^order.
  SeriesMatrix gauged;
  /// Lowest index with a nonzero coefficient at or below t^0, when failing.
  std::optional<long> pole_index;
  /// On pass: the gauged module as a holomorphic connection.
  std::optional<ConnectionModule> holomorphic;
};

/// B maps old coordinates to new: y = B x. The gauged matrix in dt/t form is
/// B A B^(−1) − t (dB/dt) B^(−1); the test passes when it vanishes mod t.
D0Result d0_lattice_test(const ConnectionModule& M, const SeriesMatrix& B, long N);

}  // namespace phodge
