#pragma once

// Desk-scale model of the tilt R: F_q-combinations of monomials π^e
// (kummer model, e >= 0 in Z[1/p], truncated at a π-adic degree cutoff)
// or ε^e (cyclotomic model, e in Z[1/p]), with exponent denominators
// bounded by p^depth.

#include <map>
#include <memory>
#include <ostream>
#include <random>

#include "phodge/unramified.hpp"
#include "phodge/witt.hpp"

namespace phodge {

enum class TiltModel { Kummer, Cyclotomic };

std::string_view model_name(TiltModel m);
TiltModel parse_model(std::string_view s);

struct PeriodConfig {
  TiltModel kind = TiltModel::Kummer;
  long p = 2;
  long f = 1;
  long depth = 3;     // maximal perfection depth m
  long prec = 12;     // p-adic digits carried by constants
  long cutoff = 16;   // kummer π-adic degree cutoff
  long max_order = 32;
  long max_u_degree = 6;
};

class PeriodModel {
 public:
  explicit PeriodModel(PeriodConfig c);
  static std::shared_ptr<const PeriodModel> make(PeriodConfig c) {
    return std::make_shared<const PeriodModel>(std::move(c));
  }
  const PeriodConfig& config() const { return c_; }
  TiltModel kind() const { return c_.kind; }
  long prime() const { return c_.p; }
  long depth() const { return c_.depth; }
  long prec() const { return c_.prec; }
  const FieldPtr& field() const { return K_; }

  /// Smallest k with p^k * e integral; DepthExceeded when k > depth.
  long exponent_depth(const Rational& e) const;
  /// Same without the cap.
  long raw_depth(const Rational& e) const;

 private:
  PeriodConfig c_;
  FieldPtr K_;
};

using ModelPtr = std::shared_ptr<const PeriodModel>;

class TiltElement {
 public:
  TiltElement() = default;
  static TiltElement zero(ModelPtr M) { return TiltElement(std::move(M)); }
  static TiltElement constant(ModelPtr M, const FqElement& c);
  static TiltElement monomial(ModelPtr M, const FqElement& c, const Rational& e);
  /// π (kummer) or ε (cyclotomic).
  static TiltElement generator(ModelPtr M);

  const ModelPtr& model() const { return M_; }
  const std::map<Rational, FqElement>& terms() const { return t_; }
  bool is_zero() const { return t_.empty(); }
  bool is_monomial() const { return t_.size() == 1; }
  /// False when the degree cutoff dropped nonzero terms.
  bool exact() const { return exact_; }
  /// Least exponent (kummer); nullopt for zero.
  std::optional<Rational> valuation() const;
  /// Largest denominator exponent among the terms.
  long depth() const;

  friend TiltElement operator+(const TiltElement& a, const TiltElement& b);
  friend TiltElement operator-(const TiltElement& a, const TiltElement& b);
  friend TiltElement operator*(const TiltElement& a, const TiltElement& b);
  TiltElement operator-() const;
  /// x -> x^p.
  TiltElement frobenius() const;
  /// x -> x^(1/p); DepthExceeded past the model depth.
  TiltElement root_p() const;
  TiltElement pow(long n) const;

  friend bool operator==(const TiltElement& a, const TiltElement& b) { return a.t_ == b.t_; }
  friend std::ostream& operator<<(std::ostream& os, const TiltElement& x);

 private:
  explicit TiltElement(ModelPtr M) : M_(std::move(M)) {}
  void add_term(const Rational& e, const FqElement& c);
  void truncate();

  ModelPtr M_;
  std::map<Rational, FqElement> t_;
  bool exact_ = true;
};

template <>
struct WittRing<TiltElement> {
  static constexpr WittRoute route = WittRoute::Universal;
  static constexpr bool char_p = true;
  static TiltElement zero(const TiltElement& like) { return TiltElement::zero(like.model()); }
  static TiltElement from_integer(const TiltElement& like, const Integer& n) {
    const auto& M = like.model();
    return TiltElement::constant(
        M, FqElement::from_int(M->field(), mpz_fdiv_ui(n.get_mpz_t(), static_cast<unsigned long>(M->prime()))));
  }
};

}  // namespace phodge
