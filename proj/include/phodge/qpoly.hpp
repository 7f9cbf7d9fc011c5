#pragma once

// Dense univariate polynomials over Q, low degree first, no trailing zeros.

#include <optional>
#include <string>
#include <vector>

#include "phodge/arith.hpp"

namespace phodge {

using QPoly = std::vector<Rational>;

namespace qpoly {

void trim(QPoly& a);
long degree(const QPoly& a);  // -1 for zero
QPoly add(const QPoly& a, const QPoly& b);
QPoly sub(const QPoly& a, const QPoly& b);
QPoly mul(const QPoly& a, const QPoly& b);
QPoly scale(const QPoly& a, const Rational& c);
void divmod(const QPoly& a, const QPoly& b, QPoly& q, QPoly& r);
QPoly rem(const QPoly& a, const QPoly& b);
QPoly quo(const QPoly& a, const QPoly& b);
QPoly monic(const QPoly& a);
QPoly gcd(QPoly a, QPoly b);  // monic, or zero
/// s·a + t·b = gcd(a, b) (monic).
QPoly xgcd(const QPoly& a, const QPoly& b, QPoly& s, QPoly& t);
QPoly derivative(const QPoly& a);
Rational eval(const QPoly& a, const Rational& x);
bool is_squarefree(const QPoly& a);
std::string to_string(const QPoly& a, const char* var = "X");

/// Monic irreducible factors over Q with multiplicities.
struct Factor {
  QPoly poly;
  long mult;
};
std::vector<Factor> factor(const QPoly& a);

/// Valuations of the roots (in an algebraic closure of Q_p) read off the Newton
/// polygon of a polynomial with the given coefficient valuations (nullopt for
/// zero coefficients), sorted increasingly with multiplicity. The leading
/// coefficient must be nonzero. Zero roots are reported as nullopt, last.
std::vector<std::optional<Rational>> root_valuations(const std::vector<std::optional<Rational>>& coeff_vals);

/// Whether a monic Q-irreducible polynomial stays irreducible over Q_p, when
/// one of the implemented certificates applies: degree 1, a quadratic with
/// non-square discriminant, a one-segment Newton polygon whose slope has
/// denominator the degree, or (after scaling to slope 0) an irreducible
/// squarefree reduction mod p. nullopt when no certificate decides.
struct IrreducibilityCertificate {
  bool irreducible;
  std::string reason;
};
std::optional<IrreducibilityCertificate> qp_irreducible(const QPoly& g, long p);

/// Whether a nonzero rational is a square in Q_p.
bool is_qp_square(const Rational& x, long p);
/// Exact rational square root, if any.
std::optional<Rational> rational_sqrt(const Rational& x);

}  // namespace qpoly

}  // namespace phodge
