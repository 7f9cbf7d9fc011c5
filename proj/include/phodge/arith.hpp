#pragma once

// Exact integer/rational helpers shared by every module.

#include <gmpxx.h>

#include <climits>
#include <optional>
#include <string>

namespace phodge {

using Integer = mpz_class;
using Rational = mpq_class;

/// Precision value meaning "known exactly".
constexpr long kExactPrecision = LONG_MAX;

/// p^k as an Integer; cached per thread.
const Integer& ppow(long p, long k);

/// p^k as a Rational, k of either sign.
Rational ppow_q(long p, long k);

bool is_prime(long n);

/// p-adic valuation; nullopt for zero.
std::optional<long> vp(const Integer& x, long p);
std::optional<long> vp(const Rational& x, long p);

/// Largest k with p^k <= n (n >= 1).
long floor_log(long p, long n);

/// Exact p-adic valuation of n! (Legendre).
long vp_factorial(long p, long n);

/// Generalized binomial coefficient binom(e, k) for rational e.
Rational binomial(const Rational& e, long k);

/// x mod m in [0, m).
Integer mod_floor(const Integer& x, const Integer& m);

/// Inverse of a modulo m; a must be a unit.
Integer mod_inverse(const Integer& a, const Integer& m);

/// Image of a p-integral rational in Z/p^k.
Integer rational_mod(const Rational& x, long p, long k);

Rational parse_rational(const std::string& text);
std::string to_string(const Rational& x);
std::string to_string(const Integer& x);

/// Floor of a rational.
Integer floor_q(const Rational& x);

}  // namespace phodge
