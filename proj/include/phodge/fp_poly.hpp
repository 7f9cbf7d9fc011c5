#pragma once

// Dense univariate polynomials over Z/m for word-sized m (m < 2^62),
// coefficients stored low degree first with no trailing zeros.

#include <cstdint>
#include <random>
#include <vector>

namespace phodge {

using u64 = std::uint64_t;

inline u64 mulm(u64 a, u64 b, u64 m) {
  return static_cast<u64>(static_cast<unsigned __int128>(a) * b % m);
}
u64 powmod(u64 a, u64 e, u64 m);
/// Inverse modulo a prime m.
u64 invmod(u64 a, u64 m);

using FpPoly = std::vector<u64>;

namespace fp {

void trim(FpPoly& a);
long degree(const FpPoly& a);  // -1 for zero
FpPoly add(const FpPoly& a, const FpPoly& b, u64 m);
FpPoly sub(const FpPoly& a, const FpPoly& b, u64 m);
FpPoly mul(const FpPoly& a, const FpPoly& b, u64 m);
FpPoly scale(const FpPoly& a, u64 c, u64 m);
/// Quotient and remainder; b must have invertible leading coefficient (m prime).
void divmod(const FpPoly& a, const FpPoly& b, u64 m, FpPoly& q, FpPoly& r);
FpPoly rem(const FpPoly& a, const FpPoly& b, u64 m);
FpPoly monic(const FpPoly& a, u64 m);
FpPoly gcd(FpPoly a, FpPoly b, u64 m);
/// Monic gcd with Bezout cofactors s·a + t·b = gcd.
FpPoly xgcd(const FpPoly& a, const FpPoly& b, u64 m, FpPoly& s, FpPoly& t);
FpPoly mulmod(const FpPoly& a, const FpPoly& b, const FpPoly& mod, u64 m);
FpPoly powmod(FpPoly a, u64 e, const FpPoly& mod, u64 m);
FpPoly derivative(const FpPoly& a, u64 m);
bool is_irreducible(const FpPoly& f, u64 m);
/// Monic irreducible factors (with multiplicity) of a squarefree-or-not polynomial, m prime.
std::vector<FpPoly> factor(const FpPoly& f, u64 m, std::mt19937_64& rng);

}  // namespace fp

}  // namespace phodge
