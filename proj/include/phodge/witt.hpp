#pragma once

// p-typical Witt vectors of finite length over a supplied coefficient ring.
//
// A coefficient ring R is described by WittRing<R>:
//   zero(like), from_integer(like, n)    constants in the ring of `like`
//   kind                                 how sums and products are computed:
//     TorsionFree  ghost inversion inside R, needs div_p_power(x, p, k)
//     Liftable     lift to a torsion-free ring, compute there, reduce back
//     Universal    evaluate the cached universal polynomials
//   char_p                               R has characteristic p (F acts by x -> x^p)

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <unordered_map>
#include <vector>

#include "phodge/arith.hpp"
#include "phodge/errors.hpp"
#include "phodge/fp_poly.hpp"
#include "phodge/unramified.hpp"

namespace phodge {

enum class WittRoute { TorsionFree, Liftable, Universal };

template <class R>
struct WittRing;

// ---- integer-coefficient multivariate polynomials for the universal table

constexpr std::size_t kWittMaxVars = 16;  // 2 * maximum length
using Monomial = std::array<std::uint16_t, kWittMaxVars>;

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (auto e : m) h = (h ^ e) * 1099511628211ull;
    return h;
  }
};

using ZPolyMulti = std::unordered_map<Monomial, Integer, MonomialHash>;

/// Universal sum and product polynomials S_k, P_k in X_0..X_{n-1}, Y_0..Y_{n-1}
/// (variable i is X_i, variable n_max + i is Y_i).
class WittPolynomialTable {
 public:
  /// Shared table for p and at least length n; LengthExceeded past the configured caps.
  static std::shared_ptr<const WittPolynomialTable> get(long p, long n);
  static long max_length() { return 8; }
  static std::size_t term_budget() { return 200000; }

  long prime() const { return p_; }
  long length() const { return static_cast<long>(S_.size()); }
  const ZPolyMulti& sum(long k) const { return S_[k]; }
  const ZPolyMulti& product(long k) const { return P_[k]; }
  /// Re-verify ghost(S) = ghost(X)+ghost(Y) and ghost(P) = ghost(X)ghost(Y) as polynomial identities.
  bool verify() const;

  WittPolynomialTable(long p, long n);

 private:
  long p_;
  std::vector<ZPolyMulti> S_, P_;
};

// ---- the Witt vector type

template <class R>
class WittVector {
 public:
  WittVector() = default;
  WittVector(long p, std::vector<R> a) : p_(p), a_(std::move(a)) {
    if (a_.empty()) fail(Errc::LengthMismatch, "Witt vectors have length >= 1");
  }

  long prime() const { return p_; }
  long length() const { return static_cast<long>(a_.size()); }
  const std::vector<R>& components() const { return a_; }
  const R& operator[](long i) const { return a_[i]; }

  friend bool operator==(const WittVector& a, const WittVector& b) { return a.p_ == b.p_ && a.a_ == b.a_; }

 private:
  long p_ = 0;
  std::vector<R> a_;
};

namespace witt_detail {

template <class R>
R ipow(const R& x, const Integer& e) {
  // e >= 1
  R base = x;
  std::optional<R> r;
  Integer k = e;
  while (k > 0) {
    if (mpz_odd_p(k.get_mpz_t())) r = r ? *r * base : base;
    k >>= 1;
    if (k > 0) base = base * base;
  }
  return *r;
}

template <class R>
void check_pair(const WittVector<R>& a, const WittVector<R>& b) {
  if (a.prime() != b.prime())
    fail(Errc::PrimeMismatch, "p = " + std::to_string(a.prime()) + " vs p = " + std::to_string(b.prime()));
  if (a.length() != b.length())
    fail(Errc::LengthMismatch,
         "lengths " + std::to_string(a.length()) + " and " + std::to_string(b.length()));
}

template <class R>
R eval(const ZPolyMulti& poly, const std::vector<std::vector<R>>& powers, long nvars, const R& like) {
  R acc = WittRing<R>::zero(like);
  for (const auto& [mono, coeff] : poly) {
    std::optional<R> term;
    for (long v = 0; v < nvars; ++v) {
      if (mono[v] == 0) continue;
      const R& pw = powers[v][mono[v]];
      term = term ? *term * pw : pw;
    }
    R c = WittRing<R>::from_integer(like, coeff);
    acc = acc + (term ? c * *term : c);
  }
  return acc;
}

}  // namespace witt_detail

/// Ghost components w_k = sum_{i<=k} p^i a_i^(p^(k-i)).
template <class R>
std::vector<R> ghost_map(const WittVector<R>& w) {
  const long p = w.prime(), n = w.length();
  std::vector<R> out;
  // pw[i] holds a_i^(p^(k-i)) for the current k
  std::vector<R> pw;
  for (long k = 0; k < n; ++k) {
    for (auto& x : pw) x = witt_detail::ipow(x, Integer(p));
    pw.push_back(w[k]);
    R s = WittRing<R>::zero(w[0]);
    for (long i = 0; i <= k; ++i) s = s + WittRing<R>::from_integer(w[0], ppow(p, i)) * pw[i];
    out.push_back(s);
  }
  return out;
}

/// Inverse of the ghost map on a p-torsion-free ring.
template <class R>
WittVector<R> ghost_inverse(long p, const std::vector<R>& ghost) {
  std::vector<R> a;
  std::vector<R> pw;
  for (std::size_t k = 0; k < ghost.size(); ++k) {
    for (auto& x : pw) x = witt_detail::ipow(x, Integer(p));
    R s = ghost[k];
    for (std::size_t i = 0; i < k; ++i) s = s - WittRing<R>::from_integer(ghost[k], ppow(p, i)) * pw[i];
    R ak = WittRing<R>::div_p_power(s, p, static_cast<long>(k));
    pw.push_back(ak);
    a.push_back(ak);
  }
  return WittVector<R>(p, std::move(a));
}

enum class WittOp { Add, Mul };

template <class R>
WittVector<R> witt_arith(const WittVector<R>& a, const WittVector<R>& b, WittOp op) {
  witt_detail::check_pair(a, b);
  const long p = a.prime(), n = a.length();
  constexpr WittRoute route = WittRing<R>::route;
  if constexpr (route == WittRoute::TorsionFree) {
    auto ga = ghost_map(a), gb = ghost_map(b);
    for (long k = 0; k < n; ++k) ga[k] = op == WittOp::Add ? R(ga[k] + gb[k]) : R(ga[k] * gb[k]);
    return ghost_inverse(p, ga);
  } else if constexpr (route == WittRoute::Liftable) {
    using L = typename WittRing<R>::Lift;
    std::vector<L> la, lb;
    for (long k = 0; k < n; ++k) {
      la.push_back(WittRing<R>::lift(a[k], n));
      lb.push_back(WittRing<R>::lift(b[k], n));
    }
    auto r = witt_arith(WittVector<L>(p, la), WittVector<L>(p, lb), op);
    std::vector<R> out;
    for (long k = 0; k < n; ++k) out.push_back(WittRing<R>::reduce(r[k], a[0]));
    return WittVector<R>(p, std::move(out));
  } else {
    auto table = WittPolynomialTable::get(p, n);
    const long nmax = table->length();
    // powers[v][e] = x_v^e for the exponents that can occur
    std::vector<std::vector<R>> powers(kWittMaxVars);
    auto fill = [&](long var, const R& x, long limit) {
      auto& v = powers[var];
      v.push_back(WittRing<R>::from_integer(x, 1));
      for (long e = 1; e <= limit; ++e) v.push_back(v.back() * x);
    };
    // exponent of X_i in S_k, P_k is at most p^(k-i)
    for (long i = 0; i < n; ++i) {
      long lim = 1;
      for (long k = i + 1; k < n; ++k) lim *= p;
      fill(i, a[i], lim);
      fill(nmax + i, b[i], lim);
    }
    std::vector<R> out;
    for (long k = 0; k < n; ++k) {
      const auto& poly = op == WittOp::Add ? table->sum(k) : table->product(k);
      out.push_back(witt_detail::eval(poly, powers, nmax + n, a[0]));
    }
    return WittVector<R>(p, std::move(out));
  }
}

template <class R>
WittVector<R> operator+(const WittVector<R>& a, const WittVector<R>& b) { return witt_arith(a, b, WittOp::Add); }
template <class R>
WittVector<R> operator*(const WittVector<R>& a, const WittVector<R>& b) { return witt_arith(a, b, WittOp::Mul); }

/// Witt vector of the integer m, components mapped into the ring of `like`.
template <class R>
WittVector<R> witt_integer(long p, long n, const Integer& m, const R& like) {
  std::vector<Integer> ghost(n, m);
  auto w = ghost_inverse<Integer>(p, ghost);
  std::vector<R> out;
  for (long k = 0; k < n; ++k) out.push_back(WittRing<R>::from_integer(like, w[k]));
  return WittVector<R>(p, std::move(out));
}

template <class R>
WittVector<R> operator-(const WittVector<R>& a) {
  return witt_integer<R>(a.prime(), a.length(), -1, a[0]) * a;
}
template <class R>
WittVector<R> operator-(const WittVector<R>& a, const WittVector<R>& b) { return a + (-b); }

/// Teichmüller representative [x] = (x, 0, ..., 0).
template <class R>
WittVector<R> witt_teichmuller(long p, long n, const R& x) {
  std::vector<R> a(n, WittRing<R>::zero(x));
  a[0] = x;
  return WittVector<R>(p, std::move(a));
}

/// Verschiebung: (a_0, ..., a_{n-1}) -> (0, a_0, ..., a_{n-2}).
template <class R>
WittVector<R> verschiebung(const WittVector<R>& w) {
  std::vector<R> a;
  a.push_back(WittRing<R>::zero(w[0]));
  for (long k = 0; k + 1 < w.length(); ++k) a.push_back(w[k]);
  return WittVector<R>(w.prime(), std::move(a));
}

/// Frobenius. Componentwise p-th power in characteristic p (length kept);
/// otherwise the ghost shift w_k -> w_{k+1}, which drops one component.
template <class R>
WittVector<R> witt_frobenius(const WittVector<R>& w) {
  const long p = w.prime();
  if constexpr (WittRing<R>::char_p) {
    std::vector<R> a;
    for (const auto& x : w.components()) a.push_back(witt_detail::ipow(x, Integer(p)));
    return WittVector<R>(p, std::move(a));
  } else if constexpr (WittRing<R>::route == WittRoute::TorsionFree) {
    if (w.length() < 2) fail(Errc::LengthExceeded, "Frobenius needs length >= 2 in characteristic 0");
    auto g = ghost_map(w);
    g.erase(g.begin());
    return ghost_inverse(p, g);
  } else if constexpr (WittRing<R>::route == WittRoute::Liftable) {
    using L = typename WittRing<R>::Lift;
    std::vector<L> la;
    for (const auto& x : w.components()) la.push_back(WittRing<R>::lift(x, w.length()));
    auto r = witt_frobenius(WittVector<L>(p, la));
    std::vector<R> out;
    for (long k = 0; k < r.length(); ++k) out.push_back(WittRing<R>::reduce(r[k], w[0]));
    return WittVector<R>(p, std::move(out));
  } else {
    fail(Errc::ModelUnsupported, "Frobenius is not available for this coefficient ring");
  }
}

// ---- coefficient rings

/// Z/m for word-sized m.
struct ZMod {
  u64 v = 0;
  u64 m = 1;
  ZMod() = default;
  ZMod(u64 value, u64 modulus) : v(value % modulus), m(modulus) {}
  static ZMod from_integer(const Integer& x, u64 modulus);
  friend ZMod operator+(ZMod a, ZMod b) { return ZMod((a.v + b.v) % a.m, a.m); }
  friend ZMod operator-(ZMod a, ZMod b) { return ZMod((a.v + a.m - b.v) % a.m, a.m); }
  friend ZMod operator*(ZMod a, ZMod b) { return ZMod(mulm(a.v, b.v, a.m), a.m); }
  ZMod operator-() const { return ZMod((m - v) % m, m); }
  friend bool operator==(ZMod a, ZMod b) { return a.v == b.v && a.m == b.m; }
};
std::ostream& operator<<(std::ostream& os, const ZMod& x);

template <>
struct WittRing<Integer> {
  static constexpr WittRoute route = WittRoute::TorsionFree;
  static constexpr bool char_p = false;
  static Integer zero(const Integer&) { return 0; }
  static Integer from_integer(const Integer&, const Integer& n) { return n; }
  static Integer div_p_power(const Integer& x, long p, long k) {
    const Integer& d = ppow(p, k);
    if (!mpz_divisible_p(x.get_mpz_t(), d.get_mpz_t()))
      fail(Errc::NonDivisible, "ghost component not divisible by p^" + std::to_string(k));
    Integer q;
    mpz_divexact(q.get_mpz_t(), x.get_mpz_t(), d.get_mpz_t());
    return q;
  }
};

template <>
struct WittRing<Rational> {
  static constexpr WittRoute route = WittRoute::TorsionFree;
  static constexpr bool char_p = false;
  static Rational zero(const Rational&) { return 0; }
  static Rational from_integer(const Rational&, const Integer& n) { return Rational(n); }
  static Rational div_p_power(const Rational& x, long p, long k) { return x / Rational(ppow(p, k)); }
};

template <>
struct WittRing<UnramifiedElement> {
  static constexpr WittRoute route = WittRoute::TorsionFree;
  static constexpr bool char_p = false;
  static UnramifiedElement zero(const UnramifiedElement& like) {
    return UnramifiedElement::zero(like.field(), like.abs_precision());
  }
  static UnramifiedElement from_integer(const UnramifiedElement& like, const Integer& n) {
    return UnramifiedElement::exact(like.field(), Rational(n), like.field()->cap());
  }
  static UnramifiedElement div_p_power(const UnramifiedElement& x, long p, long k) {
    return x.scale(PadicNumber::exact(p, ppow_q(p, -k), x.field()->cap()));
  }
};

template <>
struct WittRing<ZMod> {
  static constexpr WittRoute route = WittRoute::Liftable;
  static constexpr bool char_p = false;
  using Lift = Integer;
  static ZMod zero(const ZMod& like) { return ZMod(0, like.m); }
  static ZMod from_integer(const ZMod& like, const Integer& n) { return ZMod::from_integer(n, like.m); }
  static Integer lift(const ZMod& x, long) { return Integer(static_cast<unsigned long>(x.v)); }
  static ZMod reduce(const Integer& x, const ZMod& like) { return ZMod::from_integer(x, like.m); }
};

/// F_q via its universal-polynomial route.
template <>
struct WittRing<FqElement> {
  static constexpr WittRoute route = WittRoute::Universal;
  static constexpr bool char_p = true;
  static FqElement zero(const FqElement& like) { return FqElement::zero(like.field); }
  static FqElement from_integer(const FqElement& like, const Integer& n) {
    return FqElement::from_int(like.field, mpz_fdiv_ui(n.get_mpz_t(), static_cast<unsigned long>(like.field->prime())));
  }
};

/// Z/m evaluated through the universal polynomials rather than a lift; used to
/// cross-check the two routes.
struct ZModU {
  ZMod x;
  friend ZModU operator+(const ZModU& a, const ZModU& b) { return {a.x + b.x}; }
  friend ZModU operator-(const ZModU& a, const ZModU& b) { return {a.x - b.x}; }
  friend ZModU operator*(const ZModU& a, const ZModU& b) { return {a.x * b.x}; }
  friend bool operator==(const ZModU& a, const ZModU& b) { return a.x == b.x; }
};

template <>
struct WittRing<ZModU> {
  static constexpr WittRoute route = WittRoute::Universal;
  static constexpr bool char_p = false;
  static ZModU zero(const ZModU& like) { return {ZMod(0, like.x.m)}; }
  static ZModU from_integer(const ZModU& like, const Integer& n) { return {ZMod::from_integer(n, like.x.m)}; }
};

}  // namespace phodge
