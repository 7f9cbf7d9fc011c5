#include "phodge/qpoly.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "phodge/errors.hpp"
#include "phodge/fp_poly.hpp"

namespace phodge::qpoly {

void trim(QPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

long degree(const QPoly& a) { return static_cast<long>(a.size()) - 1; }

QPoly add(const QPoly& a, const QPoly& b) {
  QPoly r(std::max(a.size(), b.size()));
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (i < a.size()) r[i] += a[i];
    if (i < b.size()) r[i] += b[i];
  }
  trim(r);
  return r;
}

QPoly sub(const QPoly& a, const QPoly& b) {
  QPoly r(std::max(a.size(), b.size()));
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (i < a.size()) r[i] += a[i];
    if (i < b.size()) r[i] -= b[i];
  }
  trim(r);
  return r;
}

QPoly mul(const QPoly& a, const QPoly& b) {
  if (a.empty() || b.empty()) return {};
  QPoly r(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  }
  trim(r);
  return r;
}

QPoly scale(const QPoly& a, const Rational& c) {
  if (c == 0) return {};
  QPoly r(a);
  for (auto& x : r) x *= c;
  return r;
}

void divmod(const QPoly& a, const QPoly& b, QPoly& q, QPoly& r) {
  if (b.empty()) fail(Errc::DivisionByZero, "polynomial division by zero");
  r = a;
  trim(r);
  q.assign(r.size() >= b.size() ? r.size() - b.size() + 1 : 0, Rational(0));
  const Rational lead = b.back();
  while (degree(r) >= degree(b)) {
    long shift = degree(r) - degree(b);
    Rational c = r.back() / lead;
    q[shift] = c;
    for (std::size_t j = 0; j < b.size(); ++j) r[shift + j] -= c * b[j];
    trim(r);
  }
  trim(q);
}

QPoly rem(const QPoly& a, const QPoly& b) {
  QPoly q, r;
  divmod(a, b, q, r);
  return r;
}

QPoly quo(const QPoly& a, const QPoly& b) {
  QPoly q, r;
  divmod(a, b, q, r);
  return q;
}

QPoly monic(const QPoly& a) {
  if (a.empty()) return a;
  return scale(a, 1 / a.back());
}

QPoly gcd(QPoly a, QPoly b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    QPoly r = rem(a, b);
    a = std::move(b);
    b = std::move(r);
  }
  return monic(a);
}

QPoly xgcd(const QPoly& a, const QPoly& b, QPoly& s, QPoly& t) {
  QPoly r0 = a, r1 = b, s0 = {Rational(1)}, s1, t0, t1 = {Rational(1)};
  trim(r0);
  trim(r1);
  while (!r1.empty()) {
    QPoly q, r;
    divmod(r0, r1, q, r);
    QPoly s2 = sub(s0, mul(q, s1)), t2 = sub(t0, mul(q, t1));
    r0 = std::move(r1);
    r1 = std::move(r);
    s0 = std::move(s1);
    s1 = std::move(s2);
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  if (r0.empty()) {
    s.clear();
    t.clear();
    return r0;
  }
  Rational inv = 1 / r0.back();
  s = scale(s0, inv);
  t = scale(t0, inv);
  return scale(r0, inv);
}

QPoly derivative(const QPoly& a) {
  QPoly r;
  for (std::size_t i = 1; i < a.size(); ++i) r.push_back(a[i] * static_cast<long>(i));
  trim(r);
  return r;
}

Rational eval(const QPoly& a, const Rational& x) {
  Rational r = 0;
  for (std::size_t i = a.size(); i-- > 0;) r = r * x + a[i];
  return r;
}

bool is_squarefree(const QPoly& a) { return degree(gcd(a, derivative(a))) == 0; }

std::string to_string(const QPoly& a, const char* var) {
  if (a.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = a.size(); i-- > 0;) {
    if (a[i] == 0) continue;
    Rational c = a[i];
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << "-";
    Rational ac = abs(c);
    if (i == 0 || ac != 1) os << phodge::to_string(ac);
    if (i > 0) os << var;
    if (i > 1) os << "^" << i;
    first = false;
  }
  return os.str();
}

namespace {

using ZPoly = std::vector<Integer>;

void ztrim(ZPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

Integer sym_mod(const Integer& x, const Integer& M) {
  Integer r = mod_floor(x, M);
  if (2 * r > M) r -= M;
  return r;
}

ZPoly zreduce(ZPoly a, const Integer& M) {
  for (auto& x : a) x = mod_floor(x, M);
  ztrim(a);
  return a;
}

ZPoly zmul(const ZPoly& a, const ZPoly& b, const Integer& M) {
  if (a.empty() || b.empty()) return {};
  ZPoly r(a.size() + b.size() - 1, Integer(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return zreduce(std::move(r), M);
}

ZPoly zsub(const ZPoly& a, const ZPoly& b, const Integer& M) {
  ZPoly r(std::max(a.size(), b.size()), Integer(0));
  for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
  return zreduce(std::move(r), M);
}

FpPoly to_fp(const ZPoly& a, u64 l) {
  FpPoly r(a.size());
  Integer L(static_cast<unsigned long>(l));
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = mod_floor(a[i], L).get_ui();
  fp::trim(r);
  return r;
}

ZPoly from_fp(const FpPoly& a) {
  ZPoly r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = Integer(static_cast<unsigned long>(a[i]));
  return r;
}

// Primitive integer polynomial proportional to a, with positive leading coefficient.
ZPoly primitive(const QPoly& a) {
  Integer den = 1;
  for (auto& c : a) den = lcm(den, Integer(c.get_den()));
  ZPoly z(a.size());
  Integer g = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    z[i] = Integer(a[i] * den);
    g = gcd(g, z[i]);
  }
  if (a.back() < 0) g = -g;
  for (auto& c : z) c /= g;
  return z;
}

QPoly to_q(const ZPoly& a) {
  QPoly r(a.begin(), a.end());
  trim(r);
  return r;
}

// Lift a ≡ g·h mod l (g monic, a monic mod l^k) to mod l^k, keeping g monic.
ZPoly hensel_lift(const ZPoly& a, const FpPoly& g0, const FpPoly& h0, u64 l, long k) {
  FpPoly s, t;
  fp::xgcd(g0, h0, l, s, t);
  Integer L(static_cast<unsigned long>(l)), M = L;
  ZPoly g = from_fp(g0), h = from_fp(h0);
  for (long j = 1; j < k; ++j) {
    Integer Mnext = M * L;
    ZPoly e = zsub(zreduce(a, Mnext), zmul(g, h, Mnext), Mnext);
    for (auto& c : e) c /= M;
    FpPoly ef = to_fp(e, l);
    FpPoly dg = fp::rem(fp::mul(t, ef, l), g0, l);
    FpPoly dh, r;
    fp::divmod(fp::sub(ef, fp::mul(h0, dg, l), l), g0, l, dh, r);
    ZPoly zdg = from_fp(dg), zdh = from_fp(dh);
    g.resize(std::max(g.size(), zdg.size()), Integer(0));
    h.resize(std::max(h.size(), zdh.size()), Integer(0));
    for (std::size_t i = 0; i < zdg.size(); ++i) g[i] += M * zdg[i];
    for (std::size_t i = 0; i < zdh.size(); ++i) h[i] += M * zdh[i];
    g = zreduce(g, Mnext);
    h = zreduce(h, Mnext);
    M = Mnext;
  }
  return g;
}

// Irreducible factors over Q of a squarefree polynomial, by Zassenhaus.
std::vector<QPoly> zassenhaus(const QPoly& a) {
  if (degree(a) <= 1) return {monic(a)};
  ZPoly F = primitive(a);
  const long n = static_cast<long>(F.size()) - 1;
  const Integer lc = F.back();
  u64 l = 2;
  for (;; ++l) {
    if (!is_prime(static_cast<long>(l))) continue;
    if (lc % Integer(static_cast<unsigned long>(l)) == 0) continue;
    FpPoly f = to_fp(F, l);
    if (fp::degree(fp::gcd(f, fp::derivative(f, l), l)) == 0) break;
  }
  std::mt19937_64 rng(l * 7919 + static_cast<u64>(n));
  FpPoly fm = fp::monic(to_fp(F, l), l);
  std::vector<FpPoly> modf = fp::factor(fm, l, rng);
  if (modf.size() == 1) return {monic(a)};

  Integer norm1 = 0;
  for (auto& c : F) norm1 += abs(c);
  Integer bound = 2 * abs(lc) * norm1;
  bound <<= n;
  Integer L(static_cast<unsigned long>(l)), M = L;
  long k = 1;
  while (M <= bound) {
    M *= L;
    ++k;
  }
  ZPoly Fmonic(F.size());
  Integer lcinv = mod_inverse(lc, M);
  for (std::size_t i = 0; i < F.size(); ++i) Fmonic[i] = mod_floor(F[i] * lcinv, M);
  std::vector<ZPoly> lifted;
  for (std::size_t i = 0; i < modf.size(); ++i) {
    FpPoly h = {1};
    for (std::size_t j = 0; j < modf.size(); ++j)
      if (j != i) h = fp::mul(h, modf[j], l);
    lifted.push_back(hensel_lift(Fmonic, modf[i], h, l, k));
  }

  std::vector<QPoly> out;
  QPoly rest = to_q(F);
  std::vector<std::size_t> live(lifted.size());
  for (std::size_t i = 0; i < live.size(); ++i) live[i] = i;
  for (std::size_t s = 1; 2 * s <= live.size();) {
    bool found = false;
    std::vector<std::size_t> idx(s);
    for (std::size_t i = 0; i < s; ++i) idx[i] = i;
    while (true) {
      Integer restlc = primitive(rest).back();
      ZPoly G = {restlc};
      for (auto i : idx) G = zmul(G, lifted[live[i]], M);
      for (auto& c : G) c = sym_mod(c, M);
      ztrim(G);
      QPoly Gq = to_q(G);
      QPoly q, r;
      if (degree(Gq) > 0) {
        Gq = monic(Gq);
        divmod(rest, Gq, q, r);
      }
      if (degree(Gq) > 0 && r.empty()) {
        out.push_back(Gq);
        rest = q;
        std::vector<std::size_t> keep;
        for (std::size_t i = 0; i < live.size(); ++i)
          if (std::find(idx.begin(), idx.end(), i) == idx.end()) keep.push_back(live[i]);
        live = keep;
        found = true;
        break;
      }
      // next combination
      long i = static_cast<long>(s) - 1;
      while (i >= 0 && idx[i] == live.size() - s + i) --i;
      if (i < 0) break;
      ++idx[i];
      for (std::size_t j = i + 1; j < s; ++j) idx[j] = idx[j - 1] + 1;
    }
    if (!found) ++s;
  }
  if (degree(rest) > 0) out.push_back(monic(rest));
  return out;
}

}  // namespace

std::vector<Factor> factor(const QPoly& a0) {
  QPoly a = monic(a0);
  std::vector<Factor> out;
  if (degree(a) <= 0) return out;
  QPoly c = gcd(a, derivative(a));
  QPoly w = quo(a, c);
  long i = 1;
  while (degree(w) > 0) {
    QPoly y = gcd(w, c);
    QPoly z = quo(w, y);
    if (degree(z) > 0)
      for (auto& g : zassenhaus(z)) out.push_back({g, i});
    ++i;
    w = y;
    c = quo(c, y);
  }
  std::sort(out.begin(), out.end(), [](const Factor& x, const Factor& y) {
    if (x.poly.size() != y.poly.size()) return x.poly.size() < y.poly.size();
    for (std::size_t i = 0; i < x.poly.size(); ++i)
      if (x.poly[i] != y.poly[i]) return x.poly[i] < y.poly[i];
    return x.mult < y.mult;
  });
  return out;
}

std::vector<std::optional<Rational>> root_valuations(const std::vector<std::optional<Rational>>& v) {
  const long n = static_cast<long>(v.size()) - 1;
  if (n < 0 || !v.back()) fail(Errc::InvalidArgument, "Newton polygon needs a nonzero leading coefficient");
  long start = 0;
  while (!v[start]) ++start;
  std::vector<std::optional<Rational>> out;
  long i = start;
  while (i < n) {
    // steepest descent: smallest slope from i, farthest point on ties
    long best = -1;
    Rational bs;
    for (long j = i + 1; j <= n; ++j) {
      if (!v[j]) continue;
      Rational s = (*v[j] - *v[i]) / Rational(j - i);
      if (best < 0 || s <= bs) {
        best = j;
        bs = s;
      }
    }
    for (long k = i; k < best; ++k) out.emplace_back(Rational(-bs));
    i = best;
  }
  std::sort(out.begin(), out.end(), [](auto& x, auto& y) { return *x < *y; });
  for (long k = 0; k < start; ++k) out.emplace_back(std::nullopt);
  return out;
}

bool is_qp_square(const Rational& x, long p) {
  if (x == 0) return true;
  long v = *vp(x, p);
  if (v % 2) return false;
  Rational u = x / ppow_q(p, v);
  if (p == 2) return rational_mod(u, 2, 3) == 1;
  Integer r = rational_mod(u, p, 1);
  Integer P(p);
  Integer e = (P - 1) / 2;
  Integer out;
  mpz_powm(out.get_mpz_t(), r.get_mpz_t(), e.get_mpz_t(), P.get_mpz_t());
  return out == 1;
}

std::optional<Rational> rational_sqrt(const Rational& x) {
  if (x < 0) return std::nullopt;
  Integer n = x.get_num(), d = x.get_den();
  Integer rn = sqrt(n), rd = sqrt(d);
  if (rn * rn != n || rd * rd != d) return std::nullopt;
  return Rational(rn, rd);
}

std::optional<IrreducibilityCertificate> qp_irreducible(const QPoly& g0, long p) {
  QPoly g = monic(g0);
  const long n = degree(g);
  if (n <= 0) fail(Errc::InvalidArgument, "constant polynomial");
  if (n == 1) return IrreducibilityCertificate{true, "linear"};
  if (n == 2) {
    Rational disc = g[1] * g[1] - 4 * g[0];
    if (is_qp_square(disc, p))
      return IrreducibilityCertificate{false, "discriminant " + phodge::to_string(disc) + " is a square in Q_p"};
    return IrreducibilityCertificate{true, "discriminant " + phodge::to_string(disc) + " is not a square in Q_p"};
  }
  std::vector<std::optional<Rational>> vals;
  for (auto& c : g) {
    if (c == 0) vals.emplace_back(std::nullopt);
    else vals.emplace_back(Rational(*vp(c, p)));
  }
  auto roots = root_valuations(vals);
  if (!roots.back() || *roots.front() != *roots.back())
    return IrreducibilityCertificate{false, "Newton polygon has more than one slope"};
  Rational s = *roots.front();
  if (Integer(s.get_den()) == n)
    return IrreducibilityCertificate{true, "single Newton slope " + phodge::to_string(s) + " with denominator the degree"};
  if (s.get_den() != 1) return std::nullopt;
  // g(p^s X)/p^(n s) has unit roots; read its reduction.
  long sv = Integer(s.get_num()).get_si();
  FpPoly red(n + 1);
  for (long i = 0; i <= n; ++i) {
    Rational c = g[i] * ppow_q(p, sv * (i - n));
    red[i] = rational_mod(c, p, 1).get_ui();
  }
  fp::trim(red);
  const u64 P = static_cast<u64>(p);
  if (fp::degree(fp::gcd(red, fp::derivative(red, P), P)) != 0) return std::nullopt;
  if (fp::is_irreducible(red, P))
    return IrreducibilityCertificate{true, "reduction of the unit-root rescaling is irreducible mod p"};
  return IrreducibilityCertificate{false, "reduction of the unit-root rescaling is squarefree and reducible mod p"};
}

}  // namespace phodge::qpoly
