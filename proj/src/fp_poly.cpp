#include "phodge/fp_poly.hpp"

#include <algorithm>

#include "phodge/errors.hpp"

namespace phodge {

u64 powmod(u64 a, u64 e, u64 m) {
  u64 r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulm(r, a, m);
    a = mulm(a, a, m);
    e >>= 1;
  }
  return r;
}

u64 invmod(u64 a, u64 m) {
  a %= m;
  if (a == 0) fail(Errc::DivisionByZero, "zero has no inverse mod " + std::to_string(m));
  return powmod(a, m - 2, m);
}

namespace fp {

void trim(FpPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

long degree(const FpPoly& a) { return static_cast<long>(a.size()) - 1; }

FpPoly add(const FpPoly& a, const FpPoly& b, u64 m) {
  FpPoly r(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < r.size(); ++i) {
    u64 x = i < a.size() ? a[i] : 0, y = i < b.size() ? b[i] : 0;
    r[i] = (x + y) % m;
  }
  trim(r);
  return r;
}

FpPoly sub(const FpPoly& a, const FpPoly& b, u64 m) {
  FpPoly r(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < r.size(); ++i) {
    u64 x = i < a.size() ? a[i] : 0, y = i < b.size() ? b[i] : 0;
    r[i] = (x + m - y) % m;
  }
  trim(r);
  return r;
}

FpPoly mul(const FpPoly& a, const FpPoly& b, u64 m) {
  if (a.empty() || b.empty()) return {};
  FpPoly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i]) continue;
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + mulm(a[i], b[j], m)) % m;
  }
  trim(r);
  return r;
}

FpPoly scale(const FpPoly& a, u64 c, u64 m) {
  FpPoly r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = mulm(a[i], c, m);
  trim(r);
  return r;
}

void divmod(const FpPoly& a, const FpPoly& b, u64 m, FpPoly& q, FpPoly& r) {
  if (b.empty()) fail(Errc::DivisionByZero, "polynomial division by zero");
  r = a;
  trim(r);
  const long db = degree(b);
  if (degree(r) < db) {
    q.clear();
    return;
  }
  q.assign(r.size() - b.size() + 1, 0);
  const u64 inv = invmod(b.back(), m);
  for (long i = degree(r); i >= db; --i) {
    u64 c = mulm(r[i], inv, m);
    q[i - db] = c;
    if (!c) continue;
    for (long j = 0; j <= db; ++j) r[i - db + j] = (r[i - db + j] + m - mulm(c, b[j], m)) % m;
  }
  trim(q);
  trim(r);
}

FpPoly rem(const FpPoly& a, const FpPoly& b, u64 m) {
  FpPoly q, r;
  divmod(a, b, m, q, r);
  return r;
}

FpPoly monic(const FpPoly& a, u64 m) {
  if (a.empty()) return a;
  return scale(a, invmod(a.back(), m), m);
}

FpPoly gcd(FpPoly a, FpPoly b, u64 m) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    FpPoly r = rem(a, b, m);
    a = std::move(b);
    b = std::move(r);
  }
  return monic(a, m);
}

FpPoly xgcd(const FpPoly& a, const FpPoly& b, u64 m, FpPoly& s, FpPoly& t) {
  FpPoly r0 = a, r1 = b, s0 = {1}, s1 = {}, t0 = {}, t1 = {1};
  trim(r0);
  trim(r1);
  while (!r1.empty()) {
    FpPoly q, r;
    divmod(r0, r1, m, q, r);
    FpPoly s2 = sub(s0, mul(q, s1, m), m), t2 = sub(t0, mul(q, t1, m), m);
    r0 = std::move(r1);
    r1 = std::move(r);
    s0 = std::move(s1);
    s1 = std::move(s2);
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  if (r0.empty()) {
    s = {};
    t = {};
    return r0;
  }
  u64 inv = invmod(r0.back(), m);
  s = scale(s0, inv, m);
  t = scale(t0, inv, m);
  return scale(r0, inv, m);
}

FpPoly mulmod(const FpPoly& a, const FpPoly& b, const FpPoly& mod, u64 m) {
  return rem(mul(a, b, m), mod, m);
}

FpPoly powmod(FpPoly a, u64 e, const FpPoly& mod, u64 m) {
  FpPoly r = rem(FpPoly{1 % m}, mod, m);
  a = rem(a, mod, m);
  while (e) {
    if (e & 1) r = mulmod(r, a, mod, m);
    e >>= 1;
    if (e) a = mulmod(a, a, mod, m);
  }
  return r;
}

FpPoly derivative(const FpPoly& a, u64 m) {
  FpPoly r;
  for (std::size_t i = 1; i < a.size(); ++i) r.push_back(mulm(a[i], i % m, m));
  trim(r);
  return r;
}

namespace {

// X^(m^k) mod f.
FpPoly frobenius_power(const FpPoly& f, u64 m, long k) {
  FpPoly x = rem(FpPoly{0, 1}, f, m);
  for (long i = 0; i < k; ++i) x = powmod(x, m, f, m);
  return x;
}

std::vector<long> prime_divisors(long n) {
  std::vector<long> out;
  for (long d = 2; d * d <= n; ++d) {
    if (n % d) continue;
    out.push_back(d);
    while (n % d == 0) n /= d;
  }
  if (n > 1) out.push_back(n);
  return out;
}

// Distinct-degree factorization of a monic squarefree polynomial.
std::vector<std::pair<FpPoly, long>> ddf(FpPoly f, u64 m) {
  std::vector<std::pair<FpPoly, long>> out;
  FpPoly h = rem(FpPoly{0, 1}, f, m);
  for (long d = 1; 2 * d <= degree(f); ++d) {
    h = powmod(h, m, f, m);
    FpPoly g = gcd(f, sub(h, FpPoly{0, 1}, m), m);
    if (degree(g) > 0) {
      out.push_back({g, d});
      FpPoly q, r;
      divmod(f, g, m, q, r);
      f = q;
      h = rem(h, f, m);
    }
  }
  if (degree(f) > 0) out.push_back({f, degree(f)});
  return out;
}

void equal_degree(const FpPoly& f, long d, u64 m, std::mt19937_64& rng, std::vector<FpPoly>& out) {
  if (degree(f) == d) {
    out.push_back(monic(f, m));
    return;
  }
  const long n = degree(f);
  while (true) {
    FpPoly a(n);
    for (auto& c : a) c = rng() % m;
    trim(a);
    if (degree(a) < 1) continue;
    FpPoly g;
    if (m == 2) {
      // trace map a + a^2 + ... + a^(2^(d-1))
      FpPoly t = a, s = a;
      for (long i = 1; i < d; ++i) {
        t = mulmod(t, t, f, m);
        s = add(s, t, m);
      }
      g = gcd(f, s, m);
    } else {
      // a^((m^d-1)/2), with (m^d-1)/2 = (m-1)/2 * (1 + m + ... + m^(d-1))
      FpPoly frob = powmod(a, (m - 1) / 2, f, m);
      FpPoly acc = frob;
      for (long i = 1; i < d; ++i) {
        frob = powmod(frob, m, f, m);
        acc = mulmod(acc, frob, f, m);
      }
      g = gcd(f, sub(acc, FpPoly{1}, m), m);
    }
    if (degree(g) > 0 && degree(g) < n) {
      FpPoly q, r;
      divmod(f, g, m, q, r);
      equal_degree(g, d, m, rng, out);
      equal_degree(q, d, m, rng, out);
      return;
    }
  }
}

}  // namespace

bool is_irreducible(const FpPoly& f, u64 m) {
  const long n = degree(f);
  if (n < 1) return false;
  if (n == 1) return true;
  FpPoly g = monic(f, m);
  FpPoly xq = frobenius_power(g, m, n);
  if (!sub(xq, FpPoly{0, 1}, m).empty()) return false;
  for (long r : prime_divisors(n)) {
    FpPoly h = sub(frobenius_power(g, m, n / r), FpPoly{0, 1}, m);
    if (degree(gcd(g, h, m)) > 0) return false;
  }
  return true;
}

std::vector<FpPoly> factor(const FpPoly& f0, u64 m, std::mt19937_64& rng) {
  std::vector<FpPoly> out;
  FpPoly f = monic(f0, m);
  if (degree(f) < 1) return out;
  FpPoly df = derivative(f, m);
  if (df.empty()) {
    // f = g(X^m)
    FpPoly g;
    for (std::size_t i = 0; i < f.size(); i += m) g.push_back(f[i]);
    for (auto& h : factor(g, m, rng))
      for (u64 k = 0; k < m; ++k) out.push_back(h);
    return out;
  }
  FpPoly c = gcd(f, df, m);
  FpPoly sqf, r;
  divmod(f, c, m, sqf, r);
  std::vector<FpPoly> distinct;
  for (auto& [g, d] : ddf(sqf, m)) equal_degree(g, d, m, rng, distinct);
  FpPoly rest = f;
  for (auto& h : distinct) {
    while (true) {
      FpPoly q, rr;
      divmod(rest, h, m, q, rr);
      if (!rr.empty()) break;
      out.push_back(h);
      rest = q;
    }
  }
  if (degree(rest) > 0)
    for (auto& h : factor(rest, m, rng)) out.push_back(h);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace fp

}  // namespace phodge
