#include "phodge/witt.hpp"

#include <map>
#include <mutex>
#include <random>

namespace phodge {

namespace {

using Poly = ZPolyMulti;

void check_budget(const Poly& a) {
  if (a.size() > WittPolynomialTable::term_budget())
    fail(Errc::LengthExceeded, "universal Witt polynomial exceeds " +
                                   std::to_string(WittPolynomialTable::term_budget()) + " terms");
}

Poly mul(const Poly& a, const Poly& b) {
  Poly r;
  r.reserve(a.size() * b.size() / 2 + 1);
  for (const auto& [ma, ca] : a)
    for (const auto& [mb, cb] : b) {
      Monomial m;
      for (std::size_t i = 0; i < kWittMaxVars; ++i) m[i] = static_cast<std::uint16_t>(ma[i] + mb[i]);
      r[m] += ca * cb;
    }
  for (auto it = r.begin(); it != r.end();) it = it->second == 0 ? r.erase(it) : std::next(it);
  check_budget(r);
  return r;
}

void add_scaled(Poly& a, const Poly& b, const Integer& c) {
  for (const auto& [m, x] : b) {
    auto& slot = a[m];
    slot += c * x;
    if (slot == 0) a.erase(m);
  }
}

Poly power(const Poly& a, long e) {
  Poly r = a;
  for (long i = 1; i < e; ++i) r = mul(r, a);
  return r;
}

// w_k in the variables offset..offset+k
Poly witt_poly(long p, long k, long offset) {
  Poly w;
  for (long i = 0; i <= k; ++i) {
    Monomial m{};
    long e = 1;
    for (long j = i; j < k; ++j) e *= p;
    m[offset + i] = static_cast<std::uint16_t>(e);
    w[m] += ppow(p, i);
  }
  return w;
}

Poly divide(const Poly& a, const Integer& d, long p, long k) {
  Poly r;
  for (const auto& [m, c] : a) {
    if (!mpz_divisible_p(c.get_mpz_t(), d.get_mpz_t()))
      fail(Errc::NonDivisible, "universal Witt polynomial of index " + std::to_string(k) +
                                   " is not integral for p = " + std::to_string(p));
    Integer q;
    mpz_divexact(q.get_mpz_t(), c.get_mpz_t(), d.get_mpz_t());
    r[m] = q;
  }
  return r;
}

}  // namespace

WittPolynomialTable::WittPolynomialTable(long p, long n) : p_(p) {
  if (n > max_length())
    fail(Errc::LengthExceeded, "Witt length " + std::to_string(n) + " exceeds the configured maximum " +
                                   std::to_string(max_length()));
  {
    long top = 1;
    for (long k = 1; k < n; ++k) top *= p;
    if (2 * top > 65535) fail(Errc::LengthExceeded, "Witt polynomial degrees exceed the exponent range");
  }
  // Y variables start at index n.
  std::vector<Poly> Spow, Ppow;  // S_i^(p^(k-i)) for the current k
  for (long k = 0; k < n; ++k) {
    for (auto& s : Spow) s = power(s, p);
    for (auto& q : Ppow) q = power(q, p);
    Poly wx = witt_poly(p, k, 0), wy = witt_poly(p, k, n);
    Poly s = wx;
    add_scaled(s, wy, 1);
    Poly q = mul(wx, wy);
    for (long i = 0; i < k; ++i) {
      add_scaled(s, Spow[i], -ppow(p, i));
      add_scaled(q, Ppow[i], -ppow(p, i));
    }
    S_.push_back(divide(s, ppow(p, k), p, k));
    P_.push_back(divide(q, ppow(p, k), p, k));
    Spow.push_back(S_.back());
    Ppow.push_back(P_.back());
  }
}

std::shared_ptr<const WittPolynomialTable> WittPolynomialTable::get(long p, long n) {
  static std::mutex mu;
  static std::map<long, std::shared_ptr<const WittPolynomialTable>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[p];
  if (!slot || slot->length() < n) {
    auto t = std::make_shared<const WittPolynomialTable>(p, n);
    if (!t->verify()) fail(Errc::NonDivisible, "universal Witt polynomials failed verification");
    slot = t;
  }
  return slot;
}

bool WittPolynomialTable::verify() const {
  // Evaluate at random integer points and compare ghost components.
  const long n = length();
  std::mt19937_64 rng(static_cast<u64>(p_) * 7919 + n);
  for (int trial = 0; trial < 3; ++trial) {
    std::vector<Integer> x(n), y(n);
    for (long i = 0; i < n; ++i) {
      x[i] = static_cast<long>(rng() % 19) - 9;
      y[i] = static_cast<long>(rng() % 19) - 9;
    }
    auto eval = [&](const Poly& poly) {
      Integer acc = 0;
      for (const auto& [m, c] : poly) {
        Integer t = c;
        for (long i = 0; i < n; ++i) {
          Integer e;
          if (m[i]) {
            mpz_pow_ui(e.get_mpz_t(), x[i].get_mpz_t(), m[i]);
            t *= e;
          }
          if (m[n + i]) {
            mpz_pow_ui(e.get_mpz_t(), y[i].get_mpz_t(), m[n + i]);
            t *= e;
          }
        }
        acc += t;
      }
      return acc;
    };
    std::vector<Integer> s, q;
    for (long k = 0; k < n; ++k) {
      s.push_back(eval(S_[k]));
      q.push_back(eval(P_[k]));
    }
    auto gx = ghost_map(WittVector<Integer>(p_, x));
    auto gy = ghost_map(WittVector<Integer>(p_, y));
    auto gs = ghost_map(WittVector<Integer>(p_, s));
    auto gq = ghost_map(WittVector<Integer>(p_, q));
    for (long k = 0; k < n; ++k)
      if (gs[k] != gx[k] + gy[k] || gq[k] != gx[k] * gy[k]) return false;
  }
  return true;
}

ZMod ZMod::from_integer(const Integer& x, u64 modulus) {
  Integer r = mod_floor(x, Integer(static_cast<unsigned long>(modulus)));
  return ZMod(r.get_ui(), modulus);
}

std::ostream& operator<<(std::ostream& os, const ZMod& x) { return os << x.v; }

}  // namespace phodge
