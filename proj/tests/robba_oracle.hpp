#pragma once

// Test-side oracles for Robba series and connections: Laurent polynomials and
// dense matrices over Q, the binomial Frobenius pullback, a rational logarithm.

#include <map>
#include <random>
#include <vector>

#include "phodge/robba.hpp"

namespace rbtest {

using namespace phodge;

// Test-side Laurent polynomials over Q.
using LP = std::map<long, Rational>;

inline LP lp_add(const LP& a, const LP& b) {
  LP r = a;
  for (auto& [n, c] : b) r[n] += c;
  return r;
}

inline LP lp_mul(const LP& a, const LP& b) {
  LP r;
  for (auto& [n, c] : a)
    for (auto& [m, d] : b) r[n + m] += c * d;
  return r;
}

inline Rational at(const LP& a, long n) {
  auto it = a.find(n);
  return it == a.end() ? Rational(0) : it->second;
}

inline LP random_lp(std::mt19937_64& rng, long lo, long hi, int range = 9) {
  std::uniform_int_distribution<int> d(-range, range);
  LP r;
  for (long n = lo; n <= hi; ++n) r[n] = d(rng);
  return r;
}

inline RobbaSeries series(const L0Ptr& F, const LP& a) {
  if (a.empty()) return RobbaSeries::zero(F);
  std::vector<Rational> c;
  for (long n = a.begin()->first; n <= a.rbegin()->first; ++n) c.push_back(at(a, n));
  return RobbaSeries::laurent(F, a.begin()->first, c);
}

// a truncated to [lo, hi] as a series known only there
inline RobbaSeries window(const L0Ptr& F, const LP& a, long lo, long hi, bool lower_exact) {
  std::vector<Coef> c;
  for (long n = lo; n <= hi; ++n) c.push_back(Coef{L0Number::rational(F, at(a, n))});
  return RobbaSeries(F, lo, c, lower_exact, false);
}

inline bool agrees(const RobbaSeries& s, const LP& o) {
  for (long n = s.lo(); n <= s.hi(); ++n)
    if (s.coef(n).value.to_rational() != at(o, n)) return false;
  return true;
}

inline Rational binom(long n, long k) {
  Rational r = 1;
  for (long i = 0; i < k; ++i) r = r * Rational(n - i) / Rational(i + 1);
  return r;
}

// φ(f) for z ∈ {0, 1} by the binomial series, down to exponent L.
inline LP phi_oracle(const LP& f, long p, long z, long L) {
  LP r;
  for (auto& [n, a] : f) {
    if (z == 0) {
      r[p * n] += a;
      continue;
    }
    for (long k = 0; p * (n - k) >= L && (n < 0 || k <= n); ++k) {
      Rational pk = 1;
      for (long i = 0; i < k; ++i) pk *= p;
      r[p * (n - k)] += a * binom(n, k) * pk;
    }
  }
  return r;
}

inline Rational rat(long a, long b) {
  Rational r(a, b);
  r.canonicalize();
  return r;
}

inline L0Number q(const L0Ptr& F, const Rational& x) { return L0Number::rational(F, x); }

inline long vq(const Rational& x, long p) { return x == 0 ? LONG_MAX : *vp(x, p); }

// Dense rational matrices and matrices of polynomials mod t^r (coefficient lists).
using QM = std::vector<std::vector<Rational>>;

inline QM qm_zero(long n) { return QM(n, std::vector<Rational>(n, Rational(0))); }
inline QM qm_id(long n) {
  QM m = qm_zero(n);
  for (long i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}
inline QM qm_mul(const QM& a, const QM& b) {
  long n = static_cast<long>(a.size());
  QM r = qm_zero(n);
  for (long i = 0; i < n; ++i)
    for (long k = 0; k < n; ++k)
      for (long j = 0; j < n; ++j) r[i][j] += a[i][k] * b[k][j];
  return r;
}
inline QM qm_add(const QM& a, const QM& b, const Rational& s = 1) {
  QM r = a;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) r[i][j] += s * b[i][j];
  return r;
}
inline QM qm_inv(QM a) {
  long n = static_cast<long>(a.size());
  QM r = qm_id(n);
  for (long c = 0; c < n; ++c) {
    long piv = c;
    while (a[piv][c] == 0) ++piv;
    std::swap(a[piv], a[c]);
    std::swap(r[piv], r[c]);
    Rational d = a[c][c];
    for (long j = 0; j < n; ++j) {
      a[c][j] /= d;
      r[c][j] /= d;
    }
    for (long i = 0; i < n; ++i) {
      if (i == c || a[i][c] == 0) continue;
      Rational m = a[i][c];
      for (long j = 0; j < n; ++j) {
        a[i][j] -= m * a[c][j];
        r[i][j] -= m * r[c][j];
      }
    }
  }
  return r;
}

inline Rational qm_det(const QM& a) {
  long n = static_cast<long>(a.size());
  if (n == 1) return a[0][0];
  Rational d = 0;
  for (long j = 0; j < n; ++j) {
    QM minor;
    for (long i = 1; i < n; ++i) {
      std::vector<Rational> row;
      for (long k = 0; k < n; ++k)
        if (k != j) row.push_back(a[i][k]);
      minor.push_back(row);
    }
    d += (j % 2 ? Rational(-1) : Rational(1)) * a[0][j] * qm_det(minor);
  }
  return d;
}

using PM = std::vector<QM>;  // coefficient of t^k

inline PM pm_mul(const PM& a, const PM& b, long r) {
  long n = static_cast<long>(a[0].size());
  PM out(r, qm_zero(n));
  for (long i = 0; i < r && i < static_cast<long>(a.size()); ++i)
    for (long j = 0; i + j < r && j < static_cast<long>(b.size()); ++j) out[i + j] = qm_add(out[i + j], qm_mul(a[i], b[j]));
  return out;
}

inline SeriesMatrix to_sm(const L0Ptr& F, const PM& a) {
  long n = static_cast<long>(a[0].size());
  std::vector<L0Matrix> cs;
  for (auto& m : a) {
    L0Matrix c(F, n, n);
    for (long i = 0; i < n; ++i)
      for (long j = 0; j < n; ++j) c(i, j) = q(F, m[i][j]);
    cs.push_back(c);
  }
  return SeriesMatrix::from_coefficients(F, 0, cs);
}

inline Rational log_oracle(const Rational& chi, long terms) {
  Rational x = chi - 1, pw = 1, acc = 0;
  for (long n = 1; n <= terms; ++n) {
    pw *= x;
    acc += (n % 2 ? Rational(1) : Rational(-1)) * pw / n;
  }
  return acc;
}

inline ConnectionModule connection(const L0Ptr& F, const SeriesMatrix& A, Pole pole) {
  return ConnectionModule{F, A.rows(), A, pole, std::nullopt};
}

inline SeriesMatrix random_holomorphic(const L0Ptr& F, long h, long deg, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> d(-5, 5);
  std::vector<L0Matrix> cs;
  for (long k = 0; k <= deg; ++k) {
    L0Matrix c(F, h, h);
    for (long i = 0; i < h; ++i)
      for (long j = 0; j < h; ++j) c(i, j) = q(F, rat(d(rng), 1 + static_cast<long>(rng() % 3)));
    cs.push_back(c);
  }
  return SeriesMatrix::from_coefficients(F, 0, cs);
}

}  // namespace rbtest
