#include "phodge/unramified.hpp"

#include <map>
#include <mutex>

#include "phodge/errors.hpp"

namespace phodge {

namespace {

using ZPoly = std::vector<Integer>;

// Product in Z/m[X]/(P), P monic of degree f given with Integer coefficients.
ZPoly zmulmod(const ZPoly& a, const ZPoly& b, const ZPoly& P, const Integer& m) {
  const std::size_t f = P.size() - 1;
  ZPoly r(2 * f, 0);
  for (std::size_t i = 0; i < f; ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < f; ++j) r[i + j] += a[i] * b[j];
  }
  for (std::size_t k = 2 * f - 1; k >= f; --k) {
    Integer c = r[k] % m;
    if (c != 0)
      for (std::size_t j = 0; j < f; ++j) r[k - f + j] -= c * P[j];
    r[k] = 0;
    if (k == f) break;
  }
  r.resize(f);
  for (auto& c : r) c = mod_floor(c, m);
  return r;
}

ZPoly zpow(ZPoly a, Integer e, const ZPoly& P, const Integer& m) {
  const std::size_t f = P.size() - 1;
  ZPoly r(f, 0);
  r[0] = 1 % m;
  while (e > 0) {
    if (mpz_odd_p(e.get_mpz_t())) r = zmulmod(r, a, P, m);
    e >>= 1;
    if (e > 0) a = zmulmod(a, a, P, m);
  }
  return r;
}

// Inverse of a square matrix over Z/m, m = p^k, invertible mod p.
std::vector<std::vector<Integer>> zinverse(std::vector<std::vector<Integer>> A, const Integer& m) {
  const std::size_t n = A.size();
  std::vector<std::vector<Integer>> I(n, std::vector<Integer>(n, 0));
  for (std::size_t i = 0; i < n; ++i) I[i][i] = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    Integer inv;
    for (; piv < n; ++piv) {
      Integer g;
      mpz_gcd(g.get_mpz_t(), A[piv][col].get_mpz_t(), m.get_mpz_t());
      if (g == 1) break;
    }
    if (piv == n) fail(Errc::BasisSingular, "matrix not invertible mod p");
    std::swap(A[piv], A[col]);
    std::swap(I[piv], I[col]);
    inv = mod_inverse(A[col][col], m);
    for (std::size_t j = 0; j < n; ++j) {
      A[col][j] = mod_floor(A[col][j] * inv, m);
      I[col][j] = mod_floor(I[col][j] * inv, m);
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || A[r][col] == 0) continue;
      Integer c = A[r][col];
      for (std::size_t j = 0; j < n; ++j) {
        A[r][j] = mod_floor(A[r][j] - c * A[col][j], m);
        I[r][j] = mod_floor(I[r][j] - c * I[col][j], m);
      }
    }
  }
  return I;
}

FpPoly pad(FpPoly a, std::size_t n) {
  a.resize(n, 0);
  return a;
}

bool invertible_mod_p(std::vector<std::vector<u64>> A, u64 p) {
  const std::size_t n = A.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && A[piv][col] == 0) ++piv;
    if (piv == n) return false;
    std::swap(A[piv], A[col]);
    u64 inv = invmod(A[col][col], p);
    for (std::size_t r = col + 1; r < n; ++r) {
      u64 c = mulm(A[r][col], inv, p);
      for (std::size_t j = 0; j < n; ++j) A[r][j] = (A[r][j] + p - mulm(c, A[col][j], p)) % p;
    }
  }
  return true;
}

std::vector<std::vector<u64>> inverse_mod_p(const std::vector<std::vector<u64>>& A, u64 p) {
  std::vector<std::vector<Integer>> Z(A.size());
  for (std::size_t i = 0; i < A.size(); ++i)
    for (u64 x : A[i]) Z[i].push_back(Integer(static_cast<unsigned long>(x)));
  auto inv = zinverse(Z, Integer(static_cast<unsigned long>(p)));
  std::vector<std::vector<u64>> out(A.size());
  for (std::size_t i = 0; i < A.size(); ++i)
    for (auto& x : inv[i]) out[i].push_back(x.get_ui());
  return out;
}

}  // namespace

UnramifiedField::UnramifiedField(long p, long f, long cap) : p_(p), f_(f), cap_(cap) {
  if (!is_prime(p)) fail(Errc::InvalidArgument, "p = " + std::to_string(p) + " is not prime");
  if (f < 1) fail(Errc::InvalidArgument, "residue degree must be >= 1");
  const u64 up = static_cast<u64>(p);
  const std::size_t n = static_cast<std::size_t>(f);
  // First irreducible monic polynomial of degree f in lexicographic order.
  if (f == 1) {
    modulus_ = {0, 1};
  } else {
    std::vector<u64> digits(n, 0);
    while (true) {
      FpPoly cand(digits.begin(), digits.end());
      cand.push_back(1);
      if (cand[0] != 0 && fp::is_irreducible(cand, up)) {
        modulus_ = cand;
        break;
      }
      std::size_t i = 0;
      while (i < n && ++digits[i] == up) digits[i++] = 0;
      if (i == n) fail(Errc::InvalidArgument, "no irreducible polynomial found");
    }
  }
  // Normal element: first element whose conjugates are independent.
  std::vector<std::vector<u64>> M;
  if (f == 1) {
    normal_ = {1};
    M = {{1}};
  } else {
    std::vector<u64> digits(n, 0);
    while (true) {
      std::size_t i = 0;
      while (i < n && ++digits[i] == up) digits[i++] = 0;
      if (i == n) fail(Errc::InvalidArgument, "no normal element found");
      FpPoly a(digits.begin(), digits.end());
      fp::trim(a);
      std::vector<std::vector<u64>> cols;
      FpPoly c = a;
      for (std::size_t k = 0; k < n; ++k) {
        cols.push_back(pad(c, n));
        c = res_pow(c, up);
      }
      std::vector<std::vector<u64>> rows(n, std::vector<u64>(n));
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t k = 0; k < n; ++k) rows[r][k] = cols[k][r];
      if (invertible_mod_p(rows, up)) {
        normal_ = a;
        M = rows;
        break;
      }
    }
  }
  normal_inv_ = inverse_mod_p(M, up);

  const Integer& m = ppow(p, cap);
  if (f == 1) {
    tinv_ = {{Integer(1)}};
    c_ = {Integer(1)};
    one_ = 1;
    return;
  }
  ZPoly P(n + 1);
  for (std::size_t i = 0; i <= n; ++i) P[i] = Integer(static_cast<unsigned long>(modulus_[i]));
  ZPoly y(n, 0);
  for (std::size_t i = 0; i < normal_.size(); ++i) y[i] = Integer(static_cast<unsigned long>(normal_[i]));
  Integer q;
  mpz_ui_pow_ui(q.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(f));
  for (long it = 0; it < cap; ++it) y = zpow(y, q, P, m);
  std::vector<ZPoly> basis;
  for (std::size_t k = 0; k < n; ++k) {
    basis.push_back(y);
    y = zpow(y, Integer(p), P, m);
  }
  std::vector<std::vector<Integer>> T(n, std::vector<Integer>(n));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t k = 0; k < n; ++k) T[r][k] = basis[k][r];
  tinv_ = zinverse(T, m);
  c_.assign(n * n * n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      auto co = to_coords(zmulmod(basis[i], basis[j], P, m), cap);
      for (std::size_t k = 0; k < n; ++k) c_[(i * n + j) * n + k] = co[k];
    }
  ZPoly onep(n, 0);
  onep[0] = 1;
  one_ = to_coords(onep, cap)[0];
}

std::vector<Integer> UnramifiedField::to_coords(const std::vector<Integer>& power, long prec) const {
  const Integer& m = ppow(p_, prec);
  std::vector<Integer> out(f_, 0);
  for (long r = 0; r < f_; ++r) {
    Integer s = 0;
    for (long k = 0; k < f_; ++k) s += tinv_[r][k] * power[k];
    out[r] = mod_floor(s, m);
  }
  return out;
}

FieldPtr UnramifiedField::get(long p, long f, long cap) {
  static std::mutex mu;
  static std::map<std::pair<long, long>, FieldPtr> registry;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = registry[{p, f}];
  if (!slot || slot->cap_ < cap) slot = std::make_shared<const UnramifiedField>(p, f, std::max(cap, 64L));
  return slot;
}

FpPoly UnramifiedField::res_inv(const FpPoly& a) const {
  if (a.empty()) fail(Errc::DivisionByZero, "zero in F_q");
  // a^(q-2)
  FpPoly r = a;
  FpPoly acc = {1};
  // q - 2 = (p-1)(1 + p + ... + p^(f-1)) - 1: use a^(q-1) = 1 so a^-1 = a^(q-2).
  Integer q;
  mpz_ui_pow_ui(q.get_mpz_t(), static_cast<unsigned long>(p_), static_cast<unsigned long>(f_));
  Integer e = q - 2;
  while (e > 0) {
    if (mpz_odd_p(e.get_mpz_t())) acc = res_mul(acc, r);
    e >>= 1;
    if (e > 0) r = res_mul(r, r);
  }
  return acc;
}

FpPoly UnramifiedField::res_frob_inv(const FpPoly& a) const {
  FpPoly r = a;
  for (long i = 1; i < f_; ++i) r = res_pow(r, static_cast<u64>(p_));
  return r;
}

std::vector<u64> UnramifiedField::res_to_normal(const FpPoly& a) const {
  std::vector<u64> out(f_, 0);
  for (long r = 0; r < f_; ++r) {
    u64 s = 0;
    for (long k = 0; k < f_ && k < static_cast<long>(a.size()); ++k)
      s = (s + mulm(normal_inv_[r][k], a[k], p_)) % p_;
    out[r] = s;
  }
  return out;
}

FpPoly UnramifiedField::res_from_normal(const std::vector<u64>& c) const {
  FpPoly out, conj = normal_;
  for (long k = 0; k < f_; ++k) {
    out = res_add(out, fp::scale(conj, c[k] % p_, p_));
    conj = res_pow(conj, static_cast<u64>(p_));
  }
  return out;
}

std::vector<Integer> UnramifiedField::teichmuller_coords(const FpPoly& a, long prec) const {
  if (prec > cap_) return UnramifiedField::get(p_, f_, prec)->teichmuller_coords(a, prec);
  const Integer& m = ppow(p_, prec);
  if (f_ == 1) {
    Integer y = a.empty() ? Integer(0) : Integer(static_cast<unsigned long>(a[0]));
    for (long it = 1; it < prec; ++it) mpz_powm_ui(y.get_mpz_t(), y.get_mpz_t(), p_, m.get_mpz_t());
    return {y};
  }
  ZPoly P(f_ + 1);
  for (long i = 0; i <= f_; ++i) P[i] = Integer(static_cast<unsigned long>(modulus_[i]));
  ZPoly y(f_, 0);
  for (std::size_t i = 0; i < a.size(); ++i) y[i] = Integer(static_cast<unsigned long>(a[i]));
  Integer q;
  mpz_ui_pow_ui(q.get_mpz_t(), static_cast<unsigned long>(p_), static_cast<unsigned long>(f_));
  for (long it = 1; it < prec; ++it) y = zpow(y, q, P, m);
  return to_coords(y, prec);
}

FqElement FqElement::from_int(FieldPtr K, long a) {
  long p = K->prime();
  FpPoly v = {static_cast<u64>(((a % p) + p) % p)};
  fp::trim(v);
  return {std::move(K), v};
}

FqElement FqElement::random(FieldPtr K, std::mt19937_64& rng) {
  FpPoly v(K->degree());
  for (auto& c : v) c = rng() % static_cast<u64>(K->prime());
  fp::trim(v);
  return {std::move(K), v};
}

std::ostream& operator<<(std::ostream& os, const FqElement& a) {
  if (a.value.empty()) return os << "0";
  if (a.field->degree() == 1) return os << a.value[0];
  os << "[";
  for (std::size_t i = 0; i < a.value.size(); ++i) os << (i ? "," : "") << a.value[i];
  return os << "]";
}

// ---- UnramifiedElement

UnramifiedElement::UnramifiedElement(FieldPtr K, std::vector<PadicNumber> coords)
    : K_(std::move(K)), c_(std::move(coords)) {
  if (static_cast<long>(c_.size()) != K_->degree())
    fail(Errc::LengthMismatch, "coordinate count differs from residue degree");
  long n = c_.front().abs_precision();
  for (auto& x : c_) {
    if (x.prime() != K_->prime()) fail(Errc::PrimeMismatch, "coordinate prime differs from field");
    n = std::min(n, x.abs_precision());
  }
  for (auto& x : c_) x = x.cap(n);
}

UnramifiedElement UnramifiedElement::zero(FieldPtr K, long abs_prec) {
  long f = K->degree(), p = K->prime();
  return UnramifiedElement(std::move(K), std::vector<PadicNumber>(f, PadicNumber::zero(p, abs_prec)));
}

UnramifiedElement UnramifiedElement::from_padic(FieldPtr K, const PadicNumber& x) {
  if (x.prime() != K->prime()) fail(Errc::PrimeMismatch, "value prime differs from field");
  std::vector<PadicNumber> c(K->degree(), x);
  if (K->degree() > 1) {
    PadicNumber u = PadicNumber::from_integer(K->prime(), K->one_coord(), K->cap());
    for (auto& v : c) v = v * u;
  }
  return UnramifiedElement(std::move(K), std::move(c));
}

UnramifiedElement UnramifiedElement::from_rational(FieldPtr K, const Rational& x, long abs_prec) {
  return from_padic(K, PadicNumber::from_rational(K->prime(), x, abs_prec));
}

UnramifiedElement UnramifiedElement::exact(FieldPtr K, const Rational& x, long rel_prec) {
  return from_padic(K, PadicNumber::exact(K->prime(), x, rel_prec));
}

UnramifiedElement UnramifiedElement::random(FieldPtr K, long abs_prec, std::mt19937_64& rng, long min_val) {
  std::vector<PadicNumber> c;
  const long p = K->prime();
  for (long i = 0; i < K->degree(); ++i) {
    Integer u = 0;
    for (long d = min_val; d < abs_prec; ++d) u = u * p + static_cast<long>(rng() % p);
    c.push_back(PadicNumber::from_rational(p, Rational(u) * ppow_q(p, min_val), abs_prec));
  }
  return UnramifiedElement(std::move(K), std::move(c));
}

bool UnramifiedElement::is_zero() const {
  for (auto& x : c_)
    if (!x.is_zero()) return false;
  return true;
}

std::optional<long> UnramifiedElement::valuation() const {
  std::optional<long> v;
  for (auto& x : c_)
    if (auto w = x.valuation()) v = v ? std::min(*v, *w) : *w;
  return v;
}

long UnramifiedElement::valuation_bound() const {
  long v = abs_precision();
  for (auto& x : c_) v = std::min(v, x.valuation_bound());
  return v;
}

bool UnramifiedElement::is_rational() const {
  if (degree() == 1) return true;
  PadicNumber u = PadicNumber::from_integer(prime(), K_->one_coord(), K_->cap());
  PadicNumber x = c_[0] / u;
  return congruent(from_padic(K_, x), *this);
}

PadicNumber UnramifiedElement::in_qp() const {
  if (degree() == 1) return c_[0];
  if (!is_rational()) fail(Errc::InvalidArgument, "element does not lie in Q_p");
  return c_[0] / PadicNumber::from_integer(prime(), K_->one_coord(), K_->cap());
}

UnramifiedElement UnramifiedElement::reduce(long abs_prec) const {
  std::vector<PadicNumber> c;
  for (auto& x : c_) c.push_back(x.reduce(abs_prec));
  return UnramifiedElement(K_, std::move(c));
}

UnramifiedElement UnramifiedElement::cap(long abs_prec) const {
  return abs_prec < abs_precision() ? reduce(abs_prec) : *this;
}

UnramifiedElement UnramifiedElement::operator-() const {
  std::vector<PadicNumber> c;
  for (auto& x : c_) c.push_back(-x);
  return UnramifiedElement(K_, std::move(c));
}

namespace {
void same_field(const UnramifiedElement& a, const UnramifiedElement& b) {
  if (a.prime() != b.prime())
    fail(Errc::PrimeMismatch, "p = " + std::to_string(a.prime()) + " vs p = " + std::to_string(b.prime()));
  if (a.degree() != b.degree()) fail(Errc::CoefficientMismatch, "residue degrees differ");
}
const FieldPtr& wider(const UnramifiedElement& a, const UnramifiedElement& b) {
  return a.field()->cap() >= b.field()->cap() ? a.field() : b.field();
}
}  // namespace

UnramifiedElement operator+(const UnramifiedElement& a, const UnramifiedElement& b) {
  same_field(a, b);
  std::vector<PadicNumber> c;
  for (std::size_t i = 0; i < a.c_.size(); ++i) c.push_back(a.c_[i] + b.c_[i]);
  return UnramifiedElement(wider(a, b), std::move(c));
}

UnramifiedElement operator-(const UnramifiedElement& a, const UnramifiedElement& b) { return a + (-b); }

UnramifiedElement operator*(const UnramifiedElement& a, const UnramifiedElement& b) {
  same_field(a, b);
  const FieldPtr& K = wider(a, b);
  const long f = K->degree(), p = K->prime();
  if (f == 1) return UnramifiedElement(K, {a.c_[0] * b.c_[0]});
  const long n = std::min(a.valuation_bound() + b.abs_precision(), b.valuation_bound() + a.abs_precision());
  std::vector<Integer> acc(f, 0);
  // Work on scaled integer representatives: a_i = p^va * A_i, b_j = p^vb * B_j.
  const long va = a.valuation_bound(), vb = b.valuation_bound();
  const long rel = n - va - vb;
  if (rel <= 0) return UnramifiedElement::zero(K, n);
  if (rel > K->cap()) return UnramifiedElement(UnramifiedField::get(p, f, rel), a.c_) * b;
  auto scaled = [&](const PadicNumber& x, long v) -> Integer {
    if (x.is_zero()) return 0;
    return x.unit() * ppow(p, *x.valuation() - v);
  };
  const Integer& m = ppow(p, rel);
  for (long i = 0; i < f; ++i) {
    Integer ai = scaled(a.c_[i], va);
    if (ai == 0) continue;
    for (long j = 0; j < f; ++j) {
      Integer bj = scaled(b.c_[j], vb);
      if (bj == 0) continue;
      Integer ab = ai * bj % m;
      for (long k = 0; k < f; ++k) acc[k] += ab * K->structure(i, j, k);
    }
  }
  std::vector<PadicNumber> c;
  const PadicNumber scale = PadicNumber::exact(p, ppow_q(p, va + vb), rel);
  for (long k = 0; k < f; ++k) {
    PadicNumber x = PadicNumber::from_integer(p, acc[k], rel);
    c.push_back(x * scale);
  }
  for (auto& x : c) x = x.cap(n);
  return UnramifiedElement(K, std::move(c));
}

UnramifiedElement UnramifiedElement::scale(const PadicNumber& s) const {
  std::vector<PadicNumber> c;
  for (auto& x : c_) c.push_back(x * s);
  return UnramifiedElement(K_, std::move(c));
}

UnramifiedElement UnramifiedElement::frobenius(long k) const {
  const long f = degree();
  k = ((k % f) + f) % f;
  if (k == 0) return *this;
  std::vector<PadicNumber> c(c_.size());
  for (long i = 0; i < f; ++i) c[(i + k) % f] = c_[i];
  return UnramifiedElement(K_, std::move(c));
}

PadicNumber UnramifiedElement::norm() const {
  if (degree() == 1) return c_[0];
  UnramifiedElement prod = *this;
  for (long k = 1; k < degree(); ++k) prod = prod * frobenius(k);
  return prod.c_[0] / PadicNumber::from_integer(prime(), K_->one_coord(), K_->cap());
}

UnramifiedElement UnramifiedElement::inverse() const {
  if (is_zero()) fail(Errc::DivisionByZero, "element is zero mod p^" + std::to_string(abs_precision()));
  if (degree() == 1) return UnramifiedElement(K_, {c_[0].inverse()});
  UnramifiedElement prod = frobenius(1);
  for (long k = 2; k < degree(); ++k) prod = prod * frobenius(k);
  PadicNumber N = norm();
  // Relative precision of the inverse is that of x.
  const long v = *valuation();
  UnramifiedElement r = prod.scale(N.inverse());
  return r.cap(-v + (abs_precision() - v));
}

UnramifiedElement operator/(const UnramifiedElement& a, const UnramifiedElement& b) {
  if (b.is_zero()) fail(Errc::DivisionByZero, "divisor is zero mod p^" + std::to_string(b.abs_precision()));
  if (a.degree() == 1 && b.degree() == 1) {
    same_field(a, b);
    return UnramifiedElement(wider(a, b), {a.c_[0] / b.c_[0]});
  }
  return a * b.inverse();
}

UnramifiedElement UnramifiedElement::pow(long n) const {
  if (n < 0) return inverse().pow(-n);
  if (n == 0) return one(K_, std::max(abs_precision() - valuation_bound(), 1L));
  UnramifiedElement base = *this;
  std::optional<UnramifiedElement> r;
  for (long k = n; k > 0; k >>= 1) {
    if (k & 1) r = r ? *r * base : base;
    if (k > 1) base = base * base;
  }
  return *r;
}

FqElement UnramifiedElement::residue() const {
  if (valuation_bound() < 0) fail(Errc::InvalidArgument, "element is not integral");
  if (abs_precision() < 1) fail(Errc::PrecisionExhausted, "residue needs precision >= 1");
  std::vector<u64> nc;
  for (auto& x : c_) {
    if (x.is_zero() || *x.valuation() > 0) {
      nc.push_back(0);
      continue;
    }
    nc.push_back(mpz_fdiv_ui(x.unit().get_mpz_t(), static_cast<unsigned long>(prime())));
  }
  return {K_, K_->res_from_normal(nc)};
}

std::ostream& operator<<(std::ostream& os, const UnramifiedElement& x) {
  if (x.degree() == 1) return os << x.c_[0];
  os << "(";
  for (std::size_t i = 0; i < x.c_.size(); ++i) os << (i ? ", " : "") << x.c_[i];
  return os << ")";
}

UnramifiedElement unramified_frobenius(const UnramifiedElement& x) { return x.frobenius(1); }

UnramifiedElement teichmuller_residue(const FqElement& a, long prec) {
  if (prec < 1) fail(Errc::InvalidArgument, "precision must be >= 1");
  const FieldPtr& K = a.field;
  auto co = K->teichmuller_coords(a.value, prec);
  std::vector<PadicNumber> c;
  for (auto& x : co) c.push_back(PadicNumber::from_integer(K->prime(), x, prec));
  return UnramifiedElement(K, std::move(c));
}

}  // namespace phodge
