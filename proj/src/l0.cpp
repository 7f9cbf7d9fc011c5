#include "phodge/l0.hpp"

#include <climits>
#include <map>
#include <sstream>

#include "phodge/errors.hpp"

namespace phodge {

namespace {

QPoly cyclotomic_poly(long m) {
  // X^m − 1 divided by Φ_d for every proper divisor d.
  QPoly r(m + 1, Rational(0));
  r[0] = -1;
  r[m] = 1;
  for (long d = 1; d < m; ++d)
    if (m % d == 0) r = qpoly::quo(r, cyclotomic_poly(d));
  return r;
}

std::vector<long> prime_factors(long n) {
  std::vector<long> out;
  for (long q = 2; q * q <= n; ++q)
    if (n % q == 0) {
      out.push_back(q);
      while (n % q == 0) n /= q;
    }
  if (n > 1) out.push_back(n);
  return out;
}

}  // namespace

L0Field::L0Field(long p, long f) : p_(p), f_(f), m_(1) {
  if (!is_prime(p)) fail(Errc::InvalidArgument, std::to_string(p) + " is not prime");
  if (f < 1) fail(Errc::InvalidArgument, "residue degree must be positive");
  if (f == 1) {
    phi_ = {Rational(-1), Rational(1)};
    return;
  }
  long q = 1;
  for (long i = 0; i < f; ++i) {
    if (q > (1L << 20) / p) fail(Errc::LengthExceeded, "residue field too large");
    q *= p;
  }
  m_ = q - 1;
  phi_ = cyclotomic_poly(m_);
  K_ = UnramifiedField::get(p, f);
  auto primes = prime_factors(m_);
  for (long idx = 1; idx < q; ++idx) {
    FpPoly v;
    for (long t = idx; t; t /= p) v.push_back(static_cast<u64>(t % p));
    fp::trim(v);
    FqElement g{K_, v};
    bool primitive = true;
    for (long r : primes)
      if (g.pow(static_cast<u64>(m_ / r)) == FqElement::one(K_)) primitive = false;
    if (primitive) {
      gen_ = g;
      return;
    }
  }
  fail(Errc::InvalidArgument, "no generator of F_q^* found");
}

L0Ptr L0Field::get(long p, long f) {
  static std::mutex mu;
  static std::map<std::pair<long, long>, L0Ptr> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{p, f}];
  if (!slot) slot = L0Ptr(new L0Field(p, f));
  return slot;
}

L0Number::L0Number(L0Ptr F, std::vector<Rational> coeffs) : F_(std::move(F)), c_(std::move(coeffs)) {
  const long d = F_->degree();
  if (static_cast<long>(c_.size()) > d) {
    QPoly a(c_.begin(), c_.end());
    qpoly::trim(a);
    c_ = qpoly::rem(a, F_->cyclotomic());
  }
  c_.resize(d, Rational(0));
}

L0Number L0Number::zero(const L0Ptr& F) { return L0Number(F, {}); }

L0Number L0Number::rational(const L0Ptr& F, const Rational& x) { return L0Number(F, {x}); }

L0Number L0Number::zeta_power(const L0Ptr& F, long k) {
  const long m = F->order();
  k %= m;
  if (k < 0) k += m;
  std::vector<Rational> c(k + 1, Rational(0));
  c[k] = 1;
  return L0Number(F, std::move(c));
}

bool L0Number::is_zero() const {
  for (auto& x : c_)
    if (x != 0) return false;
  return true;
}

bool L0Number::is_rational() const {
  for (std::size_t i = 1; i < c_.size(); ++i)
    if (c_[i] != 0) return false;
  return true;
}

Rational L0Number::to_rational() const {
  if (!is_rational()) fail(Errc::InvalidArgument, to_string() + " is not rational");
  return c_.empty() ? Rational(0) : c_[0];
}

std::optional<long> L0Number::valuation() const {
  if (is_zero()) return std::nullopt;
  const long p = F_->prime();
  if (is_rational()) return vp(c_[0], p);
  long cmin = LONG_MAX;
  for (auto& x : c_)
    if (x != 0) cmin = std::min(cmin, *vp(x, p));
  const FieldPtr& K = F_->unramified();
  for (long P = 8;; P *= 2) {
    UnramifiedElement acc = UnramifiedElement::zero(K, P);
    for (std::size_t i = 0; i < c_.size(); ++i) {
      if (c_[i] == 0) continue;
      UnramifiedElement t = teichmuller_residue(F_->generator().pow(i), P);
      acc = acc + t * UnramifiedElement::from_rational(K, c_[i] * ppow_q(p, -cmin), P);
    }
    if (!acc.is_zero()) return cmin + *acc.valuation();
    if (P > (1L << 14)) fail(Errc::PrecisionExhausted, "valuation not determined");
  }
}

L0Number L0Number::operator-() const {
  L0Number r = *this;
  for (auto& x : r.c_) x = -x;
  return r;
}

L0Number operator+(const L0Number& a, const L0Number& b) {
  if (a.F_ != b.F_) fail(Errc::CoefficientMismatch, "different coefficient fields");
  L0Number r = a;
  for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] += b.c_[i];
  return r;
}

L0Number operator-(const L0Number& a, const L0Number& b) {
  if (a.F_ != b.F_) fail(Errc::CoefficientMismatch, "different coefficient fields");
  L0Number r = a;
  for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] -= b.c_[i];
  return r;
}

L0Number operator*(const L0Number& a, const L0Number& b) {
  if (a.F_ != b.F_) fail(Errc::CoefficientMismatch, "different coefficient fields");
  if (a.c_.size() == 1) return L0Number(a.F_, {a.c_[0] * b.c_[0]});
  QPoly x(a.c_), y(b.c_);
  qpoly::trim(x);
  qpoly::trim(y);
  return L0Number(a.F_, qpoly::rem(qpoly::mul(x, y), a.F_->cyclotomic()));
}

L0Number L0Number::inverse() const {
  if (is_zero()) fail(Errc::DivisionByZero, "inverse of zero");
  if (c_.size() == 1) return L0Number(F_, {1 / c_[0]});
  QPoly x(c_), s, t;
  qpoly::trim(x);
  qpoly::xgcd(x, F_->cyclotomic(), s, t);
  return L0Number(F_, s);
}

L0Number L0Number::sigma(long k) const {
  const long m = F_->order();
  if (m == 1) return *this;
  long pk = 1;
  k %= F_->residue_degree();
  if (k < 0) k += F_->residue_degree();
  for (long i = 0; i < k; ++i) pk = pk * F_->prime() % m;
  std::vector<Rational> c(m, Rational(0));
  for (std::size_t i = 0; i < c_.size(); ++i) c[static_cast<long>(i) * pk % m] += c_[i];
  return L0Number(F_, std::move(c));
}

L0Number L0Number::pow(long n) const {
  if (n < 0) return inverse().pow(-n);
  L0Number r = rational(F_, 1), b = *this;
  while (n) {
    if (n & 1) r *= b;
    b *= b;
    n >>= 1;
  }
  return r;
}

std::string L0Number::to_string() const {
  if (is_rational()) return phodge::to_string(to_rational());
  QPoly x(c_);
  qpoly::trim(x);
  return "(" + qpoly::to_string(x, "z") + ")";
}

std::ostream& operator<<(std::ostream& os, const L0Number& a) { return os << a.to_string(); }

}  // namespace phodge
