#include "phodge/robba.hpp"

#include <algorithm>
#include <climits>
#include <sstream>

#include "phodge/errors.hpp"

namespace phodge {

namespace {

long sadd(long a, long b) {
  if (a == kExactPrecision || b == kExactPrecision) return kExactPrecision;
  return a + b;
}

long lval(const L0Number& x) {
  auto v = x.valuation();
  return v ? *v : kExactPrecision;
}

Coef czero(const L0Ptr& F) { return {L0Number::zero(F), kExactPrecision}; }

Coef cadd(const Coef& a, const Coef& b) { return {a.value + b.value, std::min(a.prec, b.prec)}; }
Coef csub(const Coef& a, const Coef& b) { return {a.value - b.value, std::min(a.prec, b.prec)}; }
Coef cneg(const Coef& a) { return {-a.value, a.prec}; }

Coef cmul(const Coef& a, const Coef& b) {
  if (a.exact() && b.exact()) return {a.value * b.value, kExactPrecision};
  long pa = a.exact() ? kExactPrecision : sadd(a.prec, b.vlow());
  long pb = b.exact() ? kExactPrecision : sadd(b.prec, a.vlow());
  return {a.value * b.value, std::min(pa, pb)};
}

Coef cscale(const Coef& a, const L0Number& c) {
  if (c.is_zero()) return czero(c.field());
  return {a.value * c, sadd(a.prec, lval(c))};
}

Coef cscale(const Coef& a, const Rational& r) {
  const L0Ptr& F = a.value.field();
  if (r == 0) return czero(F);
  return {a.value * L0Number::rational(F, r), sadd(a.prec, *vp(r, F->prime()))};
}

bool czero_mod(const Coef& a) { return a.value.is_zero() || (!a.exact() && lval(a.value) >= a.prec); }

Coef cinv(const Coef& a) {
  if (a.value.is_zero()) fail(Errc::DivisionByZero, "inverse of a zero coefficient");
  if (a.exact()) return {a.value.inverse(), kExactPrecision};
  long v = lval(a.value);
  if (v >= a.prec) fail(Errc::PrecisionExhausted, "coefficient is zero to its precision");
  return {a.value.inverse(), a.prec - 2 * v};
}

Rational reduce_rational(const Rational& c, long p, long prec) {
  if (c == 0) return c;
  long v = *vp(c, p);
  if (v >= prec) return Rational(0);
  Rational u = c / ppow_q(p, v);
  const Integer& M = ppow(p, prec - v);
  Integer inv;
  mpz_invert(inv.get_mpz_t(), u.get_den().get_mpz_t(), M.get_mpz_t());
  Integer n = Integer(u.get_num() * inv) % M;
  if (n < 0) n += M;
  if (2 * n > M) n -= M;
  return Rational(n) * ppow_q(p, v);
}

Coef creduce(const Coef& a) {
  if (a.exact()) return a;
  const L0Ptr& F = a.value.field();
  std::vector<Rational> c = a.value.coeffs();
  for (auto& x : c) x = reduce_rational(x, F->prime(), a.prec);
  return {L0Number(F, std::move(c)), a.prec};
}

std::optional<Rational> rmin(const std::optional<Rational>& a, const std::optional<Rational>& b) {
  if (!a) return b;
  if (!b) return a;
  return Rational(*a < *b ? *a : *b);
}

void same_field(const L0Ptr& a, const L0Ptr& b) {
  if (a != b) fail(Errc::CoefficientMismatch, "series over different coefficient fields");
}

}  // namespace

long Coef::vlow() const {
  if (value.is_zero()) return prec;
  long v = lval(value);
  return exact() ? v : std::min(v, prec);
}

// ---------------------------------------------------------------------------
// RobbaSeries

RobbaSeries::RobbaSeries(L0Ptr F, long lo, std::vector<Coef> coeffs, bool lower_exact, bool upper_exact)
    : F_(std::move(F)), lo_(lo), c_(std::move(coeffs)), lower_exact_(lower_exact), upper_exact_(upper_exact) {
  for (auto& c : c_)
    if (c.value.field() != F_) fail(Errc::CoefficientMismatch, "coefficient from another field");
  normalize();
}

void RobbaSeries::normalize() {
  auto exact_zero = [](const Coef& c) { return c.exact() && c.value.is_zero(); };
  if (lower_exact_) {
    std::size_t k = 0;
    while (k < c_.size() && exact_zero(c_[k])) ++k;
    c_.erase(c_.begin(), c_.begin() + static_cast<long>(k));
    lo_ += static_cast<long>(k);
  }
  if (upper_exact_)
    while (!c_.empty() && exact_zero(c_.back())) c_.pop_back();
  if (c_.empty() && lower_exact_ && upper_exact_) lo_ = 0;
}

RobbaSeries RobbaSeries::zero(const L0Ptr& F) { return RobbaSeries(F, 0, {}, true, true); }

RobbaSeries RobbaSeries::constant(const L0Ptr& F, const L0Number& c) { return monomial(F, c, 0); }

RobbaSeries RobbaSeries::monomial(const L0Ptr& F, const L0Number& c, long n) {
  return RobbaSeries(F, n, {Coef{c}}, true, true);
}

RobbaSeries RobbaSeries::laurent(const L0Ptr& F, long lo, const std::vector<L0Number>& c) {
  std::vector<Coef> v;
  v.reserve(c.size());
  for (auto& x : c) v.push_back(Coef{x});
  return RobbaSeries(F, lo, std::move(v), true, true);
}

RobbaSeries RobbaSeries::laurent(const L0Ptr& F, long lo, const std::vector<Rational>& c) {
  std::vector<L0Number> v;
  v.reserve(c.size());
  for (auto& x : c) v.push_back(L0Number::rational(F, x));
  return laurent(F, lo, v);
}

RobbaSeries RobbaSeries::with_radius(std::optional<Rational> rho) const {
  if (rho && *rho <= 0) fail(Errc::InvalidArgument, "radius exponent must be positive");
  RobbaSeries r = *this;
  r.rho_ = std::move(rho);
  return r;
}

bool RobbaSeries::known(long n) const {
  if (n >= lo_ && n <= hi()) return true;
  return n < lo_ ? lower_exact_ : upper_exact_;
}

Coef RobbaSeries::coef(long n) const {
  if (n >= lo_ && n <= hi()) return c_[n - lo_];
  if (known(n)) return czero(F_);
  fail(Errc::WindowExhausted, "coefficient " + std::to_string(n) + " lies outside the window [" +
                                  std::to_string(lo_) + ", " + std::to_string(hi()) + "]");
}

bool RobbaSeries::all_exact() const {
  for (auto& c : c_)
    if (!c.exact()) return false;
  return true;
}

RobbaSeries RobbaSeries::operator-() const {
  RobbaSeries r = *this;
  for (auto& c : r.c_) c = cneg(c);
  return r;
}

namespace {

// The window on which a and b are both known; false when there is none.
bool joint_window(const RobbaSeries& a, const RobbaSeries& b, long& lo, long& hi, bool& le, bool& ue) {
  le = a.lower_exact() && b.lower_exact();
  ue = a.upper_exact() && b.upper_exact();
  long klo = std::max(a.lower_exact() ? LONG_MIN : a.lo(), b.lower_exact() ? LONG_MIN : b.lo());
  long khi = std::min(a.upper_exact() ? LONG_MAX : a.hi(), b.upper_exact() ? LONG_MAX : b.hi());
  lo = le ? std::min(a.lo(), b.lo()) : klo;
  hi = ue ? std::max(a.hi(), b.hi()) : khi;
  if (lo <= hi) return true;
  if (le && !ue) {
    lo = hi + 1;
    return true;
  }
  if (ue && !le) {
    hi = lo - 1;
    return true;
  }
  return le && ue;
}

}  // namespace

RobbaSeries operator+(const RobbaSeries& a, const RobbaSeries& b) {
  same_field(a.F_, b.F_);
  long lo, hi;
  bool le, ue;
  if (!joint_window(a, b, lo, hi, le, ue)) fail(Errc::WindowExhausted, "sum of series with disjoint windows");
  std::vector<Coef> c;
  for (long n = lo; n <= hi; ++n) c.push_back(cadd(a.coef(n), b.coef(n)));
  RobbaSeries r(a.F_, lo, std::move(c), le, ue);
  r.rho_ = rmin(a.rho_, b.rho_);
  return r;
}

RobbaSeries operator-(const RobbaSeries& a, const RobbaSeries& b) { return a + (-b); }

RobbaSeries operator*(const RobbaSeries& a, const RobbaSeries& b) {
  same_field(a.F_, b.F_);
  auto is_zero_poly = [](const RobbaSeries& s) { return s.c_.empty() && s.lower_exact_ && s.upper_exact_; };
  if (is_zero_poly(a) || is_zero_poly(b)) return RobbaSeries::zero(a.F_);

  // Indices k where a_k may be nonzero, likewise for b.
  const long ka_lo = a.lower_exact_ ? a.lo_ : LONG_MIN, ka_hi = a.upper_exact_ ? a.hi() : LONG_MAX;
  const long kb_lo = b.lower_exact_ ? b.lo_ : LONG_MIN, kb_hi = b.upper_exact_ ? b.hi() : LONG_MAX;
  // c_n = Σ a_k b_(n−k) over k in [ilo, ihi]; valid when every term is known.
  auto range = [&](long n, long& ilo, long& ihi) {
    ilo = std::max(ka_lo, kb_hi == LONG_MAX ? LONG_MIN : n - kb_hi);
    ihi = std::min(ka_hi, kb_lo == LONG_MIN ? LONG_MAX : n - kb_lo);
    if (ilo > ihi) return true;
    if (ilo == LONG_MIN || ihi == LONG_MAX) return false;
    return ilo >= a.lo_ && ihi <= a.hi() && n - ihi >= b.lo_ && n - ilo <= b.hi();
  };
  const long cand_lo = a.lo_ + b.lo_, cand_hi = a.hi() + b.hi();
  long run_lo = LONG_MAX, run_hi = LONG_MIN;
  for (long n = cand_lo; n <= cand_hi; ++n) {
    long ilo, ihi;
    if (range(n, ilo, ihi)) {
      if (run_lo == LONG_MAX) run_lo = n;
      run_hi = n;
    } else if (run_lo != LONG_MAX) {
      break;
    }
  }
  if (run_lo == LONG_MAX) {
    // nothing known inside, but a vanishing side may still be known
    if (a.lower_exact_ && b.lower_exact_) return RobbaSeries(a.F_, cand_lo, {}, true, false);
    if (a.upper_exact_ && b.upper_exact_) return RobbaSeries(a.F_, cand_hi + 1, {}, false, true);
    fail(Errc::WindowExhausted, "windows too short to determine any coefficient of the product");
  }
  std::vector<Coef> c;
  c.reserve(static_cast<std::size_t>(run_hi - run_lo + 1));
  for (long n = run_lo; n <= run_hi; ++n) {
    long ilo, ihi;
    range(n, ilo, ihi);
    Coef s = czero(a.F_);
    for (long k = ilo; k <= ihi; ++k) s = cadd(s, cmul(a.c_[k - a.lo_], b.c_[n - k - b.lo_]));
    c.push_back(std::move(s));
  }
  bool le = a.lower_exact_ && b.lower_exact_ && run_lo == cand_lo;
  bool ue = a.upper_exact_ && b.upper_exact_ && run_hi == cand_hi;
  RobbaSeries r(a.F_, run_lo, std::move(c), le, ue);
  r.rho_ = rmin(a.rho_, b.rho_);
  return r;
}

RobbaSeries RobbaSeries::derive() const {
  std::vector<Coef> c;
  c.reserve(c_.size());
  for (std::size_t k = 0; k < c_.size(); ++k) c.push_back(cscale(c_[k], Rational(lo_ + static_cast<long>(k))));
  RobbaSeries r(F_, lo_ - 1, std::move(c), lower_exact_, upper_exact_);
  r.rho_ = rho_;
  return r;
}

RobbaSeries RobbaSeries::scale(const L0Number& s) const {
  same_field(F_, s.field());
  if (s.is_zero()) return zero(F_);
  RobbaSeries r = *this;
  for (auto& c : r.c_) c = cscale(c, s);
  return r;
}

RobbaSeries RobbaSeries::shift(long k) const {
  RobbaSeries r = *this;
  r.lo_ += k;
  if (r.c_.empty() && lower_exact_ && upper_exact_) r.lo_ = 0;
  return r;
}

RobbaSeries RobbaSeries::sigma(long k) const {
  RobbaSeries r = *this;
  for (auto& c : r.c_) c.value = c.value.sigma(k);
  return r;
}

RobbaSeries RobbaSeries::truncate(long l, long h) const {
  long nlo = std::max(l, lo_), nhi = std::min(h, hi());
  bool le = lower_exact_ && l <= lo_;
  bool ue = upper_exact_ && h >= hi();
  if (nlo > nhi && !le && !ue) fail(Errc::WindowExhausted, "truncation leaves nothing known");
  std::vector<Coef> c;
  for (long n = nlo; n <= nhi; ++n) c.push_back(c_[n - lo_]);
  RobbaSeries r(F_, nlo, std::move(c), le, ue);
  r.rho_ = rho_;
  return r;
}

RobbaSeries RobbaSeries::inverse(long terms) const {
  if (!lower_exact_ || c_.empty()) fail(Errc::WindowExhausted, "inverse needs a known leading coefficient");
  if (terms < 1) fail(Errc::InvalidArgument, "inverse needs at least one term");
  Coef a0inv = cinv(c_[0]);
  const long size = static_cast<long>(c_.size());
  if (upper_exact_ && size == 1) {
    RobbaSeries r(F_, -lo_, {a0inv}, true, true);
    r.rho_ = rho_;
    return r;
  }
  const long K = upper_exact_ ? terms : std::min(terms, size);
  std::vector<Coef> g{a0inv};
  for (long k = 1; k < K; ++k) {
    Coef s = czero(F_);
    for (long j = 1; j <= k && j < size; ++j) s = cadd(s, cmul(c_[j], g[k - j]));
    g.push_back(cmul(cneg(s), a0inv));
  }
  // A formal inverse: the expansion in increasing powers.
  RobbaSeries r(F_, -lo_, std::move(g), true, false);
  r.rho_ = rho_;
  return r;
}

RobbaSeries RobbaSeries::reduced() const {
  RobbaSeries r = *this;
  for (auto& c : r.c_) c = creduce(c);
  return r;
}

bool RobbaSeries::is_zero() const {
  for (auto& c : c_)
    if (!czero_mod(c)) return false;
  return true;
}

std::string RobbaSeries::to_string(const std::string& var) const {
  std::ostringstream os;
  bool first = true;
  if (!lower_exact_) {
    os << "...";
    first = false;
  }
  for (std::size_t k = 0; k < c_.size(); ++k) {
    const Coef& c = c_[k];
    if (c.exact() && c.value.is_zero()) continue;
    long n = lo_ + static_cast<long>(k);
    if (!first) os << " + ";
    first = false;
    std::string cs = c.value.to_string();
    if (!c.exact()) cs = "(" + cs + " + O(" + std::to_string(prime()) + "^" + std::to_string(c.prec) + "))";
    os << cs;
    if (n == 1) os << "*" << var;
    else if (n != 0) os << "*" << var << "^" << n;
  }
  if (!upper_exact_) {
    if (!first) os << " + ";
    first = false;
    os << "O(" << var << "^" << hi() + 1 << ")";
  }
  if (first) os << "0";
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const RobbaSeries& f) { return os << f.to_string(); }

Agreement compare(const RobbaSeries& a, const RobbaSeries& b, long prec) {
  same_field(a.field(), b.field());
  Agreement ag;
  long lo, hi;
  bool le, ue;
  if (!joint_window(a, b, lo, hi, le, ue)) {
    ag.equal = false;
    return ag;
  }
  ag.lo = lo;
  ag.hi = hi;
  for (long n = lo; n <= hi; ++n) {
    Coef d = csub(a.coef(n), b.coef(n));
    d.prec = std::min(d.prec, prec);
    if (!czero_mod(d)) {
      ag.equal = false;
      ag.first_mismatch = n;
      break;
    }
  }
  return ag;
}

RobbaSeries robba_arith(const RobbaSeries& f, const RobbaSeries& g, RobbaOp op) {
  switch (op) {
    case RobbaOp::Add:
      return f + g;
    case RobbaOp::Mul:
      return f * g;
    case RobbaOp::Derive:
      return f.derive();
  }
  fail(Errc::InvalidArgument, "unknown series operation");
}

GaussValue gauss_valuation(const RobbaSeries& f, const Rational& s) {
  if (s <= 0) fail(Errc::InvalidArgument, "the circle exponent must be positive");
  if (f.radius() && s >= *f.radius())
    fail(Errc::InvalidArgument, "the circle exponent lies outside the annulus of convergence");
  GaussValue g;
  bool found = false;
  const auto& c = f.stored();
  std::vector<std::optional<Rational>> vals(c.size());
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (c[k].exact() && c[k].value.is_zero()) continue;
    long n = f.lo() + static_cast<long>(k);
    Rational val = Rational(c[k].vlow()) + Rational(n) * s;
    vals[k] = val;
    if (!found || val < g.value) {
      g.value = val;
      g.argmin = n;
      g.lower_bound_only = czero_mod(c[k]);
      found = true;
    }
  }
  if (!found) fail(Errc::InvalidArgument, "gauss valuation of the zero series");
  const std::size_t last = c.size() - 1;
  g.boundary = (!f.lower_exact() && vals[0] && *vals[0] == g.value) ||
               (!f.upper_exact() && vals[last] && *vals[last] == g.value);
  // The last few stored terms must be moving away from the minimum.
  auto increasing = [&](long from, long step) {
    std::optional<Rational> prev;
    for (long i = 0, k = from; i < 3 && k >= 0 && k <= static_cast<long>(last); ++i, k += step) {
      if (!vals[k]) continue;
      if (prev && !(*prev > *vals[k])) return false;
      prev = vals[k];
    }
    return true;
  };
  if (!f.upper_exact() && !increasing(static_cast<long>(last), -1)) g.tail_decreasing = false;
  if (!f.lower_exact() && !increasing(0, 1)) g.tail_decreasing = false;
  return g;
}

std::optional<long> sup_valuation(const RobbaSeries& f) {
  std::optional<long> best;
  for (auto& c : f.stored()) {
    if (c.exact() && c.value.is_zero()) continue;
    long v = c.vlow();
    if (!best || v < *best) best = v;
  }
  return best;
}

bool is_integral(const RobbaSeries& f) {
  auto v = sup_valuation(f);
  return !v || *v >= 0;
}

// ---------------------------------------------------------------------------
// Frobenius pullback

RobbaSeries frobenius_pullback(const RobbaSeries& f, const RobbaSeries& z, std::optional<std::pair<long, long>> window) {
  const L0Ptr& F = f.field();
  same_field(F, z.field());
  const long p = F->prime();
  if (!z.is_polynomial() || !z.all_exact()) fail(Errc::InvalidArgument, "z must be an exact Laurent polynomial");
  if (!is_integral(z)) fail(Errc::InvalidArgument, "z must be integral");
  if (window && window->first > window->second) fail(Errc::InvalidArgument, "empty output window");
  if (f.is_polynomial() && f.stored().empty()) return RobbaSeries::zero(F);
  if (f.stored().empty()) fail(Errc::WindowExhausted, "nothing known about the series");

  const bool zz = z.stored().empty();
  const long zlo = zz ? 0 : z.lo(), zhi = zz ? 0 : z.hi();
  const bool negative = !f.lower_exact() || f.lo() < 0;
  if (negative && !zz && zhi >= p)
    fail(Errc::ModelUnsupported, "z must have degree below p to pull back negative powers");

  // Exponent bounds for P_n = (x^p + p z)^n.
  auto top = [&](long n) { return n < 0 || zz ? p * n : n * std::max(p, zhi); };
  auto bottom = [&](long n) { return zz ? p * n : n * std::min(p, zlo); };  // n >= 0 or z = 0

  long L, U;
  bool le, ue;
  if (f.lower_exact()) {
    if (f.lo() >= 0 || zz) {
      L = std::min(bottom(f.lo()), bottom(f.hi()));
      le = true;
    } else {
      L = window ? window->first : p * f.lo() - 32;
      le = false;
    }
  } else {
    L = top(f.lo() - 1) + 1;
    le = false;
  }
  if (f.upper_exact()) {
    U = top(f.hi());
    ue = true;
  } else {
    long n = f.hi() + 1;
    if (zz) U = p * n - 1;
    else if (n < 0 || std::min(p, zlo) <= 0)
      fail(Errc::WindowExhausted, "the unknown upper tail reaches every coefficient of the pullback");
    else U = n * std::min(p, zlo) - 1;
    ue = false;
  }
  const long L0 = L, U0 = U;
  const bool le0 = le, ue0 = ue;
  if (window) {
    if (window->first > L) {
      L = window->first;
      le = false;
    }
    if (window->second < U) {
      U = window->second;
      ue = false;
    }
  }
  if (L > U) {
    // the window lies in a region known to vanish
    if (window && ((le0 && window->second < L0) || (ue0 && window->first > U0)))
      return RobbaSeries(F, window->first,
                         std::vector<Coef>(static_cast<std::size_t>(window->second - window->first + 1), czero(F)),
                         false, false);
    fail(Errc::WindowExhausted, "empty output window for the pullback");
  }

  std::vector<Coef> acc(static_cast<std::size_t>(U - L + 1), czero(F));
  auto accumulate = [&](const Coef& a, const RobbaSeries& P) {
    if (czero_mod(a) && a.exact()) return;
    Coef sa{a.value.sigma(), a.prec};
    for (long m = std::max(L, P.lo()); m <= std::min(U, P.hi()); ++m)
      acc[m - L] = cadd(acc[m - L], cmul(sa, P.stored()[m - P.lo()]));
  };
  const RobbaSeries one = RobbaSeries::constant(F, L0Number::rational(F, 1));
  const RobbaSeries base = RobbaSeries::monomial(F, L0Number::rational(F, 1), p) + z.scale(L0Number::rational(F, p));

  if (f.hi() >= 0) {
    RobbaSeries P = one;
    for (long n = 0; n <= f.hi(); ++n) {
      if (n > 0) P = P * base;
      if (n >= f.lo()) accumulate(f.coef(n), P);
    }
  }
  if (f.lo() < 0) {
    // U1 = (x^p + p z)^(−1) = Σ_k (−p)^k z^k x^(−p(k+1)), known on [L, −p].
    RobbaSeries U1;
    if (zz) {
      U1 = RobbaSeries::monomial(F, L0Number::rational(F, 1), -p);
    } else {
      RobbaSeries sum = RobbaSeries::zero(F), zk = one;
      Rational pk = 1;
      for (long k = 0; k * zhi - p * (k + 1) >= L; ++k) {
        sum = sum + zk.scale(L0Number::rational(F, pk)).shift(-p * (k + 1));
        zk = zk * z;
        pk *= -p;
      }
      std::vector<Coef> c;
      for (long m = L; m <= -p; ++m) c.push_back(sum.coef(m));
      U1 = RobbaSeries(F, L, std::move(c), false, true);
    }
    RobbaSeries P = U1;
    for (long n = -1; n >= f.lo() && p * n >= L; --n) {
      if (n < -1) P = (P * U1).truncate(L, LONG_MAX);
      if (n <= f.hi()) accumulate(f.coef(n), P);
    }
  }
  RobbaSeries r(F, L, std::move(acc), le, ue);
  if (f.radius() || !zz) {
    Rational rho = f.radius() ? *f.radius() : Rational(1);
    if (!zz && rho > 1) rho = 1;
    r = r.with_radius(Rational(rho / p));
  }
  return r;
}

// ---------------------------------------------------------------------------
// SeriesMatrix

SeriesMatrix::SeriesMatrix(L0Ptr F, long rows, long cols)
    : F_(std::move(F)), r_(rows), c_(cols), a_(static_cast<std::size_t>(rows * cols), RobbaSeries::zero(F_)) {}

SeriesMatrix SeriesMatrix::identity(const L0Ptr& F, long n) {
  SeriesMatrix m(F, n, n);
  for (long i = 0; i < n; ++i) m(i, i) = RobbaSeries::constant(F, L0Number::rational(F, 1));
  return m;
}

SeriesMatrix SeriesMatrix::constant(const L0Matrix& c) {
  SeriesMatrix m(c.field(), c.rows(), c.cols());
  for (long i = 0; i < c.rows(); ++i)
    for (long j = 0; j < c.cols(); ++j) m(i, j) = RobbaSeries::constant(c.field(), c(i, j));
  return m;
}

SeriesMatrix SeriesMatrix::from_coefficients(const L0Ptr& F, long lo, const std::vector<L0Matrix>& coeffs) {
  if (coeffs.empty()) fail(Errc::InvalidArgument, "no coefficient matrices");
  const long r = coeffs[0].rows(), c = coeffs[0].cols();
  SeriesMatrix m(F, r, c);
  for (long i = 0; i < r; ++i)
    for (long j = 0; j < c; ++j) {
      std::vector<L0Number> v;
      for (auto& C : coeffs) {
        if (C.rows() != r || C.cols() != c) fail(Errc::LengthMismatch, "coefficient matrices differ in shape");
        v.push_back(C(i, j));
      }
      m(i, j) = RobbaSeries::laurent(F, lo, v);
    }
  return m;
}

L0Matrix SeriesMatrix::coefficient(long n) const {
  L0Matrix m(F_, r_, c_);
  for (long i = 0; i < r_; ++i)
    for (long j = 0; j < c_; ++j) m(i, j) = (*this)(i, j).coef(n).value;
  return m;
}

std::pair<long, long> SeriesMatrix::known_window() const {
  long lo = LONG_MIN, hi = LONG_MAX;
  for (auto& e : a_) {
    if (!e.lower_exact()) lo = std::max(lo, e.lo());
    if (!e.upper_exact()) hi = std::min(hi, e.hi());
  }
  return {lo, hi};
}

bool SeriesMatrix::lower_exact() const {
  for (auto& e : a_)
    if (!e.lower_exact()) return false;
  return true;
}

namespace {

void same_shape(const SeriesMatrix& a, const SeriesMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) fail(Errc::LengthMismatch, "matrix shapes differ");
}

template <class Fn>
SeriesMatrix map_entries(const SeriesMatrix& a, Fn fn) {
  SeriesMatrix r(a.field(), a.rows(), a.cols());
  for (long i = 0; i < a.rows(); ++i)
    for (long j = 0; j < a.cols(); ++j) r(i, j) = fn(a(i, j));
  return r;
}

}  // namespace

SeriesMatrix SeriesMatrix::operator-() const {
  return map_entries(*this, [](const RobbaSeries& s) { return -s; });
}

SeriesMatrix operator+(const SeriesMatrix& a, const SeriesMatrix& b) {
  same_shape(a, b);
  SeriesMatrix r(a.F_, a.r_, a.c_);
  for (std::size_t k = 0; k < a.a_.size(); ++k) r.a_[k] = a.a_[k] + b.a_[k];
  return r;
}

SeriesMatrix operator-(const SeriesMatrix& a, const SeriesMatrix& b) {
  same_shape(a, b);
  SeriesMatrix r(a.F_, a.r_, a.c_);
  for (std::size_t k = 0; k < a.a_.size(); ++k) r.a_[k] = a.a_[k] - b.a_[k];
  return r;
}

SeriesMatrix operator*(const SeriesMatrix& a, const SeriesMatrix& b) {
  if (a.c_ != b.r_) fail(Errc::LengthMismatch, "matrix product shapes");
  SeriesMatrix r(a.F_, a.r_, b.c_);
  for (long i = 0; i < a.r_; ++i)
    for (long j = 0; j < b.c_; ++j) {
      RobbaSeries s = RobbaSeries::zero(a.F_);
      for (long k = 0; k < a.c_; ++k) s = s + a(i, k) * b(k, j);
      r(i, j) = std::move(s);
    }
  return r;
}

SeriesMatrix SeriesMatrix::scale(const RobbaSeries& s) const {
  return map_entries(*this, [&](const RobbaSeries& e) { return e * s; });
}

SeriesMatrix SeriesMatrix::scale(const L0Number& s) const {
  return map_entries(*this, [&](const RobbaSeries& e) { return e.scale(s); });
}

SeriesMatrix SeriesMatrix::derive() const {
  return map_entries(*this, [](const RobbaSeries& e) { return e.derive(); });
}

SeriesMatrix SeriesMatrix::shift(long k) const {
  return map_entries(*this, [&](const RobbaSeries& e) { return e.shift(k); });
}

SeriesMatrix SeriesMatrix::sigma(long k) const {
  return map_entries(*this, [&](const RobbaSeries& e) { return e.sigma(k); });
}

SeriesMatrix SeriesMatrix::truncate(long lo, long hi) const {
  return map_entries(*this, [&](const RobbaSeries& e) { return e.truncate(lo, hi); });
}

SeriesMatrix SeriesMatrix::reduced() const {
  return map_entries(*this, [](const RobbaSeries& e) { return e.reduced(); });
}

SeriesMatrix SeriesMatrix::frobenius(const RobbaSeries& z, std::optional<std::pair<long, long>> window) const {
  return map_entries(*this, [&](const RobbaSeries& e) { return frobenius_pullback(e, z, window); });
}

namespace {

RobbaSeries det_rec(const SeriesMatrix& m, std::vector<long>& rows, std::vector<long>& cols) {
  const L0Ptr& F = m.field();
  if (rows.empty()) return RobbaSeries::constant(F, L0Number::rational(F, 1));
  long r = rows.front();
  rows.erase(rows.begin());
  RobbaSeries acc = RobbaSeries::zero(F);
  for (std::size_t k = 0; k < cols.size(); ++k) {
    long c = cols[k];
    const RobbaSeries& e = m(r, c);
    if (e.is_polynomial() && e.stored().empty()) continue;
    cols.erase(cols.begin() + static_cast<long>(k));
    RobbaSeries minor = det_rec(m, rows, cols);
    cols.insert(cols.begin() + static_cast<long>(k), c);
    RobbaSeries term = e * minor;
    acc = k % 2 ? acc - term : acc + term;
  }
  rows.insert(rows.begin(), r);
  return acc;
}

}  // namespace

RobbaSeries SeriesMatrix::det() const {
  if (r_ != c_) fail(Errc::LengthMismatch, "determinant of a non-square matrix");
  if (r_ > 7) fail(Errc::DegreeExceeded, "series determinants are limited to rank 7");
  std::vector<long> rows, cols;
  for (long i = 0; i < r_; ++i) {
    rows.push_back(i);
    cols.push_back(i);
  }
  return det_rec(*this, rows, cols);
}

SeriesMatrix SeriesMatrix::inverse(long terms) const {
  RobbaSeries d = det();
  if (d.is_zero()) fail(Errc::BasisSingular, "determinant vanishes on its window");
  RobbaSeries dinv = d.inverse(terms);
  const long n = r_;
  SeriesMatrix adj(F_, n, n);
  if (n == 1) {
    adj(0, 0) = RobbaSeries::constant(F_, L0Number::rational(F_, 1));
  } else {
    for (long i = 0; i < n; ++i)
      for (long j = 0; j < n; ++j) {
        // adj(i, j) = (−1)^(i+j) det of the minor without row j and column i
        std::vector<long> rows, cols;
        for (long k = 0; k < n; ++k) {
          if (k != j) rows.push_back(k);
          if (k != i) cols.push_back(k);
        }
        RobbaSeries m = det_rec(*this, rows, cols);
        adj(i, j) = (i + j) % 2 ? -m : m;
      }
  }
  return adj.scale(dinv);
}

bool SeriesMatrix::is_zero() const {
  for (auto& e : a_)
    if (!e.is_zero()) return false;
  return true;
}

std::optional<long> SeriesMatrix::valuation() const {
  std::optional<long> best;
  for (auto& e : a_) {
    auto v = sup_valuation(e);
    if (v && (!best || *v < *best)) best = v;
  }
  return best;
}

Agreement compare(const SeriesMatrix& a, const SeriesMatrix& b, long prec) {
  same_shape(a, b);
  Agreement ag;
  ag.lo = LONG_MIN;
  ag.hi = LONG_MAX;
  long span_lo = LONG_MAX, span_hi = LONG_MIN;
  for (long i = 0; i < a.rows(); ++i)
    for (long j = 0; j < a.cols(); ++j) {
      Agreement e = compare(a(i, j), b(i, j), prec);
      if (e.lo <= e.hi) {
        span_lo = std::min(span_lo, e.lo);
        span_hi = std::max(span_hi, e.hi);
      }
      ag.equal = ag.equal && e.equal;
      // a side where both entries are exact polynomials does not limit the window
      if (e.lo <= e.hi) {
        if (!a(i, j).lower_exact() || !b(i, j).lower_exact()) ag.lo = std::max(ag.lo, e.lo);
        if (!a(i, j).upper_exact() || !b(i, j).upper_exact()) ag.hi = std::min(ag.hi, e.hi);
      }
      if (e.first_mismatch && (!ag.first_mismatch || *e.first_mismatch < *ag.first_mismatch))
        ag.first_mismatch = e.first_mismatch;
    }
  if (ag.lo == LONG_MIN) ag.lo = span_lo == LONG_MAX ? 0 : span_lo;
  if (ag.hi == LONG_MAX) ag.hi = span_hi == LONG_MIN ? ag.lo - 1 : span_hi;
  return ag;
}

// ---------------------------------------------------------------------------
// Connection modules

const char* pole_name(Pole p) { return p == Pole::Logarithmic ? "logarithmic" : "holomorphic"; }

void require_valid(const ConnectionModule& M) {
  if (!M.field) fail(Errc::InvalidModule, "no coefficient field");
  if (M.h < 1) fail(Errc::InvalidModule, "rank must be positive");
  if (M.A.rows() != M.h || M.A.cols() != M.h) fail(Errc::InvalidModule, "connection matrix is not h x h");
  if (M.A.field() != M.field) fail(Errc::InvalidModule, "connection matrix over another field");
  if (M.frobenius) {
    if (M.frobenius->phi.rows() != M.h || M.frobenius->phi.cols() != M.h)
      fail(Errc::InvalidModule, "Frobenius matrix is not h x h");
    if (M.frobenius->phi.field() != M.field || M.frobenius->z.field() != M.field)
      fail(Errc::InvalidModule, "Frobenius data over another field");
  }
}

namespace {

void require_regular(const SeriesMatrix& A) {
  for (long i = 0; i < A.rows(); ++i)
    for (long j = 0; j < A.cols(); ++j) {
      const RobbaSeries& e = A(i, j);
      if (!e.lower_exact()) fail(Errc::NotRegular, "negative-index coefficients are not known to vanish");
      if (!e.stored().empty() && e.lo() < 0)
        fail(Errc::NotRegular, "coefficient of t^" + std::to_string(e.lo()) + " is nonzero");
    }
}

using CM = std::vector<Coef>;  // h x h, row-major

CM cm_zero(const L0Ptr& F, long h) { return CM(static_cast<std::size_t>(h * h), czero(F)); }

CM cm_id(const L0Ptr& F, long h) {
  CM m = cm_zero(F, h);
  for (long i = 0; i < h; ++i) m[i * h + i] = Coef{L0Number::rational(F, 1)};
  return m;
}

CM cm_mul(const CM& a, const CM& b, long h) {
  CM r = cm_zero(a[0].value.field(), h);
  for (long i = 0; i < h; ++i)
    for (long k = 0; k < h; ++k) {
      const Coef& x = a[i * h + k];
      if (x.exact() && x.value.is_zero()) continue;
      for (long j = 0; j < h; ++j) r[i * h + j] = cadd(r[i * h + j], cmul(x, b[k * h + j]));
    }
  return r;
}

CM cm_add(const CM& a, const CM& b) {
  CM r = a;
  for (std::size_t k = 0; k < r.size(); ++k) r[k] = cadd(r[k], b[k]);
  return r;
}

CM cm_sub(const CM& a, const CM& b) {
  CM r = a;
  for (std::size_t k = 0; k < r.size(); ++k) r[k] = csub(r[k], b[k]);
  return r;
}

CM cm_scale(const CM& a, const Rational& s) {
  CM r = a;
  for (auto& x : r) x = cscale(x, s);
  return r;
}

CM cm_coef(const SeriesMatrix& A, long n) {
  const long h = A.rows();
  CM m;
  m.reserve(static_cast<std::size_t>(h * h));
  for (long i = 0; i < h; ++i)
    for (long j = 0; j < h; ++j) m.push_back(A(i, j).coef(n));
  return m;
}

SeriesMatrix pack(const L0Ptr& F, long h, const std::vector<CM>& coeffs, long lo) {
  SeriesMatrix m(F, h, h);
  for (long i = 0; i < h; ++i)
    for (long j = 0; j < h; ++j) {
      std::vector<Coef> v;
      for (auto& C : coeffs) v.push_back(C[i * h + j]);
      m(i, j) = RobbaSeries(F, lo, std::move(v), true, false);
    }
  return m;
}

}  // namespace

ResidueReport residue_exponents(const ConnectionModule& M) {
  require_valid(M);
  require_regular(M.A);
  const L0Ptr& F = M.field;
  const long h = M.h;
  ResidueReport rep;
  if (M.pole == Pole::Holomorphic) {
    rep.residue = L0Matrix(F, h, h);
  } else {
    for (long i = 0; i < h; ++i)
      for (long j = 0; j < h; ++j)
        if (!M.A(i, j).coef(0).exact()) fail(Errc::PrecisionExhausted, "the residue must be known exactly");
    rep.residue = M.A.coefficient(0);
  }
  const L0Matrix& R = rep.residue;
  rep.charpoly = R.charpoly();
  rep.nilpotent = R.pow(h).is_zero();
  bool rational = true;
  for (auto& c : rep.charpoly) rational = rational && c.is_rational();
  if (!rational) return rep;

  QPoly chi;
  for (auto& c : rep.charpoly) chi.push_back(c.to_rational());
  rep.factored = true;
  QPoly rad{Rational(1)};
  for (auto& f : qpoly::factor(chi)) {
    ExponentFactor e{f.poly, f.mult, std::nullopt};
    if (qpoly::degree(f.poly) == 1) {
      e.root = Rational(-f.poly[0]);
      for (long k = 0; k < f.mult; ++k) rep.exponents.push_back(*e.root);
    }
    rep.factors.push_back(std::move(e));
    rad = qpoly::mul(rad, f.poly);
  }
  std::sort(rep.exponents.begin(), rep.exponents.end());
  // semisimple iff the squarefree part kills R
  L0Matrix acc(F, h, h);
  const L0Matrix I = L0Matrix::identity(F, h);
  for (long k = qpoly::degree(rad); k >= 0; --k) acc = acc * R + I.scale(L0Number::rational(F, rad[k]));
  rep.semisimple = acc.is_zero();
  return rep;
}

FormalSolution solve_horizontal_formal(const ConnectionModule& M, long N) {
  require_valid(M);
  if (N < 1) fail(Errc::InvalidArgument, "order must be positive");
  require_regular(M.A);
  const L0Ptr& F = M.field;
  const long h = M.h;
  FormalSolution S;
  S.order = N;

  std::vector<CM> A;
  auto need = [&](long k) {
    while (static_cast<long>(A.size()) <= k) A.push_back(cm_coef(M.A, static_cast<long>(A.size())));
    return A[k];
  };

  if (M.pole == Pole::Holomorphic) {
    // (n+1) Y_(n+1) = −Σ_(k<=n) A_k Y_(n−k)
    std::vector<CM> Y{cm_id(F, h)};
    for (long n = 0; n + 1 < N; ++n) {
      CM s = cm_zero(F, h);
      for (long k = 0; k <= n; ++k) s = cm_add(s, cm_mul(need(k), Y[n - k], h));
      Y.push_back(cm_scale(s, Rational(-1, n + 1)));
    }
    S.Y = pack(F, h, Y, 0);
    return S;
  }

  const CM R = need(0);
  for (auto& c : R)
    if (!c.exact()) fail(Errc::PrecisionExhausted, "the residue must be known exactly");
  S.residue = M.A.coefficient(0);
  if (!S.residue.pow(h).is_zero()) {
    // n + ad_R is singular exactly when two eigenvalues differ by n
    const long hh = h * h;
    for (long n = 1; n < N; ++n) {
      L0Matrix T(F, hh, hh);
      for (long i = 0; i < h; ++i)
        for (long j = 0; j < h; ++j) {
          long row = i * h + j;
          T(row, row) += L0Number::rational(F, n);
          for (long k = 0; k < h; ++k) {
            T(row, k * h + j) += S.residue(i, k);
            T(row, i * h + k) -= S.residue(k, j);
          }
        }
      if (T.det().is_zero())
        fail(Errc::ResonanceObstruction, "eigenvalues of the residue differ by " + std::to_string(n));
    }
    fail(Errc::NotUnipotentFormally, "the residue is not nilpotent");
  }

  // n P_n + R P_n − P_n R = −Σ_(1<=k<=n) A_k P_(n−k); ad_R is nilpotent, so
  // (n + ad_R)^(−1) = Σ_j (−ad_R)^j / n^(j+1).
  std::vector<CM> P{cm_id(F, h)};
  for (long n = 1; n < N; ++n) {
    CM rhs = cm_zero(F, h);
    for (long k = 1; k <= n; ++k) rhs = cm_sub(rhs, cm_mul(need(k), P[n - k], h));
    CM X = cm_zero(F, h), term = rhs;
    Rational scale(1, n);
    for (long j = 0; j < 2 * h - 1; ++j) {
      X = cm_add(X, cm_scale(term, scale));
      term = cm_sub(cm_mul(R, term, h), cm_mul(term, R, h));
      scale = Rational(-scale / n);
    }
    P.push_back(X);
  }
  S.Y = pack(F, h, P, 0);
  S.unipotent = true;
  for (long k = 1;; ++k) {
    L0Matrix K = S.residue.pow(k).kernel();
    S.filtration.push_back(K);
    if (K.rows() == h) break;
  }
  return S;
}

SeriesMatrix formal_residual(const ConnectionModule& M, const FormalSolution& S) {
  if (M.pole == Pole::Holomorphic) return S.Y.derive() + M.A * S.Y;
  return S.Y.derive().shift(1) + M.A * S.Y - S.Y * SeriesMatrix::constant(S.residue);
}

FrobeniusCheck frobenius_structure_check(const ConnectionModule& M, long prec, std::optional<std::pair<long, long>> window) {
  require_valid(M);
  if (!M.frobenius) fail(Errc::FrobeniusMissing, "module has no Frobenius structure");
  const L0Ptr& F = M.field;
  const FrobeniusData& fr = *M.frobenius;
  const L0Number one = L0Number::rational(F, 1);
  const RobbaSeries x = RobbaSeries::monomial(F, one, 1);
  // Exact polynomials pull back exactly; the window only bounds what has to be cut.
  auto pull = [&](const RobbaSeries& e) {
    bool exact = e.lower_exact() && e.upper_exact() && e.all_exact() && (e.lo() >= 0 || fr.z.stored().empty());
    return frobenius_pullback(e, fr.z, exact ? std::nullopt : window);
  };
  const SeriesMatrix phiA = map_entries(M.A, pull);
  const RobbaSeries dphix = pull(x).derive();
  FrobeniusCheck out;
  if (M.pole == Pole::Holomorphic) {
    out.lhs = fr.phi.derive() + M.A * fr.phi;
    out.rhs = (fr.phi * phiA).scale(dphix);
  } else {
    RobbaSeries inv = pull(RobbaSeries::monomial(F, one, -1));
    out.lhs = fr.phi.derive().shift(1) + M.A * fr.phi;
    out.rhs = (fr.phi * phiA).scale(x * dphix * inv);
  }
  if (window) {
    auto restrict_to = [&](const RobbaSeries& s) {
      long a = s.lower_exact() ? window->first : std::max(window->first, s.lo());
      long b = s.upper_exact() ? window->second : std::min(window->second, s.hi());
      if (a > b) fail(Errc::WindowExhausted, "nothing known inside the requested window");
      std::vector<Coef> c;
      for (long n = a; n <= b; ++n) c.push_back(s.coef(n));
      return RobbaSeries(F, a, std::move(c), false, false);
    };
    out.lhs = map_entries(out.lhs, restrict_to);
    out.rhs = map_entries(out.rhs, restrict_to);
  }
  Agreement ag = compare(out.lhs, out.rhs, prec);
  out.lo = ag.lo;
  out.hi = ag.hi;
  out.first_failure = ag.first_mismatch;
  out.pass = ag.equal;
  out.verified_through = ag.first_mismatch ? *ag.first_mismatch - 1 : ag.hi;
  return out;
}

// ---------------------------------------------------------------------------
// Sen operators

namespace {

SeriesMatrix cap_precision(const SeriesMatrix& m, long prec) {
  return map_entries(m, [&](const RobbaSeries& e) {
    std::vector<Coef> c = e.stored();
    for (auto& x : c) x = creduce(Coef{x.value, std::min(x.prec, prec)});
    return RobbaSeries(e.field(), e.lo(), std::move(c), e.lower_exact(), e.upper_exact());
  });
}

// Smallest n such that every term n' >= n of Σ X^n'/n' has valuation >= T,
// given v(X^m) >= mu > 0 and v(X^j) >= c for j < m.
long log_tail_start(long m, long mu, long c, long T, long p) {
  Rational x0 = Rational(3 * m, 2 * mu) + 2;
  for (long n = std::max<long>(1, static_cast<long>(x0.get_d())); n < (1L << 24); ++n) {
    Rational bound = (Rational(n, m) - 1) * mu + c - (floor_log(p, n) + 1);
    if (bound >= T) return n;
  }
  fail(Errc::LogDivergent, "logarithm tail bound does not close");
}

// The same for Σ X^n/n!, using v(n!) <= (n−1)/(p−1).
long exp_tail_start(long m, long mu, long c, long T, long p) {
  Rational slope = Rational(mu, m) - Rational(1, p - 1);
  if (slope <= 0) fail(Errc::LogDivergent, "exponential series does not converge at this precision");
  for (long n = 1; n < (1L << 24); ++n) {
    Rational bound = (Rational(n, m) - 1) * mu + c - Rational(n - 1, p - 1);
    if (bound >= T) return n;
  }
  fail(Errc::LogDivergent, "exponential tail bound does not close");
}

struct PowerCertificate {
  std::optional<long> nil;  // X^nil = 0
  long m = 0, mu = 0, c = 0;
};

// Powers of X mod t^r, searching for a block length m that makes the valuations
// grow. `exp_rate` asks for mu/m > 1/(p−1).
PowerCertificate certify(std::vector<SeriesMatrix>& pw, long r, long p, bool exp_rate) {
  const long h = pw[1].rows();
  PowerCertificate cert;
  Rational best = 0;
  const long M = 4 * h + 8;
  for (long m = 1; m <= M; ++m) {
    if (static_cast<long>(pw.size()) <= m) pw.push_back((pw[m - 1] * pw[1]).truncate(0, r - 1).reduced());
    auto v = pw[m].valuation();
    if (!v) {
      cert.nil = m;
      return cert;
    }
    if (*v > 0 && Rational(*v, m) > best) {
      best = Rational(*v, m);
      cert.m = m;
      cert.mu = *v;
    }
  }
  if (cert.m == 0 || (exp_rate && best <= Rational(1, p - 1)))
    fail(Errc::LogDivergent, "the series does not converge at this precision");
  cert.c = 0;
  for (long j = 1; j < cert.m; ++j) {
    auto v = pw[j].valuation();
    if (v) cert.c = std::min(cert.c, *v);
  }
  return cert;
}

void extend_powers(std::vector<SeriesMatrix>& pw, long upto, long r) {
  while (static_cast<long>(pw.size()) <= upto) pw.push_back((pw.back() * pw[1]).truncate(0, r - 1).reduced());
}

Rational scalar_log(const Rational& chi, long p, long T, long& terms) {
  Rational x = chi - 1;
  long vx = *vp(x, p);
  long N0 = log_tail_start(1, vx, 0, T, p);
  Rational acc = 0, pw = 1;
  for (long n = 1; n < N0; ++n) {
    pw *= x;
    Rational term = pw / n;
    acc += n % 2 ? term : Rational(-term);
  }
  terms = N0 - 1;
  return reduce_rational(acc, p, T);
}

}  // namespace

namespace {

// Precision of Σ_(n<N0) Y^n/n! when Y is known mod p^T. A word in Y and the
// error δ with a single δ has valuation >= T + v(Y^j) + v(Y^(n−1−j)); with a
// nilpotent Y, words with k δ's survive for large n and are bounded separately.
long exp_precision(const std::vector<SeriesMatrix>& pw, const PowerCertificate& cert, long T, long N0, long p) {
  constexpr long kInf = LONG_MAX / 4;
  std::vector<long> computed;
  for (auto& m : pw) {
    auto v = m.valuation();
    computed.push_back(v ? *v : kInf);
  }
  auto val = [&](long j) -> long {
    if (j == 0) return 0;
    if (cert.nil && j >= *cert.nil) return kInf;
    // both are lower bounds; the computed one decays with the precision of the powers
    long from_cert = cert.m > 0 ? (j / cert.m) * cert.mu + cert.c : LONG_MIN;
    if (j < static_cast<long>(computed.size())) return std::max(computed[j], from_cert);
    return from_cert;
  };
  long best = T;
  for (long n = 1; n < N0; ++n) {
    long w = kInf;
    for (long j = 0; j < n; ++j) w = std::min(w, val(j) + val(n - 1 - j));
    if (w < kInf) best = std::min(best, T + w - vp_factorial(p, n));
  }
  if (cert.nil) {
    const long nil = *cert.nil;
    long c0 = 0;
    for (long j = 1; j < nil; ++j) c0 = std::min(c0, val(j));
    for (long n = nil; n < 4096; ++n) {
      long k = (n + 1 + nil - 1) / nil - 1;  // fewest δ's: runs of Y shorter than nil
      k = std::max<long>(k, 1);
      best = std::min(best, k * T + (k + 1) * c0 - vp_factorial(p, n));
    }
  }
  return best;
}

}  // namespace

SeriesMatrix sen_exponentiate(const SenResult& s) {
  const L0Ptr& F = s.nabla0.field();
  const long p = F->prime(), h = s.nabla0.rows();
  SeriesMatrix Y = s.nabla0.scale(L0Number::rational(F, s.log_chi)).truncate(0, s.r - 1);
  long T = LONG_MAX;
  for (long i = 0; i < h; ++i)
    for (long j = 0; j < h; ++j)
      for (auto& c : Y(i, j).stored()) T = std::min(T, c.prec);
  const bool exact = T == LONG_MAX;
  if (exact) T = s.prec + 1;
  // Powers of the stored representative are computed exactly: rounding them to
  // their propagated precision would discard digits that the bound below counts on.
  Y = map_entries(Y, [](const RobbaSeries& e) {
    std::vector<Coef> c = e.stored();
    for (auto& x : c) x = Coef{creduce(x).value, kExactPrecision};
    return RobbaSeries(e.field(), e.lo(), std::move(c), e.lower_exact(), e.upper_exact());
  });
  std::vector<SeriesMatrix> pw{SeriesMatrix::identity(F, h), Y};
  PowerCertificate cert = certify(pw, s.r, p, true);
  long N0 = cert.nil ? *cert.nil : exp_tail_start(cert.m, cert.mu, cert.c, T, p);
  extend_powers(pw, N0, s.r);
  const bool keep_exact = exact && cert.nil;
  const long P = keep_exact ? kExactPrecision : exact ? T : exp_precision(pw, cert, T, N0, p);
  // terms are rounded to the final precision as they are added
  auto round = [&](const SeriesMatrix& m) {
    return map_entries(m, [&](const RobbaSeries& e) {
      std::vector<Coef> c = e.stored();
      for (auto& x : c) x = creduce(Coef{x.value, P});
      return RobbaSeries(e.field(), e.lo(), std::move(c), e.lower_exact(), e.upper_exact());
    });
  };
  SeriesMatrix acc = SeriesMatrix::identity(F, h);
  Rational fact = 1;
  for (long n = 1; n < N0; ++n) {
    fact *= n;
    SeriesMatrix term = pw[n].scale(L0Number::rational(F, Rational(1 / fact)));
    acc = acc + (keep_exact ? term : round(term));
  }
  acc = acc.truncate(0, s.r - 1);
  return keep_exact ? acc : round(acc);
}

SenResult sen_connection(const GammaActionData& g, long prec) {
  if (!g.field) fail(Errc::InvalidArgument, "no coefficient field");
  const L0Ptr& F = g.field;
  const long p = F->prime(), h = g.gamma.rows();
  if (g.gamma.cols() != h || h < 1) fail(Errc::InvalidArgument, "gamma matrix must be square");
  if (g.r < 1 || prec < 1) fail(Errc::InvalidArgument, "t-order and precision must be positive");
  require_regular(g.gamma);
  const Rational c1 = g.chi - 1;
  if (c1 == 0 || *vp(c1, p) >= g.chi_prec) fail(Errc::ChiTrivial, "chi(gamma) = 1");
  const long vl = *vp(c1, p);
  if (vl < (p == 2 ? 2 : 1))
    fail(Errc::LogDivergent, std::string("chi(gamma) must be congruent to 1 mod ") + (p == 2 ? "4" : "p"));
  SeriesMatrix G = g.gamma.truncate(0, g.r - 1);
  if (G.known_window().second < g.r - 1) fail(Errc::WindowExhausted, "gamma is not known to the requested t-order");
  if (G.det().coef(0).value.is_zero()) fail(Errc::BasisSingular, "gamma is not invertible");

  std::vector<SeriesMatrix> pw{SeriesMatrix::identity(F, h), G - SeriesMatrix::identity(F, h)};
  for (long guard = 2; guard <= 66; guard += 8) {
    const long TL = prec + guard + vl;
    PowerCertificate cert = certify(pw, g.r, p, false);
    long N0 = cert.nil ? *cert.nil : log_tail_start(cert.m, cert.mu, cert.c, TL, p);
    extend_powers(pw, N0, g.r);
    SeriesMatrix L(F, h, h);
    for (long n = 1; n < N0; ++n) {
      Rational k = n % 2 ? Rational(1, n) : Rational(-1, n);
      L = L + pw[n].scale(L0Number::rational(F, k));
    }
    L = cap_precision(L.truncate(0, g.r - 1), TL);
    // λ needs relative precision covering the division
    auto vL = L.valuation();
    long Tl = TL + vl - std::min<long>(0, vL ? *vL : 0);
    long lterms = 0;
    Rational lambda = scalar_log(g.chi, p, Tl, lterms);
    long eff = TL - vl;
    if (g.chi_prec != kExactPrecision) eff = std::min(eff, (vL ? *vL : eff) + std::min(Tl, g.chi_prec) - 2 * vl);
    SenResult s;
    s.nabla0 = cap_precision(L.scale(L0Number::rational(F, Rational(1 / lambda))), eff);
    s.log_chi = lambda;
    s.prec = prec;
    s.r = g.r;
    s.log_terms = N0 - 1;
    s.guard = guard;
    if (eff < prec) continue;
    SeriesMatrix back = sen_exponentiate(s);
    long got = LONG_MAX;
    for (long i = 0; i < h; ++i)
      for (long j = 0; j < h; ++j)
        for (auto& c : back(i, j).stored()) got = std::min(got, c.prec);
    if (got >= prec) return s;
  }
  fail(Errc::PrecisionExhausted, "could not reach the requested precision");
}

// ---------------------------------------------------------------------------
// D0 lattices

D0Result d0_lattice_test(const ConnectionModule& M, const SeriesMatrix& B, long N) {
  require_valid(M);
  if (N < 1) fail(Errc::InvalidArgument, "order must be positive");
  if (B.rows() != M.h || B.cols() != M.h) fail(Errc::LengthMismatch, "basis must be h x h");
  if (B.field() != M.field) fail(Errc::CoefficientMismatch, "basis over another field");
  const SeriesMatrix Alog = M.pole == Pole::Holomorphic ? M.A.shift(1) : M.A;
  long span = 1;
  for (long i = 0; i < M.h; ++i)
    for (long j = 0; j < M.h; ++j)
      if (!B(i, j).stored().empty()) span = std::max(span, B(i, j).hi() - B(i, j).lo() + 1);
  SeriesMatrix G;
  for (long terms = N + 2 + M.h * span;; terms *= 2) {
    SeriesMatrix Binv = B.inverse(terms);
    G = B * Alog * Binv - B.derive().shift(1) * Binv;
    if (G.known_window().second >= N - 1) break;
    if (terms > 64 * (N + 2 + M.h * span)) fail(Errc::WindowExhausted, "gauged matrix not determined to order N");
  }
  G = G.truncate(LONG_MIN, N - 1);
  if (!G.lower_exact()) fail(Errc::WindowExhausted, "gauged matrix has an unknown polar part");
  D0Result out;
  out.order = N;
  out.gauged = G;
  for (long i = 0; i < M.h; ++i)
    for (long j = 0; j < M.h; ++j) {
      const RobbaSeries& e = G(i, j);
      for (long n = e.lo(); n <= std::min(0L, e.hi()); ++n)
        if (!czero_mod(e.coef(n))) {
          if (!out.pole_index || n < *out.pole_index) out.pole_index = n;
          break;
        }
    }
  out.pass = !out.pole_index;
  if (out.pass) out.holomorphic = ConnectionModule{M.field, M.h, G.shift(-1), Pole::Holomorphic, std::nullopt};
  return out;
}

}  // namespace phodge
