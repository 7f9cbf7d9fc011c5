#include "phodge/period.hpp"

#include <sstream>

namespace phodge {

namespace {

CSidePtr base_field(const ModelPtr& M) { return CSideField::get(M->kind(), M->field(), 0); }

UnramifiedElement konst(const ModelPtr& M, const Rational& r) {
  return UnramifiedElement::exact(M->field(), r, M->field()->cap());
}

long sat_add(long a, long b) {
  if (a == kExactPrecision || b == kExactPrecision) return kExactPrecision;
  return a + b;
}

void same_model(const ModelPtr& a, const ModelPtr& b) {
  if (a != b && (a->kind() != b->kind() || a->prime() != b->prime() || a->field()->degree() != b->field()->degree()))
    fail(Errc::CoefficientMismatch, "elements from different period models");
}

}  // namespace

// ---- WRElement

void WRElement::add_term(const Rational& e, const UnramifiedElement& a) {
  auto it = t_.find(e);
  if (it == t_.end())
    t_.emplace(e, a);
  else
    it->second = it->second + a;
}

WRElement WRElement::constant(ModelPtr M, const UnramifiedElement& a) { return monomial(std::move(M), a, 0); }

WRElement WRElement::rational(ModelPtr M, const Rational& a) {
  auto c = UnramifiedElement::exact(M->field(), a, M->prec());
  return monomial(std::move(M), c, 0);
}

WRElement WRElement::monomial(ModelPtr M, const UnramifiedElement& a, const Rational& e) {
  M->exponent_depth(e);
  WRElement r(std::move(M));
  r.t_.emplace(e, a);
  return r;
}

WRElement WRElement::uniformizer(ModelPtr M) {
  auto one = UnramifiedElement::exact(M->field(), 1, M->prec());
  auto c = UnramifiedElement::exact(M->field(), M->kind() == TiltModel::Kummer ? -M->prime() : -1, M->prec());
  WRElement r = monomial(M, one, 1);
  r.add_term(0, c);
  return r;
}

long WRElement::depth() const {
  long d = 0;
  for (auto& [e, a] : t_) d = std::max(d, M_->raw_depth(e));
  return d;
}

WRElement WRElement::teichmuller(const TiltElement& x, long prec) {
  const ModelPtr& M = x.model();
  WRElement r(M);
  if (x.is_zero()) return r;
  if (!x.exact()) fail(Errc::PrecisionExhausted, "tilt element was truncated at the degree cutoff");
  if (x.is_monomial()) {
    auto& [e, c] = *x.terms().begin();
    r.t_.emplace(e, teichmuller_residue(c, M->prec()));
    return r;
  }
  // [x] = lim (Σ [c^(1/p^k)] [g]^(e/p^k))^(p^k), correct mod p^(k+1).
  const long k = prec - 1;
  if (x.depth() + k > M->depth())
    fail(Errc::DepthExceeded, "Teichmüller lift mod p^" + std::to_string(prec) + " needs depth " +
                                  std::to_string(x.depth() + k) + " > " + std::to_string(M->depth()));
  WRElement y(M);
  for (auto& [e, c] : x.terms()) {
    FqElement root = c;
    for (long i = 0; i < k; ++i) root = root.frobenius_inverse();
    y.t_.emplace(e / Rational(ppow(M->prime(), k)), teichmuller_residue(root, M->prec()));
  }
  long pk = 1;
  for (long i = 0; i < k; ++i) pk *= M->prime();
  WRElement out = y.pow(pk);
  out.w_prec_ = prec;
  return out;
}

WRElement WRElement::from_witt(const WittVector<TiltElement>& w, long prec) {
  const ModelPtr& M = w[0].model();
  WRElement r(M);
  bool exact = true;
  for (long n = 0; n < w.length(); ++n) {
    const TiltElement& a = w[n];
    if (a.is_zero()) continue;
    if (n >= prec && !a.is_monomial()) {
      exact = false;
      continue;
    }
    TiltElement root = a;
    for (long i = 0; i < n; ++i) root = root.root_p();
    WRElement t = teichmuller(root, a.is_monomial() ? prec : prec - n);
    if (!t.exact()) exact = false;
    auto pn = UnramifiedElement::exact(M->field(), Rational(ppow(M->prime(), n)), M->prec());
    r = r + t.scale(pn);
  }
  r.w_prec_ = exact ? kExactPrecision : prec;
  return r;
}

namespace {

long min_coeff_valuation(const WRElement& x) {
  long v = LONG_MAX / 4;
  for (auto& [e, a] : x.terms()) v = std::min(v, a.valuation_bound());
  return v;
}

}  // namespace

WRElement operator+(const WRElement& a, const WRElement& b) {
  same_model(a.M_, b.M_);
  WRElement r = a;
  for (auto& [e, c] : b.t_) r.add_term(e, c);
  r.w_prec_ = std::min(a.w_prec_, b.w_prec_);
  return r;
}

WRElement WRElement::operator-() const {
  WRElement r(M_);
  for (auto& [e, c] : t_) r.t_.emplace(e, -c);
  r.w_prec_ = w_prec_;
  return r;
}

WRElement operator-(const WRElement& a, const WRElement& b) { return a + (-b); }

WRElement operator*(const WRElement& a, const WRElement& b) {
  same_model(a.M_, b.M_);
  WRElement r(a.M_);
  for (auto& [ea, ca] : a.t_)
    for (auto& [eb, cb] : b.t_) {
      Rational e = ea + eb;
      a.M_->exponent_depth(e);
      r.add_term(e, ca * cb);
    }
  r.w_prec_ = std::min(sat_add(a.w_prec_, min_coeff_valuation(b)), sat_add(b.w_prec_, min_coeff_valuation(a)));
  return r;
}

WRElement WRElement::scale(const UnramifiedElement& s) const {
  WRElement r(M_);
  for (auto& [e, c] : t_) r.t_.emplace(e, c * s);
  r.w_prec_ = sat_add(w_prec_, s.valuation_bound());
  return r;
}

WRElement WRElement::pow(long n) const {
  if (n < 0) fail(Errc::InvalidArgument, "negative power in W(R)");
  if (n == 0) return rational(M_, 1);
  WRElement base = *this;
  std::optional<WRElement> r;
  for (long k = n; k > 0; k >>= 1) {
    if (k & 1) r = r ? *r * base : base;
    if (k > 1) base = base * base;
  }
  return *r;
}

WRElement WRElement::frobenius() const {
  WRElement r(M_);
  for (auto& [e, c] : t_) r.t_.emplace(e * M_->prime(), c.frobenius());
  r.w_prec_ = w_prec_;
  return r;
}

std::ostream& operator<<(std::ostream& os, const WRElement& x) {
  if (x.t_.empty()) return os << "0";
  const char* g = x.M_->kind() == TiltModel::Kummer ? "[pi]" : "[eps]";
  bool first = true;
  for (auto& [e, c] : x.t_) {
    os << (first ? "" : " + ") << "(" << c << ")*" << g << "^" << e;
    first = false;
  }
  if (!x.exact()) os << " + O(p^" << x.w_prec_ << ")";
  return os;
}

// ---- θ

CSideElement theta_monomial(const ModelPtr& M, const Rational& e) {
  const long k = M->exponent_depth(e);
  auto F = CSideField::get(M->kind(), M->field(), k);
  const Integer scaled = Integer(e * Rational(ppow(M->prime(), k)));
  if (M->kind() == TiltModel::Kummer) {
    // e = n + j/p^k
    Integer n = floor_q(e);
    long j = Integer(scaled - n * ppow(M->prime(), k)).get_si();
    auto c = UnramifiedElement::exact(M->field(), ppow_q(M->prime(), n.get_si()), M->prec());
    return CSideElement::basis(F, j, c);
  }
  auto one = UnramifiedElement::exact(M->field(), 1, M->prec());
  CSideElement r = CSideElement::zero(F);
  for (auto& t : F->zeta_power(scaled)) r = r + CSideElement::basis(F, t.index, t.sign > 0 ? one : -one);
  return r;
}

CSideElement theta(const WRElement& w) {
  const ModelPtr& M = w.model();
  CSideElement r = CSideElement::zero(base_field(M));
  for (auto& [e, a] : w.terms()) r = r + theta_monomial(M, e).scale(a);
  if (!w.exact()) r = r.cap(w.w_precision());
  return r;
}

CSideElement theta(const WittVector<TiltElement>& w, long prec) { return theta(WRElement::from_witt(w, prec)); }

CSideElement theta_tower(const TiltElement& x, long n) {
  if (!x.is_monomial()) fail(Errc::ModelUnsupported, "x^(n) is computed for monomials only");
  TiltElement r = x;
  for (long i = 0; i < n; ++i) r = r.root_p();
  return theta(WRElement::teichmuller(r, x.model()->prec()));
}

// ---- B_dR^+

BdRElement::BdRElement(ModelPtr M, std::vector<CSideElement> c) : M_(std::move(M)), c_(std::move(c)) {
  if (c_.empty()) fail(Errc::InvalidArgument, "truncation order must be >= 1");
}

BdRElement BdRElement::zero(ModelPtr M, long N) {
  if (N < 1) fail(Errc::InvalidArgument, "truncation order must be >= 1");
  if (N > M->config().max_order)
    fail(Errc::DegreeExceeded, "order " + std::to_string(N) + " exceeds the configured maximum");
  auto F = base_field(M);
  return BdRElement(std::move(M), std::vector<CSideElement>(N, CSideElement::zero(F)));
}

BdRElement BdRElement::from_cside(ModelPtr M, const CSideElement& c, long N) {
  BdRElement r = zero(std::move(M), N);
  r.c_[0] = c;
  return r;
}

BdRElement BdRElement::rational(ModelPtr M, const Rational& a, long N) {
  auto F = base_field(M);
  auto c = CSideElement::from_k0(F, UnramifiedElement::exact(M->field(), a, M->prec()));
  return from_cside(std::move(M), c, N);
}

BdRElement BdRElement::uniformizer(ModelPtr M, long N) {
  BdRElement r = zero(M, N);
  if (N > 1) r.c_[1] = CSideElement::from_k0(base_field(M), UnramifiedElement::exact(M->field(), 1, M->prec()));
  return r;
}

bool BdRElement::is_zero() const {
  for (auto& c : c_)
    if (!c.is_zero()) return false;
  return true;
}

long BdRElement::fil_degree() const {
  for (long i = 0; i < order(); ++i)
    if (!c_[i].is_zero()) return i;
  return order();
}

BdRElement BdRElement::truncate(long N) const {
  if (N > order()) fail(Errc::PrecisionExhausted, "element known only mod Fil^" + std::to_string(order()));
  return BdRElement(M_, std::vector<CSideElement>(c_.begin(), c_.begin() + N));
}

BdRElement operator+(const BdRElement& a, const BdRElement& b) {
  same_model(a.M_, b.M_);
  const long N = std::min(a.order(), b.order());
  std::vector<CSideElement> c;
  for (long i = 0; i < N; ++i) c.push_back(a.c_[i] + b.c_[i]);
  return BdRElement(a.M_, std::move(c));
}

BdRElement BdRElement::operator-() const {
  std::vector<CSideElement> c;
  for (auto& x : c_) c.push_back(-x);
  return BdRElement(M_, std::move(c));
}

BdRElement operator-(const BdRElement& a, const BdRElement& b) { return a + (-b); }

BdRElement operator*(const BdRElement& a, const BdRElement& b) {
  same_model(a.M_, b.M_);
  const long N = std::min(a.order(), b.order());
  BdRElement r = BdRElement::zero(a.M_, N);
  for (long i = 0; i < N; ++i) {
    if (a.c_[i].coeffs().empty()) continue;
    for (long j = 0; i + j < N; ++j) {
      if (b.c_[j].coeffs().empty()) continue;
      r.c_[i + j] = r.c_[i + j] + a.c_[i] * b.c_[j];
    }
  }
  return r;
}

BdRElement BdRElement::scale(const CSideElement& s) const {
  std::vector<CSideElement> c;
  for (auto& x : c_) c.push_back(x.coeffs().empty() ? x : x * s);
  return BdRElement(M_, std::move(c));
}

BdRElement BdRElement::scale(const Rational& s) const {
  auto k = konst(M_, s);
  std::vector<CSideElement> c;
  for (auto& x : c_) c.push_back(x.scale(k));
  return BdRElement(M_, std::move(c));
}

BdRElement BdRElement::pow(long n) const {
  if (n < 0) fail(Errc::InvalidArgument, "negative power in B_dR^+");
  BdRElement r = rational(M_, 1, order());
  for (long i = 0; i < n; ++i) r = r * *this;
  return r;
}

std::ostream& operator<<(std::ostream& os, const BdRElement& x) {
  const char* X = x.M_->kind() == TiltModel::Kummer ? "xi" : "X";
  for (long i = 0; i < x.order(); ++i) os << (i ? " + " : "") << "[" << x.c_[i] << "]*" << X << "^" << i;
  return os << " mod " << X << "^" << x.order();
}

BdRElement xi_expand(const WRElement& w, long N) {
  const ModelPtr& M = w.model();
  if (!w.exact() && N > 1)
    fail(Errc::PrecisionExhausted,
         "element known only mod p^" + std::to_string(w.w_precision()) + " in W(R); its expansion past Fil^1 is undetermined");
  BdRElement r = BdRElement::zero(M, N);
  std::vector<CSideElement> c(r.coeffs());
  const bool kummer = M->kind() == TiltModel::Kummer;
  for (auto& [e, a] : w.terms()) {
    CSideElement base = theta_monomial(M, e).scale(a);
    for (long i = 0; i < N; ++i) {
      Rational b = binomial(e, i);
      if (b == 0) continue;
      if (kummer) b *= ppow_q(M->prime(), -i);
      c[i] = c[i] + base.scale(konst(M, b));
    }
  }
  if (!w.exact()) c[0] = c[0].cap(w.w_precision());
  if (!congruent(c[0], theta(w)))
    fail(Errc::NonDivisible, "constant term of the expansion differs from θ");
  return BdRElement(M, std::move(c));
}

BdRElement xi_expand(const WittVector<TiltElement>& w, long N) {
  return xi_expand(WRElement::from_witt(w, w[0].model()->prec()), N);
}

// ---- logarithms

LogReport log_series(const BdRElement& z, long target) {
  const ModelPtr& M = z.model();
  const long N = z.order();
  const long p = M->prime();
  LogReport rep;
  BdRElement acc = BdRElement::zero(M, N);
  std::ostringstream cert;
  if (z[0].is_zero()) {
    BdRElement pw = z;
    for (long n = 1; n < N; ++n) {
      acc = acc + pw.scale(Rational(n % 2 ? 1 : -1, n));
      pw = pw * z;
    }
    rep.value = acc;
    rep.terms = N - 1;
    rep.gamma = -1;
    rep.certified_valuation = 0;
    cert << "argument in Fil^1; terms of index >= " << N << " vanish mod Fil^" << N;
    rep.certificate = cert.str();
    return rep;
  }
  Rational gamma = *z[0].valuation();
  if (gamma <= 0)
    fail(Errc::NonConvergent, "constant term has valuation " + to_string(gamma) + " <= 0");
  Rational mu = gamma;
  for (long i = 1; i < N; ++i)
    if (auto v = z[i].valuation()) mu = std::min(mu, *v);
  const Rational loss = Rational(N - 1) * (gamma > mu ? Rational(gamma - mu) : Rational(0));
  // Term n has coefficients of valuation >= nγ - loss - v_p(n). Past n0 with
  // n0·γ >= 3/2 this lower bound is nondecreasing in n.
  auto bound = [&](long n) -> Rational { return Rational(n) * gamma - loss - Rational(floor_log(p, n) + 1); };
  long n0 = 1;
  while (!(Rational(n0) * gamma >= Rational(3, 2) && bound(n0) >= Rational(target))) {
    if (++n0 > 100000) fail(Errc::NonConvergent, "logarithm series needs more than 100000 terms");
  }
  BdRElement pw = z;
  for (long n = 1; n < n0; ++n) {
    acc = acc + pw.scale(Rational(n % 2 ? 1 : -1, n));
    pw = pw * z;
  }
  rep.value = acc;
  rep.terms = n0 - 1;
  rep.gamma = gamma;
  rep.certified_valuation = bound(n0);
  cert << "gamma=" << gamma << " mu=" << mu << "; terms n >= " << n0 << " have valuation >= "
       << rep.certified_valuation;
  rep.certificate = cert.str();
  return rep;
}

BdRElement log_pi(const ModelPtr& M, long N) {
  if (M->kind() != TiltModel::Kummer) fail(Errc::ModelUnsupported, "log[π] needs the kummer model");
  BdRElement r = BdRElement::zero(M, N);
  std::vector<CSideElement> c(r.coeffs());
  for (long n = 1; n < N; ++n) {
    Rational a = Rational(n % 2 ? 1 : -1, n) * ppow_q(M->prime(), -n);
    c[n] = CSideElement::from_k0(c[n].field(), UnramifiedElement::exact(M->field(), a, M->prec()));
  }
  return BdRElement(M, std::move(c));
}

BdRElement t_element(const ModelPtr& M, long N) {
  if (M->kind() != TiltModel::Cyclotomic) fail(Errc::ModelUnsupported, "t = log[ε] needs the cyclotomic model");
  return log_series(BdRElement::uniformizer(M, N), M->prec()).value;
}

LogReport log_unit(const TiltElement& a, long N) {
  const ModelPtr& M = a.model();
  if (a.is_zero()) fail(Errc::NotAUnit, "zero is not a unit");
  FqElement a0 = FqElement::zero(M->field());
  if (M->kind() == TiltModel::Kummer) {
    if (a.terms().begin()->first != 0)
      fail(Errc::NotAUnit, "valuation " + to_string(a.terms().begin()->first) + " != 0");
    a0 = a.terms().begin()->second;
  } else {
    for (auto& [e, c] : a.terms()) a0 = a0 + c;
    if (a0.is_zero()) fail(Errc::NotAUnit, "element lies in the maximal ideal");
  }
  TiltElement plus = a * TiltElement::constant(M, a0.inverse());
  LogReport rep;
  // [a] = [a_0][a+] and log[a_0] = 0 for the root of unity [a_0].
  if (plus == TiltElement::constant(M, FqElement::one(M->field()))) {
    rep.value = BdRElement::zero(M, N);
    rep.certificate = "a+ = 1";
    return rep;
  }
  if (plus.is_monomial()) {
    // kummer monomial units are constants; cyclotomic: log[ε^e] = e·t
    Rational e = plus.terms().begin()->first;
    rep.value = t_element(M, N).scale(e);
    rep.certificate = "log[eps^e] = e*t";
    return rep;
  }
  if (N > 1)
    fail(Errc::PrecisionExhausted, "log of a non-monomial unit is available mod Fil^1 only");
  const long P = std::min(M->prec(), M->depth() - plus.depth() + 1);
  WRElement w = WRElement::teichmuller(plus, P);
  CSideElement z = theta(w) - CSideElement::from_k0(theta(w).field(), UnramifiedElement::exact(M->field(), 1, M->prec()));
  BdRElement zb = BdRElement::from_cside(M, z.cap(P), 1);
  if (zb[0].is_zero()) {
    rep.value = BdRElement::zero(M, 1);
    rep.certificate = "theta([a+]) = 1 mod p^" + std::to_string(P);
    return rep;
  }
  rep = log_series(zb, P);
  std::vector<CSideElement> c = {rep.value[0].cap(P)};
  rep.value = BdRElement(M, std::move(c));
  rep.certificate += "; Teichmüller lift known mod p^" + std::to_string(P);
  return rep;
}

BdRFraction operator*(const BdRFraction& a, const BdRFraction& b) { return {a.num * b.num, a.t_power + b.t_power}; }

// ---- B_st

namespace {

CrisPresentation pres_add(const CrisPresentation& a, const CrisPresentation& b) {
  CrisPresentation r;
  const std::size_t n = std::max(a.t_coeffs.size(), b.t_coeffs.size());
  for (std::size_t k = 0; k < n; ++k) {
    if (k >= a.t_coeffs.size()) r.t_coeffs.push_back(b.t_coeffs[k]);
    else if (k >= b.t_coeffs.size()) r.t_coeffs.push_back(a.t_coeffs[k]);
    else r.t_coeffs.push_back(a.t_coeffs[k] + b.t_coeffs[k]);
  }
  return r;
}

CrisPresentation pres_mul(const CrisPresentation& a, const CrisPresentation& b, const ModelPtr& M) {
  CrisPresentation r;
  if (a.t_coeffs.empty() || b.t_coeffs.empty()) return r;
  r.t_coeffs.assign(a.t_coeffs.size() + b.t_coeffs.size() - 1, WRElement::zero(M));
  for (std::size_t i = 0; i < a.t_coeffs.size(); ++i)
    for (std::size_t j = 0; j < b.t_coeffs.size(); ++j)
      r.t_coeffs[i + j] = r.t_coeffs[i + j] + a.t_coeffs[i] * b.t_coeffs[j];
  return r;
}

CrisPresentation pres_scale(const CrisPresentation& a, const Rational& s, const ModelPtr& M) {
  CrisPresentation r;
  for (auto& x : a.t_coeffs) r.t_coeffs.push_back(x.scale(konst(M, s)));
  return r;
}

BstCoefficient coeff_zero(const ModelPtr& M, long N) { return {BdRElement::zero(M, N), CrisPresentation{}}; }

}  // namespace

BdRElement realize(const CrisPresentation& pres, const ModelPtr& M, long N) {
  BdRElement r = BdRElement::zero(M, N);
  if (pres.t_coeffs.empty()) return r;
  std::optional<BdRElement> t;
  BdRElement tk = BdRElement::rational(M, 1, N);
  for (std::size_t k = 0; k < pres.t_coeffs.size(); ++k) {
    if (k > 0) {
      if (!t) t = t_element(M, N);
      tk = tk * *t;
    }
    r = r + xi_expand(pres.t_coeffs[k], N) * tk;
  }
  return r;
}

CrisPresentation frobenius(const CrisPresentation& pres) {
  CrisPresentation r;
  for (std::size_t k = 0; k < pres.t_coeffs.size(); ++k) {
    const WRElement& a = pres.t_coeffs[k];
    auto pk = UnramifiedElement::exact(a.model()->field(), Rational(ppow(a.model()->prime(), k)), a.model()->prec());
    r.t_coeffs.push_back(a.frobenius().scale(pk));
  }
  return r;
}

BstElement::BstElement(ModelPtr M, long N, std::vector<BstCoefficient> c) : M_(std::move(M)), N_(N), c_(std::move(c)) {
  if (c_.empty()) c_.push_back(coeff_zero(M_, N_));
  if (degree() > M_->config().max_u_degree)
    fail(Errc::DegreeExceeded, "u-degree " + std::to_string(degree()) + " exceeds the configured bound");
}

BstElement BstElement::zero(ModelPtr M, long N) {
  auto c = coeff_zero(M, N);
  return BstElement(std::move(M), N, {c});
}

BstElement BstElement::from_bdr(const BdRElement& v) { return BstElement(v.model(), v.order(), {{v, std::nullopt}}); }

BstElement BstElement::from_presentation(ModelPtr M, const CrisPresentation& pres, long N) {
  BdRElement v = realize(pres, M, N);
  return BstElement(std::move(M), N, {{v, pres}});
}

BstElement BstElement::u(ModelPtr M, long N) {
  CrisPresentation one{{WRElement::rational(M, 1)}};
  BstCoefficient c1{BdRElement::rational(M, 1, N), one};
  return BstElement(M, N, {coeff_zero(M, N), c1});
}

BstElement operator+(const BstElement& a, const BstElement& b) {
  same_model(a.M_, b.M_);
  const long N = std::min(a.N_, b.N_);
  std::vector<BstCoefficient> c;
  const std::size_t n = std::max(a.c_.size(), b.c_.size());
  for (std::size_t j = 0; j < n; ++j) {
    BstCoefficient x = j < a.c_.size() ? a.c_[j] : coeff_zero(a.M_, N);
    BstCoefficient y = j < b.c_.size() ? b.c_[j] : coeff_zero(a.M_, N);
    BstCoefficient s{(x.value + y.value).truncate(N), std::nullopt};
    if (x.pres && y.pres) s.pres = pres_add(*x.pres, *y.pres);
    c.push_back(std::move(s));
  }
  return BstElement(a.M_, N, std::move(c));
}

BstElement BstElement::scale(const Rational& s) const {
  std::vector<BstCoefficient> c;
  for (auto& x : c_) {
    BstCoefficient y{x.value.scale(s), std::nullopt};
    if (x.pres) y.pres = pres_scale(*x.pres, s, M_);
    c.push_back(std::move(y));
  }
  return BstElement(M_, N_, std::move(c));
}

BstElement operator-(const BstElement& a, const BstElement& b) { return a + b.scale(-1); }

BstElement operator*(const BstElement& a, const BstElement& b) {
  same_model(a.M_, b.M_);
  const long N = std::min(a.N_, b.N_);
  const std::size_t n = a.c_.size() + b.c_.size() - 1;
  if (static_cast<long>(n) - 1 > a.M_->config().max_u_degree)
    fail(Errc::DegreeExceeded, "product has u-degree " + std::to_string(n - 1) + " beyond the configured bound");
  std::vector<BstCoefficient> c(n, coeff_zero(a.M_, N));
  std::vector<bool> presented(n, true);
  for (std::size_t i = 0; i < a.c_.size(); ++i)
    for (std::size_t j = 0; j < b.c_.size(); ++j) {
      auto& slot = c[i + j];
      slot.value = (slot.value + a.c_[i].value * b.c_[j].value).truncate(N);
      if (a.c_[i].pres && b.c_[j].pres && presented[i + j])
        slot.pres = pres_add(*slot.pres, pres_mul(*a.c_[i].pres, *b.c_[j].pres, a.M_));
      else
        presented[i + j] = false;
    }
  for (std::size_t k = 0; k < n; ++k)
    if (!presented[k]) c[k].pres.reset();
  return BstElement(a.M_, N, std::move(c));
}

bool congruent(const BstElement& a, const BstElement& b) {
  BstElement d = a - b;
  for (auto& x : d.c_)
    if (!x.value.is_zero()) return false;
  return true;
}

BstElement bst_action(const BstElement& x, BstAction which) {
  const ModelPtr& M = x.model();
  const long N = x.order();
  std::vector<BstCoefficient> c;
  if (which == BstAction::N) {
    // N(Σ c_j u^j) = -Σ j c_j u^(j-1)
    for (long j = 1; j <= x.degree(); ++j) {
      const auto& cj = x.coeffs()[j];
      BstCoefficient y{cj.value.scale(Rational(-j)), std::nullopt};
      if (cj.pres) y.pres = pres_scale(*cj.pres, Rational(-j), M);
      c.push_back(std::move(y));
    }
    if (c.empty()) c.push_back(coeff_zero(M, N));
    return BstElement(M, N, std::move(c));
  }
  // φ(Σ c_j u^j) = Σ φ(c_j) p^j u^j
  for (long j = 0; j <= x.degree(); ++j) {
    const auto& cj = x.coeffs()[j];
    if (!cj.pres)
      fail(Errc::PhiUnavailable, "coefficient of u^" + std::to_string(j) + " has no W(R)-level presentation");
    CrisPresentation fp = pres_scale(frobenius(*cj.pres), Rational(ppow(M->prime(), j)), M);
    c.push_back({realize(fp, M, N), fp});
  }
  return BstElement(M, N, std::move(c));
}

BdRElement bst_to_bdr(const BstElement& x) {
  const ModelPtr& M = x.model();
  BdRElement u = log_pi(M, x.order());
  BdRElement r = BdRElement::zero(M, x.order());
  BdRElement uk = BdRElement::rational(M, 1, x.order());
  for (long j = 0; j <= x.degree(); ++j) {
    r = r + x.coeffs()[j].value * uk;
    uk = uk * u;
  }
  return r;
}

}  // namespace phodge
