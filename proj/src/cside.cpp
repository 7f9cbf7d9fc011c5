#include "phodge/cside.hpp"

#include <mutex>

namespace phodge {

namespace {

long ipow(long p, long k) {
  long r = 1;
  for (long i = 0; i < k; ++i) r *= p;
  return r;
}

}  // namespace

CSideField::CSideField(TiltModel kind, FieldPtr K, long M) : kind_(kind), K_(std::move(K)), M_(M) {
  const long p = K_->prime();
  if (ipow(p, M) > 4096) fail(Errc::DepthExceeded, "C-side field of depth " + std::to_string(M) + " is too large");
  const long pm = ipow(p, M);
  dim_ = kind == TiltModel::Kummer ? pm : (M == 0 ? 1 : pm - pm / p);
  table_.resize(dim_ * dim_);
  carry_.assign(dim_ * dim_, 0);
  for (long i = 0; i < dim_; ++i)
    for (long j = 0; j < dim_; ++j) {
      auto& t = table_[i * dim_ + j];
      if (kind == TiltModel::Kummer) {
        long s = i + j;
        if (s >= dim_) {
          s -= dim_;
          carry_[i * dim_ + j] = 1;
        }
        t.push_back({s, 1});
      } else {
        t = zeta_power(Integer(i + j));
      }
    }
}

std::vector<CSideField::Term> CSideField::zeta_power(const Integer& k) const {
  const long p = K_->prime();
  const long pm = ipow(p, M_);
  long s = mod_floor(k, Integer(pm)).get_si();
  if (s < dim_) return {{s, 1}};
  // ζ^(φ + r) = -Σ_{j=0}^{p-2} ζ^(r + j p^(M-1))
  const long r = s - dim_, step = pm / p;
  std::vector<Term> out;
  for (long j = 0; j <= p - 2; ++j) out.push_back({r + j * step, -1});
  return out;
}

const std::vector<CSideField::Term>& CSideField::product(long i, long j, long& carry) const {
  carry = carry_[i * dim_ + j];
  return table_[i * dim_ + j];
}

std::vector<CSideField::Term> CSideField::embed_index(long i, long target) const {
  const long scale = ipow(K_->prime(), target - M_);
  if (kind_ == TiltModel::Kummer) return {{i * scale, 1}};
  return get(kind_, K_, target)->zeta_power(Integer(i * scale));
}

CSidePtr CSideField::get(TiltModel kind, const FieldPtr& K, long M) {
  static std::mutex mu;
  static std::map<std::tuple<int, long, long, long>, CSidePtr> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{static_cast<int>(kind), K->prime(), K->degree(), M}];
  if (!slot) slot = std::make_shared<const CSideField>(kind, K, M);
  return slot;
}

// ---- elements

CSideElement CSideElement::from_k0(CSidePtr F, const UnramifiedElement& x) { return basis(std::move(F), 0, x); }

CSideElement CSideElement::basis(CSidePtr F, long index, const UnramifiedElement& coeff) {
  CSideElement r(std::move(F));
  r.c_.emplace(index, coeff);
  return r;
}

CSideElement CSideElement::from_coeffs(CSidePtr F, std::map<long, UnramifiedElement> c) {
  for (auto& [i, x] : c)
    if (i < 0 || i >= F->dim()) fail(Errc::LengthMismatch, "basis index out of range");
  CSideElement r(std::move(F));
  r.c_ = std::move(c);
  return r;
}

std::optional<UnramifiedElement> CSideElement::coeff(long index) const {
  auto it = c_.find(index);
  if (it == c_.end()) return std::nullopt;
  return it->second;
}

void CSideElement::add_to(long index, const UnramifiedElement& v) {
  auto it = c_.find(index);
  if (it == c_.end())
    c_.emplace(index, v);
  else
    it->second = it->second + v;
}

bool CSideElement::is_zero() const {
  for (auto& [i, x] : c_)
    if (!x.is_zero()) return false;
  return true;
}

std::optional<Rational> CSideElement::precision() const {
  std::optional<Rational> r;
  for (auto& [i, x] : c_) {
    Rational v = Rational(x.abs_precision());
    if (F_->kind() == TiltModel::Kummer) v += Rational(i, F_->ram());
    if (!r || v < *r) r = v;
  }
  if (r) r->canonicalize();
  return r;
}

std::optional<Rational> CSideElement::valuation() const {
  std::optional<Rational> best;
  auto consider = [&](const UnramifiedElement& x, long j) {
    auto v = x.valuation();
    if (!v) return;
    Rational w = Rational(*v) + Rational(j, F_->ram());
    w.canonicalize();
    if (!best || w < *best) best = w;
  };
  if (F_->kind() == TiltModel::Kummer) {
    for (auto& [i, x] : c_) consider(x, i);
    return best;
  }
  if (c_.empty()) return std::nullopt;
  // d_j = Σ_k c_k binom(k, j): coordinates in the basis (ζ - 1)^j.
  const long n = F_->dim();
  const long prec = c_.begin()->second.field()->cap();
  for (long j = 0; j < n; ++j) {
    std::optional<UnramifiedElement> d;
    for (auto& [k, x] : c_) {
      if (k < j) continue;
      Integer b;
      mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(k), static_cast<unsigned long>(j));
      UnramifiedElement term = x.scale(PadicNumber::exact(F_->prime(), Rational(b), prec));
      d = d ? *d + term : term;
    }
    if (d) consider(*d, j);
  }
  return best;
}

CSideElement CSideElement::lift_to(long depth) const {
  if (depth == F_->depth()) return *this;
  if (depth < F_->depth()) fail(Errc::InvalidArgument, "cannot lower the depth of a C-side element");
  CSideElement r(CSideField::get(F_->kind(), F_->field(), depth));
  for (auto& [i, x] : c_)
    for (auto& t : F_->embed_index(i, depth)) r.add_to(t.index, t.sign > 0 ? x : -x);
  return r;
}

CSideElement CSideElement::cap(long n) const {
  CSideElement r(F_);
  for (auto& [i, x] : c_) r.c_.emplace(i, x.cap(n));
  return r;
}

namespace {

void check_compatible(const CSideElement& a, const CSideElement& b) {
  if (a.field()->kind() != b.field()->kind() || a.field()->prime() != b.field()->prime() ||
      a.field()->field()->degree() != b.field()->field()->degree())
    fail(Errc::CoefficientMismatch, "C-side elements from different models");
}

}  // namespace

CSideElement operator+(const CSideElement& a, const CSideElement& b) {
  check_compatible(a, b);
  const long d = std::max(a.F_->depth(), b.F_->depth());
  CSideElement r = a.lift_to(d);
  CSideElement bb = b.lift_to(d);
  for (auto& [i, x] : bb.c_) r.add_to(i, x);
  return r;
}

CSideElement CSideElement::operator-() const {
  CSideElement r(F_);
  for (auto& [i, x] : c_) r.c_.emplace(i, -x);
  return r;
}

CSideElement operator-(const CSideElement& a, const CSideElement& b) { return a + (-b); }

CSideElement operator*(const CSideElement& a, const CSideElement& b) {
  check_compatible(a, b);
  const long d = std::max(a.F_->depth(), b.F_->depth());
  CSideElement x = a.lift_to(d), y = b.lift_to(d);
  CSideElement r(x.F_);
  const long p = x.F_->prime();
  for (auto& [i, u] : x.c_)
    for (auto& [j, v] : y.c_) {
      long carry = 0;
      const auto& terms = x.F_->product(i, j, carry);
      UnramifiedElement uv = u * v;
      if (carry) uv = uv.scale(PadicNumber::exact(p, Rational(p), uv.field()->cap()));
      for (auto& t : terms) r.add_to(t.index, t.sign > 0 ? uv : -uv);
    }
  return r;
}

CSideElement CSideElement::scale(const UnramifiedElement& s) const {
  CSideElement r(F_);
  for (auto& [i, x] : c_) r.c_.emplace(i, x * s);
  return r;
}

CSideElement CSideElement::pow(long n) const {
  if (n < 1) fail(Errc::InvalidArgument, "C-side powers need n >= 1");
  CSideElement base = *this;
  std::optional<CSideElement> r;
  for (long k = n; k > 0; k >>= 1) {
    if (k & 1) r = r ? *r * base : base;
    if (k > 1) base = base * base;
  }
  return *r;
}

bool operator==(const CSideElement& a, const CSideElement& b) {
  return a.F_->depth() == b.F_->depth() && a.c_ == b.c_;
}

std::ostream& operator<<(std::ostream& os, const CSideElement& x) {
  if (x.c_.empty()) return os << "0";
  const char* g = x.F_->kind() == TiltModel::Kummer ? "rho" : "zeta";
  bool first = true;
  for (auto& [i, c] : x.c_) {
    os << (first ? "" : " + ") << "(" << c << ")";
    if (i) os << "*" << g << x.F_->depth() << "^" << i;
    first = false;
  }
  return os;
}

}  // namespace phodge
