#include "phodge/tilt.hpp"

namespace phodge {

std::string_view model_name(TiltModel m) { return m == TiltModel::Kummer ? "kummer" : "cyclotomic"; }

TiltModel parse_model(std::string_view s) {
  if (s == "kummer") return TiltModel::Kummer;
  if (s == "cyclotomic") return TiltModel::Cyclotomic;
  fail(Errc::SchemaError, "unknown model '" + std::string(s) + "'");
}

PeriodModel::PeriodModel(PeriodConfig c) : c_(c) {
  if (!is_prime(c_.p)) fail(Errc::InvalidArgument, "p = " + std::to_string(c_.p) + " is not prime");
  if (c_.depth < 0 || c_.prec < 1 || c_.cutoff < 1 || c_.max_order < 1)
    fail(Errc::InvalidArgument, "period model parameters out of range");
  K_ = UnramifiedField::get(c_.p, c_.f);
}

long PeriodModel::raw_depth(const Rational& e) const {
  Integer d = e.get_den();
  long k = 0;
  while (d > 1) {
    if (!mpz_divisible_ui_p(d.get_mpz_t(), static_cast<unsigned long>(c_.p)))
      fail(Errc::InvalidArgument, "exponent " + to_string(e) + " is not in Z[1/p]");
    mpz_divexact_ui(d.get_mpz_t(), d.get_mpz_t(), static_cast<unsigned long>(c_.p));
    ++k;
  }
  return k;
}

long PeriodModel::exponent_depth(const Rational& e) const {
  long k = raw_depth(e);
  if (k > c_.depth)
    fail(Errc::DepthExceeded, "exponent " + to_string(e) + " needs perfection depth " + std::to_string(k) +
                                  " > " + std::to_string(c_.depth));
  return k;
}

TiltElement TiltElement::constant(ModelPtr M, const FqElement& c) {
  TiltElement x(std::move(M));
  x.add_term(0, c);
  return x;
}

TiltElement TiltElement::monomial(ModelPtr M, const FqElement& c, const Rational& e) {
  M->exponent_depth(e);
  if (M->kind() == TiltModel::Kummer && e < 0)
    fail(Errc::InvalidArgument, "kummer tilt exponents are nonnegative");
  TiltElement x(std::move(M));
  x.add_term(e, c);
  x.truncate();
  return x;
}

TiltElement TiltElement::generator(ModelPtr M) {
  auto one = FqElement::one(M->field());
  return monomial(std::move(M), one, 1);
}

void TiltElement::add_term(const Rational& e, const FqElement& c) {
  if (c.is_zero()) return;
  auto it = t_.find(e);
  if (it == t_.end()) {
    t_.emplace(e, c);
    return;
  }
  it->second = it->second + c;
  if (it->second.is_zero()) t_.erase(it);
}

void TiltElement::truncate() {
  if (M_->kind() != TiltModel::Kummer) return;
  const Rational cut(M_->config().cutoff);
  auto it = t_.lower_bound(cut);
  if (it != t_.end()) {
    exact_ = false;
    t_.erase(it, t_.end());
  }
}

std::optional<Rational> TiltElement::valuation() const {
  if (t_.empty()) return std::nullopt;
  if (M_->kind() == TiltModel::Kummer) return t_.begin()->first;
  // ε^e are units; a combination is a unit unless its coefficients sum to 0.
  FqElement s = FqElement::zero(M_->field());
  for (auto& [e, c] : t_) s = s + c;
  if (!s.is_zero()) return Rational(0);
  fail(Errc::ModelUnsupported, "valuation of a non-unit cyclotomic tilt element");
}

long TiltElement::depth() const {
  long d = 0;
  for (auto& [e, c] : t_) d = std::max(d, M_->raw_depth(e));
  return d;
}

namespace {
void same_model(const TiltElement& a, const TiltElement& b) {
  if (a.model() != b.model() && (a.model()->kind() != b.model()->kind() || a.model()->prime() != b.model()->prime()))
    fail(Errc::CoefficientMismatch, "tilt elements from different models");
}
}  // namespace

TiltElement operator+(const TiltElement& a, const TiltElement& b) {
  same_model(a, b);
  TiltElement r = a;
  for (auto& [e, c] : b.t_) r.add_term(e, c);
  r.exact_ = a.exact_ && b.exact_;
  return r;
}

TiltElement TiltElement::operator-() const {
  TiltElement r(M_);
  for (auto& [e, c] : t_) r.t_.emplace(e, -c);
  r.exact_ = exact_;
  return r;
}

TiltElement operator-(const TiltElement& a, const TiltElement& b) { return a + (-b); }

TiltElement operator*(const TiltElement& a, const TiltElement& b) {
  same_model(a, b);
  TiltElement r(a.M_);
  const bool kummer = a.M_->kind() == TiltModel::Kummer;
  const Rational cut(a.M_->config().cutoff);
  bool dropped = false;
  for (auto& [ea, ca] : a.t_)
    for (auto& [eb, cb] : b.t_) {
      Rational e = ea + eb;
      if (kummer && e >= cut) {
        dropped = true;
        continue;
      }
      r.add_term(e, ca * cb);
    }
  // a product of inexact factors is inexact
  r.exact_ = a.exact_ && b.exact_ && !dropped;
  if (a.t_.empty() || b.t_.empty()) r.exact_ = true;
  return r;
}

TiltElement TiltElement::frobenius() const {
  TiltElement r(M_);
  for (auto& [e, c] : t_) r.add_term(e * M_->prime(), c.frobenius());
  r.exact_ = exact_;
  r.truncate();
  r.exact_ = exact_ && r.exact_;
  return r;
}

TiltElement TiltElement::root_p() const {
  TiltElement r(M_);
  for (auto& [e, c] : t_) {
    Rational ne = e / M_->prime();
    M_->exponent_depth(ne);
    r.add_term(ne, c.frobenius_inverse());
  }
  r.exact_ = exact_;
  return r;
}

TiltElement TiltElement::pow(long n) const {
  if (n < 0) fail(Errc::InvalidArgument, "negative power of a tilt element");
  TiltElement r = constant(M_, FqElement::one(M_->field()));
  for (long i = 0; i < n; ++i) r = r * *this;
  return r;
}

std::ostream& operator<<(std::ostream& os, const TiltElement& x) {
  if (x.t_.empty()) return os << "0";
  const char* g = x.M_->kind() == TiltModel::Kummer ? "pi" : "eps";
  bool first = true;
  for (auto& [e, c] : x.t_) {
    os << (first ? "" : " + ") << c << "*" << g << "^" << e;
    first = false;
  }
  return os;
}

}  // namespace phodge
