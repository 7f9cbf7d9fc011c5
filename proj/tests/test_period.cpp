#include <random>

#include "doctest.h"
#include "phodge/period.hpp"

using namespace phodge;

namespace {

ModelPtr model(TiltModel kind, long p, long depth = 2, long prec = 12) {
  PeriodConfig c;
  c.kind = kind;
  c.p = p;
  c.depth = depth;
  c.prec = prec;
  return PeriodModel::make(c);
}

UnramifiedElement k0(const ModelPtr& M, const Rational& r) { return UnramifiedElement::exact(M->field(), r, M->prec()); }

CSideElement cs(const ModelPtr& M, const Rational& r) {
  return CSideElement::from_k0(CSideField::get(M->kind(), M->field(), 0), k0(M, r));
}

WRElement random_wr(const ModelPtr& M, std::mt19937_64& rng) {
  WRElement w = WRElement::zero(M);
  const long p = M->prime();
  int terms = 1 + static_cast<int>(rng() % 3);
  for (int i = 0; i < terms; ++i) {
    long k = static_cast<long>(rng() % (M->depth() + 1));
    long pk = 1;
    for (long j = 0; j < k; ++j) pk *= p;
    long num = static_cast<long>(rng() % (3 * pk));
    if (M->kind() == TiltModel::Cyclotomic) num -= static_cast<long>(pk);
    Rational e(num, pk);
    e.canonicalize();
    long c = static_cast<long>(rng() % 50) - 25;
    if (c == 0) c = 1;
    w = w + WRElement::monomial(M, k0(M, c), e);
  }
  return w;
}

// Coefficients of the truncated series are compared one by one.
bool same_series(const BdRElement& a, const BdRElement& b) { return congruent(a, b); }

}  // namespace

TEST_CASE("theta on the generators") {
  for (long p : {2L, 3L, 5L}) {
    auto K = model(TiltModel::Kummer, p);
    auto pi = WRElement::monomial(K, k0(K, 1), 1);
    CHECK(congruent(theta(pi), cs(K, p)));
    CHECK(theta(WRElement::uniformizer(K)).is_zero());
    CHECK(theta(WRElement::uniformizer(K)).precision() >= Rational(12));
    auto C = model(TiltModel::Cyclotomic, p);
    auto eps = WRElement::monomial(C, k0(C, 1), 1);
    CHECK(congruent(theta(eps), cs(C, 1)));
    // θ([ε^(1/p)]) is a primitive p-th root of unity
    auto z = theta(WRElement::monomial(C, k0(C, 1), Rational(1, p)));
    CHECK(!congruent(z, cs(C, 1)));
    CHECK(congruent(z.pow(p), cs(C, 1)));
  }
}

TEST_CASE("theta of Witt vectors over the tilt") {
  auto K = model(TiltModel::Kummer, 3);
  auto one = FqElement::one(K->field());
  auto pi = TiltElement::generator(K);
  // (π, 0) -> θ([π]) = p
  WittVector<TiltElement> w(3, {pi, TiltElement::zero(K)});
  CHECK(congruent(theta(w, 12), cs(K, 3)));
  // (0, π^3) -> p·θ([π]) = p^2
  WittVector<TiltElement> v(3, {TiltElement::zero(K), TiltElement::monomial(K, one, 3)});
  CHECK(congruent(theta(v, 12), cs(K, 9)));
  // ring map on Witt sums: θ(a + b) = θ(a) + θ(b)
  WittVector<TiltElement> a(3, {TiltElement::monomial(K, one, 1), TiltElement::zero(K)});
  WittVector<TiltElement> b(3, {TiltElement::monomial(K, one, 2), TiltElement::zero(K)});
  auto s = a + b;  // first component π + π^2 is not a monomial: approximation
  CHECK_THROWS_AS(theta(s, 12), Error);
  auto model4 = model(TiltModel::Kummer, 2, 4);
  auto one2 = FqElement::one(model4->field());
  WittVector<TiltElement> a2(2, {TiltElement::monomial(model4, one2, 1), TiltElement::zero(model4)});
  WittVector<TiltElement> b2(2, {TiltElement::monomial(model4, one2, 2), TiltElement::zero(model4)});
  auto s2 = a2 + b2;
  auto ts = theta(s2, 3);
  CHECK(congruent(ts, theta(a2, 3) + theta(b2, 3)));
  CHECK(ts.precision() == Rational(3));
}

TEST_CASE("theta is a ring map on random model elements") {
  std::mt19937_64 rng(7);
  for (auto kind : {TiltModel::Kummer, TiltModel::Cyclotomic})
    for (long p : {2L, 3L, 5L}) {
      auto M = model(kind, p);
      for (int it = 0; it < 20; ++it) {
        auto v = random_wr(M, rng), w = random_wr(M, rng);
        CHECK(congruent(theta(v * w), theta(v) * theta(w)));
        CHECK(congruent(theta(v + w), theta(v) + theta(w)));
      }
    }
}

TEST_CASE("xi expansions of small elements") {
  auto M = model(TiltModel::Kummer, 5);
  auto pi = WRElement::monomial(M, k0(M, 1), 1);
  auto e1 = xi_expand(pi, 3);
  CHECK(congruent(e1[0], cs(M, 5)));
  CHECK(congruent(e1[1], cs(M, 1)));
  CHECK(e1[2].is_zero());
  auto e2 = xi_expand(pi * pi, 3);
  CHECK(congruent(e2[0], cs(M, 25)));
  CHECK(congruent(e2[1], cs(M, 10)));
  CHECK(congruent(e2[2], cs(M, 1)));
  auto ex = xi_expand(WRElement::uniformizer(M), 3);
  CHECK(ex[0].is_zero());
  CHECK(congruent(ex[1], cs(M, 1)));
  CHECK(ex[2].is_zero());
}

TEST_CASE("fractional powers satisfy their defining equation") {
  // Oracle: Y = expansion of [π^(1/p^k)] must satisfy Y^(p^k) = p + ξ in the
  // truncated ring, checked by repeated multiplication.
  for (long p : {2L, 3L}) {
    auto M = model(TiltModel::Kummer, p, 2);
    for (long k = 1; k <= 2; ++k) {
      long pk = k == 1 ? p : p * p;
      auto y = xi_expand(WRElement::monomial(M, k0(M, 1), Rational(1, pk)), 5);
      auto lhs = y.pow(pk);
      auto rhs = xi_expand(WRElement::monomial(M, k0(M, 1), 1), 5);
      CHECK(same_series(lhs, rhs));
    }
    auto C = model(TiltModel::Cyclotomic, p, 2);
    auto y = xi_expand(WRElement::monomial(C, k0(C, 1), Rational(1, p)), 5);
    CHECK(same_series(y.pow(p), xi_expand(WRElement::monomial(C, k0(C, 1), 1), 5)));
  }
}

TEST_CASE("xi_expand is multiplicative and additive") {
  std::mt19937_64 rng(9);
  for (auto kind : {TiltModel::Kummer, TiltModel::Cyclotomic}) {
    auto M = model(kind, 3);
    for (int it = 0; it < 10; ++it) {
      auto v = random_wr(M, rng), w = random_wr(M, rng);
      CHECK(same_series(xi_expand(v * w, 4), xi_expand(v, 4) * xi_expand(w, 4)));
      CHECK(same_series(xi_expand(v + w, 4), xi_expand(v, 4) + xi_expand(w, 4)));
    }
  }
}

TEST_CASE("log[pi] series") {
  for (long p : {2L, 3L, 5L}) {
    auto M = model(TiltModel::Kummer, p);
    auto l3 = log_pi(M, 3);
    CHECK(l3[0].is_zero());
    CHECK(congruent(l3[1], cs(M, Rational(1, p))));
    CHECK(congruent(l3[2], cs(M, Rational(-1, 2 * p * p))));
    CHECK(log_pi(M, 1).is_zero());
    // agrees with the generic logarithm of [π]/p = 1 + ξ/p
    auto z = BdRElement::uniformizer(M, 6).scale(Rational(1, p));
    CHECK(congruent(log_series(z, 12).value, log_pi(M, 6)));
  }
  CHECK_THROWS_AS(log_pi(model(TiltModel::Cyclotomic, 3), 3), Error);
}

TEST_CASE("t = log[eps]") {
  for (long p : {2L, 3L, 5L}) {
    auto M = model(TiltModel::Cyclotomic, p);
    auto t = t_element(M, 5);
    CHECK(t[0].is_zero());
    CHECK(congruent(t.truncate(2), BdRElement::uniformizer(M, 2)));
    CHECK(congruent(t[2], cs(M, Rational(-1, 2))));
    auto eps = TiltElement::generator(M);
    CHECK(congruent(log_unit(eps, 5).value, t));
    CHECK(congruent(log_unit(eps * eps, 5).value, t.scale(2)));
    CHECK(log_unit(TiltElement::constant(M, FqElement::one(M->field())), 5).value.is_zero());
    CHECK_THROWS_AS(log_unit(TiltElement::zero(M), 3), Error);
  }
}

TEST_CASE("log of non-monomial units mod Fil^1") {
  auto M = model(TiltModel::Kummer, 2, 4);
  auto one = FqElement::one(M->field());
  auto pi = TiltElement::generator(M);
  auto a = TiltElement::constant(M, one) + pi;
  auto b = TiltElement::constant(M, one) + pi * pi;
  auto la = log_unit(a, 1), lb = log_unit(b, 1), lab = log_unit(a * b, 1);
  CHECK(congruent(lab.value, la.value + lb.value));
  CHECK(!la.certificate.empty());
  CHECK_THROWS_AS(log_unit(a, 2), Error);
  CHECK_THROWS_AS(log_unit(pi, 1), Error);
}

TEST_CASE("B_st actions") {
  std::mt19937_64 rng(21);
  auto C = model(TiltModel::Cyclotomic, 3);
  const long N = 4;
  auto t = BstElement::from_presentation(C, CrisPresentation{{WRElement::zero(C), WRElement::rational(C, 1)}}, N);
  auto u = BstElement::u(C, N);
  auto tu = t * u;
  CHECK(congruent(bst_action(tu, BstAction::Phi), tu.scale(9)));
  CHECK(congruent(bst_action(u, BstAction::N), BstElement::from_bdr(BdRElement::rational(C, -1, N))));
  auto rnd = [&](const ModelPtr& M) {
    std::vector<BstCoefficient> c;
    long deg = static_cast<long>(rng() % 3);
    for (long j = 0; j <= deg; ++j) {
      CrisPresentation pr;
      long tdeg = M->kind() == TiltModel::Cyclotomic ? static_cast<long>(rng() % 2) : 0;
      for (long k = 0; k <= tdeg; ++k) pr.t_coeffs.push_back(random_wr(M, rng));
      c.push_back({realize(pr, M, N), pr});
    }
    return BstElement(M, N, c);
  };
  for (auto M : {C, model(TiltModel::Kummer, 2)}) {
    for (int it = 0; it < 8; ++it) {
      auto x = rnd(M), y = rnd(M);
      auto lhs = bst_action(bst_action(x, BstAction::Phi), BstAction::N);
      auto rhs = bst_action(bst_action(x, BstAction::N), BstAction::Phi).scale(M->prime());
      CHECK(congruent(lhs, rhs));
      auto leib = bst_action(x * y, BstAction::N);
      CHECK(congruent(leib, bst_action(x, BstAction::N) * y + x * bst_action(y, BstAction::N)));
      CHECK(congruent(bst_action(x * y, BstAction::Phi), bst_action(x, BstAction::Phi) * bst_action(y, BstAction::Phi)));
    }
  }
  auto bare = BstElement::from_bdr(BdRElement::rational(C, 1, N));
  CHECK_THROWS_AS(bst_action(bare, BstAction::Phi), Error);
}
