#include <random>

#include "doctest.h"
#include "phodge/qpoly.hpp"

using namespace phodge;

namespace {

QPoly P(std::initializer_list<long> c) {
  QPoly r;
  for (long x : c) r.emplace_back(x);
  qpoly::trim(r);
  return r;
}

// A polynomial of degree <= 3 over Q is irreducible iff it has no rational
// root; rational roots are found by the rational root test.
bool small_irreducible(const QPoly& g) {
  long n = qpoly::degree(g);
  if (n <= 1) return true;
  Integer den = 1;
  for (auto& c : g) den = lcm(den, Integer(c.get_den()));
  std::vector<Integer> z;
  for (auto& c : g) z.push_back(Integer(c * den));
  Integer a0 = abs(z.front()), an = abs(z.back());
  if (a0 == 0) return false;
  for (Integer u = 1; u <= a0; ++u) {
    if (a0 % u != 0) continue;
    for (Integer v = 1; v <= an; ++v) {
      if (an % v != 0) continue;
      for (int s : {1, -1})
        if (qpoly::eval(g, Rational(s * u, v)) == 0) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("arithmetic") {
  QPoly a = P({1, 2, 3}), b = P({-1, 1});
  QPoly q, r;
  qpoly::divmod(a, b, q, r);
  CHECK(qpoly::add(qpoly::mul(q, b), r) == a);
  CHECK(qpoly::gcd(qpoly::mul(a, b), qpoly::mul(b, b)) == b);
  QPoly s, t;
  QPoly g = qpoly::xgcd(a, b, s, t);
  CHECK(qpoly::add(qpoly::mul(s, a), qpoly::mul(t, b)) == g);
  CHECK(qpoly::to_string(P({-1, 0, 2})) == "2X^2 - 1");
}

TEST_CASE("factoring over Q") {
  QPoly f = qpoly::mul(qpoly::mul(P({1, 0, 1}), P({-3, 1})), qpoly::mul(P({-2, 0, 0, 1}), P({-2, 0, 1})));
  auto fs = qpoly::factor(f);
  REQUIRE(fs.size() == 4);
  CHECK(fs[0].poly == P({-3, 1}));
  CHECK(fs[1].poly == P({-2, 0, 1}));
  CHECK(fs[2].poly == P({1, 0, 1}));
  CHECK(fs[3].poly == P({-2, 0, 0, 1}));
  // X^4 + 1 is irreducible over Q but reducible mod every prime
  auto c = qpoly::factor(P({1, 0, 0, 0, 1}));
  REQUIRE(c.size() == 1);
  CHECK(c[0].poly == P({1, 0, 0, 0, 1}));
  auto m = qpoly::factor(qpoly::mul(P({1, 1}), qpoly::mul(P({1, 1}), P({5, 0, 1}))));
  REQUIRE(m.size() == 2);
  CHECK(m[0].mult == 2);
}

TEST_CASE("random factorizations") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> d(-9, 9);
  for (int t = 0; t < 150; ++t) {
    QPoly f = {Rational(1)};
    int k = 1 + t % 4;
    for (int i = 0; i < k; ++i) {
      QPoly g;
      int deg = 1 + static_cast<int>(rng() % 3);
      for (int j = 0; j < deg; ++j) g.emplace_back(d(rng));
      g.emplace_back(1 + static_cast<int>(rng() % 3));
      qpoly::trim(g);
      if (qpoly::degree(g) <= 0) continue;
      f = qpoly::mul(f, g);
    }
    if (qpoly::degree(f) <= 0) continue;
    auto fs = qpoly::factor(f);
    QPoly prod = {Rational(1)};
    for (auto& x : fs) {
      if (qpoly::degree(x.poly) <= 3) CHECK(small_irreducible(x.poly));
      for (long e = 0; e < x.mult; ++e) prod = qpoly::mul(prod, x.poly);
    }
    CHECK(prod == qpoly::monic(f));
  }
}

TEST_CASE("root valuations") {
  auto v = [](std::initializer_list<long> xs) {
    std::vector<std::optional<Rational>> out;
    for (long x : xs) out.emplace_back(x < 0 ? std::nullopt : std::optional<Rational>(Rational(x)));
    return out;
  };
  // X^2 + p
  auto r = qpoly::root_valuations(v({1, -1, 0}));
  CHECK(*r[0] == Rational(1, 2));
  CHECK(*r[1] == Rational(1, 2));
  // (X - 1)(X - p): p, -(1+p), 1
  r = qpoly::root_valuations(v({1, 0, 0}));
  CHECK(*r[0] == 0);
  CHECK(*r[1] == 1);
  r = qpoly::root_valuations(v({-1, 2, 0}));
  CHECK(!r[1]);
  CHECK(*r[0] == 2);
}

TEST_CASE("Q_p irreducibility certificates") {
  CHECK(qpoly::qp_irreducible(P({3, 0, 1}), 3)->irreducible);
  CHECK_FALSE(qpoly::qp_irreducible(P({-17, 0, 1}), 2)->irreducible);
  CHECK(qpoly::qp_irreducible(P({-5, 0, 0, 1}), 5)->irreducible);
  CHECK(qpoly::qp_irreducible(P({1, 1, 1}), 2)->irreducible);
  CHECK(qpoly::qp_irreducible(P({1, 1, 1}), 3)->irreducible);
  CHECK_FALSE(qpoly::qp_irreducible(P({1, 1, 1}), 7)->irreducible);
  CHECK(qpoly::qp_irreducible(P({1, 1, 0, 1}), 2)->irreducible);
  CHECK_FALSE(qpoly::qp_irreducible(P({2, 0, 0, 1}), 3)->irreducible == true);
  CHECK(qpoly::is_qp_square(Rational(-1), 5));
  CHECK_FALSE(qpoly::is_qp_square(Rational(-1), 3));
  CHECK(qpoly::is_qp_square(Rational(-7), 2));
  CHECK(qpoly::is_qp_square(Rational(4, 9), 3));
}
