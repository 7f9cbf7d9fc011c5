#include <random>

#include "doctest.h"
#include "phodge/errors.hpp"
#include "phodge/unramified.hpp"

using namespace phodge;

namespace {

PadicNumber rand_padic(std::mt19937_64& rng, long p, long prec) {
  long v = static_cast<long>(rng() % 4) - 1;
  Integer u = 0;
  for (long i = 0; i < prec; ++i) u = u * p + static_cast<long>(rng() % p);
  return PadicNumber::from_rational(p, Rational(u) * ppow_q(p, v), prec + v);
}

}  // namespace

TEST_CASE("valuation of 25 times a unit") {
  auto x = PadicNumber::from_integer(5, 25 * 7, 10);
  CHECK(x.valuation() == 2);
  CHECK(x.rel_precision() == 8);
}

TEST_CASE("a plus minus a is a tracked zero") {
  auto a = PadicNumber::from_integer(7, 123, 6);
  auto b = PadicNumber::from_integer(7, -123, 4);
  auto s = a + b;
  CHECK(s.is_zero());
  CHECK(s.abs_precision() == 4);
  CHECK((a + (-a)).abs_precision() == 6);
}

TEST_CASE("geometric series 1/(1-2) mod 2^6") {
  // Oracle: partial sums of 2^k stabilize to 2^6 - 1 mod 2^6.
  Integer oracle = 0;
  for (int k = 0; k < 6; ++k) oracle += Integer(1) << k;
  auto one = PadicNumber::from_integer(2, 1, 6);
  auto x = one / (one - PadicNumber::from_integer(2, 2, 6));
  CHECK(x.unit() == oracle);
  CHECK(x.digits() == std::vector<long>(6, 1));
}

TEST_CASE("precision propagation") {
  auto a = PadicNumber::from_integer(3, 9 * 2, 10);  // v=2, rel 8
  auto b = PadicNumber::from_integer(3, 1, 4);       // v=0, rel 4
  CHECK((a * b).abs_precision() == 6);
  CHECK((a / b).abs_precision() == 6);
  CHECK((a + b).abs_precision() == 4);
  CHECK_THROWS_AS(a / PadicNumber::zero(3, 5), Error);
  CHECK_THROWS_AS(a + PadicNumber::from_integer(5, 1, 3), Error);
  CHECK_THROWS_AS(b.reduce(6), Error);
}

TEST_CASE("ring axioms and valuation rules on random inputs") {
  std::mt19937_64 rng(11);
  for (long p : {2L, 3L, 5L}) {
    for (int it = 0; it < 200; ++it) {
      auto a = rand_padic(rng, p, 8), b = rand_padic(rng, p, 8), c = rand_padic(rng, p, 8);
      CHECK(congruent((a + b) + c, a + (b + c)));
      CHECK(congruent((a * b) * c, a * (b * c)));
      CHECK(congruent(a * (b + c), a * b + a * c));
      if (!a.is_zero() && !b.is_zero()) {
        CHECK((a * b).valuation() == *a.valuation() + *b.valuation());
        auto s = a + b;
        if (*a.valuation() != *b.valuation() && *a.valuation() < s.abs_precision() &&
            *b.valuation() < s.abs_precision())
          CHECK(s.valuation() == std::min(*a.valuation(), *b.valuation()));
        CHECK(congruent((a / b) * b, a));
      }
    }
  }
}

TEST_CASE("teichmuller lift p=5 a=2 prec 3") {
  // Oracle: iterate x -> x^5 mod 125 from 2 until stable.
  long x = 2;
  for (int i = 0; i < 5; ++i) {
    long y = 1;
    for (int k = 0; k < 5; ++k) y = y * x % 125;
    x = y;
  }
  auto K = UnramifiedField::get(5, 1);
  auto t = teichmuller_residue(FqElement::from_int(K, 2), 3);
  CHECK(t.coords()[0].unit() == x);
  CHECK(x == 57);
  CHECK(teichmuller_residue(FqElement::zero(K), 3).is_zero());
  CHECK(congruent(teichmuller_residue(FqElement::one(K), 3), UnramifiedElement::one(K, 3)));
}

TEST_CASE("unramified field f=2 and f=3") {
  std::mt19937_64 rng(5);
  for (auto [p, f] : {std::pair{2L, 2L}, {3L, 2L}, {5L, 2L}, {2L, 3L}, {3L, 3L}}) {
    auto K = UnramifiedField::get(p, f);
    for (int it = 0; it < 30; ++it) {
      auto x = UnramifiedElement::random(K, 8, rng), y = UnramifiedElement::random(K, 8, rng);
      CHECK(congruent(x.frobenius(f), x));
      CHECK(congruent(x.frobenius().frobenius(), x.frobenius(2)));
      CHECK(congruent((x * y).frobenius(), x.frobenius() * y.frobenius()));
      CHECK(congruent((x + y).frobenius(), x.frobenius() + y.frobenius()));
      auto z = UnramifiedElement::random(K, 8, rng);
      CHECK(congruent((x * y) * z, x * (y * z)));
      CHECK(congruent(x * (y + z), x * y + x * z));
      if (x.valuation() && *x.valuation() == 0) CHECK(congruent(x * x.inverse(), UnramifiedElement::one(K, 8)));
      auto a = FqElement::random(K, rng);
      auto t = teichmuller_residue(a, 8);
      Integer q = 1;
      for (long i = 0; i < f; ++i) q *= p;
      CHECK(congruent(t.pow(q.get_si()), t));
      CHECK(t.residue() == a);
      CHECK(congruent(t.frobenius(), teichmuller_residue(a.frobenius(), 8)));
    }
  }
}

TEST_CASE("sigma is trivial on Q_p") {
  auto K = UnramifiedField::get(3, 1);
  auto x = UnramifiedElement::from_rational(K, Rational(5, 7), 9);
  CHECK(x.frobenius() == x);
}
