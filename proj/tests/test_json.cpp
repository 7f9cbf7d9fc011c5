#include <random>

#include "doctest.h"
#include "fm_oracle.hpp"
#include "phodge/errors.hpp"
#include "phodge/json_io.hpp"

using namespace phodge;
using io::Json;

namespace {

Rational random_rational(std::mt19937_64& rng) {
  static const char* big[] = {"123456789012345678901234567890", "-98765432109876543210/7", "1/340282366920938463463374607431768211456"};
  if (rng() % 8 == 0) return Rational(big[rng() % 3]);
  Rational r(static_cast<long>(rng() % 2001) - 1000, 1 + static_cast<long>(rng() % 30));
  r.canonicalize();
  return r;
}

// The text form must survive too, so every check goes through dump/parse.
Json reparse(const Json& j) { return Json::parse(j.dump()); }

template <class T, class Read>
void roundtrip(const T& x, Read read) {
  Json j = io::to_json(x);
  T y = read(reparse(j));
  CHECK(io::to_json(y) == j);
}

std::string schema_path(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    if (e.code() != Errc::SchemaError) return "wrong code";
    std::string w = e.what();
    const std::string tag = "SchemaError: ";
    if (w.rfind(tag, 0) == 0) w = w.substr(tag.size());
    return w.substr(0, w.find(": "));
  }
  return "no error";
}

RobbaSeries random_series(const L0Ptr& F, std::mt19937_64& rng) {
  long lo = static_cast<long>(rng() % 9) - 4;
  long n = static_cast<long>(rng() % 6);
  std::vector<Coef> c;
  for (long i = 0; i < n; ++i) {
    L0Number v = L0Number::rational(F, random_rational(rng));
    long prec = rng() % 3 == 0 ? static_cast<long>(rng() % 20) : kExactPrecision;
    c.push_back(Coef{v, prec});
  }
  return RobbaSeries(F, lo, c, rng() % 2 == 0, rng() % 2 == 0);
}

SeriesMatrix random_series_matrix(const L0Ptr& F, long h, std::mt19937_64& rng, long lo = 0) {
  std::vector<L0Matrix> cs;
  long n = 1 + static_cast<long>(rng() % 3);
  for (long k = 0; k < n; ++k) {
    L0Matrix m(F, h, h);
    for (long i = 0; i < h; ++i)
      for (long j = 0; j < h; ++j) m(i, j) = L0Number::rational(F, static_cast<long>(rng() % 7) - 3);
    cs.push_back(m);
  }
  return SeriesMatrix::from_coefficients(F, lo, cs);
}

}  // namespace

TEST_CASE("rationals") {
  CHECK(io::to_json(Rational(5)) == Json(5));
  CHECK(io::to_json(Rational(1, 2)) == Json("1/2"));
  CHECK(io::to_json(Rational("123456789012345678901234567890")) == Json("123456789012345678901234567890"));
  CHECK(io::read_rational(Json("-6/4"), "x") == Rational(-3, 2));
  CHECK(schema_path([] { io::read_rational(Json("1/0"), "a.b"); }) == "a.b");
  CHECK(schema_path([] { io::read_rational(Json(true), "a.b"); }) == "a.b");
  std::mt19937_64 rng(1);
  for (int i = 0; i < 300; ++i) {
    Rational x = random_rational(rng);
    CHECK(io::read_rational(reparse(io::to_json(x)), "x") == x);
  }
}

TEST_CASE("p-adic and unramified numbers") {
  std::mt19937_64 rng(2);
  for (long p : {2L, 3L, 5L, 7L}) {
    for (int i = 0; i < 40; ++i) {
      Rational x = random_rational(rng);
      long prec = 1 + static_cast<long>(rng() % 20);
      PadicNumber a = rng() % 2 ? PadicNumber::from_rational(p, x, prec) : PadicNumber::exact(p, x, prec);
      PadicNumber b = io::read_padic(reparse(io::to_json(a)), "x");
      CHECK(b == a);
    }
    for (long f : {1L, 2L, 3L}) {
      FieldPtr K = UnramifiedField::get(p, f);
      for (int i = 0; i < 20; ++i) {
        auto a = UnramifiedElement::random(K, 1 + static_cast<long>(rng() % 12), rng, static_cast<long>(rng() % 5) - 2);
        CHECK(io::read_unramified(reparse(io::to_json(a)), "x") == a);
      }
    }
  }
}

TEST_CASE("Witt vectors") {
  WittVector<Integer> w(2, std::vector<Integer>{2, -1});
  CHECK(io::to_json(w) == Json{{"p", 2}, {"ring", "Z"}, {"components", {2, -1}}});
  WittVector<ZMod> z(3, std::vector<ZMod>{ZMod(4, 27), ZMod(26, 27)});
  CHECK(io::to_json(z) == Json{{"p", 3}, {"modulus", 27}, {"components", {4, 26}}});
}

TEST_CASE("filtered modules and their reports") {
  std::mt19937_64 rng(3);
  std::vector<FilteredModule> mods;
  for (long p : {2L, 3L, 5L})
    for (auto& n : fmtest::dim2_corpus(p)) mods.push_back(n.D);
  {
    const L0Ptr F = L0Field::get(2, 2);
    L0Number z = L0Number::zeta_power(F, 1);
    FilteredModule D;
    D.field = F;
    D.h = 2;
    D.phi = L0Matrix(F, 2, 2);
    D.phi(0, 1) = L0Number::rational(F, 2) * z;
    D.phi(1, 0) = L0Number::rational(F, 1);
    D.N = L0Matrix(F, 2, 2);
    D.filtration = {{0, L0Matrix::identity(F, 2)}, {1, L0Matrix::from_rows(F, 2, {{L0Number::rational(F, 1), z}})}};
    mods.push_back(D);
  }
  for (auto& D : mods) {
    Json j = io::to_json(D);
    FilteredModule E = io::read_filtered_module(reparse(j), "payload");
    CHECK(io::to_json(E) == j);
    CHECK(E.phi == D.phi);
    CHECK(E.N == D.N);
    roundtrip(polygons(D), [](const Json& x) { return io::read_polygons(x, "x"); });
    roundtrip(dh_report(D), [](const Json& x) { return io::read_dh_report(x, "x"); });
    auto r = is_weakly_admissible(D);
    Json rj = io::to_json(r, D.field);
    CHECK(io::to_json(io::read_admissibility(reparse(rj), D.field, "x"), D.field) == rj);
  }
}

TEST_CASE("filtered module schema errors name the field") {
  Json ok = io::to_json(fmtest::dim2_corpus(3)[0].D);
  Json j = ok;
  j.erase("phi");
  CHECK(schema_path([&] { io::read_filtered_module(j, "payload"); }) == "payload.phi");
  j = ok;
  j["phi"] = Json::array({Json::array({1, 0})});
  CHECK(schema_path([&] { io::read_filtered_module(j, "payload"); }) == "payload.phi");
  j = ok;
  j["filtration"][1]["jump"] = "one";
  CHECK(schema_path([&] { io::read_filtered_module(j, "payload"); }) == "payload.filtration[1].jump");
  j = ok;
  j["p"] = 4;
  CHECK(schema_path([&] { io::read_filtered_module(j, "payload"); }) == "payload.p");
}

TEST_CASE("period ring elements") {
  std::mt19937_64 rng(4);
  for (auto kind : {TiltModel::Kummer, TiltModel::Cyclotomic})
    for (long p : {2L, 3L}) {
      PeriodConfig c;
      c.kind = kind;
      c.p = p;
      c.depth = 2;
      c.prec = 10;
      ModelPtr M = PeriodModel::make(c);
      for (int i = 0; i < 10; ++i) {
        WRElement w = WRElement::zero(M);
        for (int k = 0; k < 2; ++k) {
          Rational e(static_cast<long>(rng() % (2 * p * p)), p * p);
          e.canonicalize();
          auto a = UnramifiedElement::exact(M->field(), static_cast<long>(rng() % 20) - 10, M->prec());
          w = w + WRElement::monomial(M, a, e);
        }
        CSideElement t = theta(w);
        CHECK(io::read_cside(reparse(io::to_json(t)), M, "x") == t);
        BdRElement x = xi_expand(w, 4);
        Json j = io::to_json(x);
        BdRElement y = io::read_bdr(reparse(j), "x");
        CHECK(congruent(x, y));
        CHECK(io::to_json(y) == j);
      }
    }
}

TEST_CASE("series, connections and their reports") {
  std::mt19937_64 rng(5);
  for (long p : {2L, 3L, 5L}) {
    const L0Ptr F = L0Field::get(p, 1);
    for (int i = 0; i < 30; ++i) {
      RobbaSeries s = random_series(F, rng);
      roundtrip(s, [&](const Json& x) { return io::read_series(x, F, "x"); });
    }
    CHECK(io::read_series(Json("3/2"), F, "x").coef(0).value == L0Number::rational(F, Rational(3, 2)));

    for (long h = 1; h <= 3; ++h) {
      ConnectionModule M;
      M.field = F;
      M.h = h;
      M.pole = Pole::Holomorphic;
      M.A = random_series_matrix(F, h, rng);
      M.frobenius = FrobeniusData{RobbaSeries::zero(F), SeriesMatrix::identity(F, h)};
      roundtrip(M, [](const Json& x) { return io::read_connection(x, "x"); });
      roundtrip(residue_exponents(M), [&](const Json& x) { return io::read_residue_report(x, F, "x"); });
      FormalSolution S = solve_horizontal_formal(M, 5);
      roundtrip(S, [&](const Json& x) { return io::read_formal_solution(x, F, "x"); });
      roundtrip(frobenius_structure_check(M, 8, std::make_pair(-4L, 4L)),
                [](const Json& x) { return io::read_frobenius_check(x, "x"); });

      ConnectionModule L = M;
      L.pole = Pole::Logarithmic;
      L.A = SeriesMatrix(F, h, h);
      roundtrip(solve_horizontal_formal(L, 4), [&](const Json& x) { return io::read_formal_solution(x, F, "x"); });
      roundtrip(residue_exponents(L), [&](const Json& x) { return io::read_residue_report(x, F, "x"); });
      roundtrip(d0_lattice_test(L, SeriesMatrix::identity(F, h), 4),
                [&](const Json& x) { return io::read_d0_result(x, F, "x"); });
    }

    L0Matrix U = L0Matrix::identity(F, 2);
    U(0, 1) = L0Number::rational(F, 1);
    Rational chi = p == 2 ? Rational(5) : Rational(1 + p);
    GammaActionData g{F, SeriesMatrix::constant(U), chi, kExactPrecision, 4};
    roundtrip(g, [&](const Json& x) { return io::read_gamma(x, F, "x"); });
    roundtrip(sen_connection(g, 8), [&](const Json& x) { return io::read_sen_result(x, F, "x"); });
  }
}

TEST_CASE("connection schema errors name the field") {
  Json j = {{"field", {{"p", 3}, {"f", 1}}}, {"rank", 2}, {"pole", "holomorphic"}, {"A", {{0, 0}, {0, 0}}}};
  CHECK_NOTHROW(io::read_connection(j, "payload"));
  Json k = j;
  k["pole"] = "essential";
  CHECK(schema_path([&] { io::read_connection(k, "payload"); }) == "payload.pole");
  k = j;
  k["A"] = {{0, 0}};
  CHECK(schema_path([&] { io::read_connection(k, "payload"); }).rfind("payload.A", 0) == 0);
  k = j;
  k["A"][1][0] = {{"coeffs", {{"x", 1}}}};
  CHECK(schema_path([&] { io::read_connection(k, "payload"); }) == "payload.A[1][0].coeffs.x");
}
