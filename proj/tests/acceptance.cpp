// Acceptance run: one pass/fail line per criterion, each against an
// independent test-side oracle and a wall-clock limit.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

#include "fm_oracle.hpp"
#include "phodge/cli.hpp"
#include "phodge/filtered.hpp"
#include "phodge/period.hpp"
#include "phodge/robba.hpp"
#include "phodge/witt.hpp"
#include "robba_oracle.hpp"

using namespace phodge;
using namespace rbtest;

namespace {

// Tolerances: everything below is exact except where a p-adic precision is named.
constexpr long kThetaPrec = 12;
constexpr long kSenPrec = 12;
constexpr long kSenOrder = 8;
constexpr long kSolveOrder = 16;

struct Tally {
  long checks = 0, failures = 0;
  std::string first;
  void operator()(bool ok, const std::string& what) {
    ++checks;
    if (!ok && failures++ == 0) first = what;
  }
};

// ---- 1. Witt vectors

Integer ghost_oracle(long p, const std::vector<Integer>& a, long n, const Integer& mod) {
  Integer g = 0, pi = 1;
  for (long i = 0; i <= n; ++i) {
    Integer e = 1;
    for (long k = 0; k < n - i; ++k) e *= p;
    Integer x;
    mpz_powm(x.get_mpz_t(), a[i].get_mpz_t(), e.get_mpz_t(), mod.get_mpz_t());
    g += pi * x;
    pi *= p;
  }
  return Integer(((g % mod) + mod) % mod);
}

void witt_ghost(Tally& T) {
  std::mt19937_64 rng(101);
  for (long p : {2L, 3L, 5L}) {
    Integer mod = ppow(p, 8);
    const u64 m = mod.get_ui();
    for (int it = 0; it < 500; ++it) {
      long n = 1 + static_cast<long>(rng() % 4);
      std::vector<Integer> a(n), b(n);
      std::vector<ZMod> za, zb;
      for (long i = 0; i < n; ++i) {
        a[i] = Integer(static_cast<unsigned long>(rng() % m));
        b[i] = Integer(static_cast<unsigned long>(rng() % m));
        za.push_back(ZMod(a[i].get_ui(), m));
        zb.push_back(ZMod(b[i].get_ui(), m));
      }
      WittVector<ZMod> A(p, za), B(p, zb);
      auto comps = [](const WittVector<ZMod>& w) {
        std::vector<Integer> v;
        for (auto& c : w.components()) v.push_back(Integer(static_cast<unsigned long>(c.v)));
        return v;
      };
      auto s = comps(A + B), pr = comps(A * B);
      for (long k = 0; k < n; ++k) {
        Integer ga = ghost_oracle(p, a, k, mod), gb = ghost_oracle(p, b, k, mod);
        T(ghost_oracle(p, s, k, mod) == (ga + gb) % mod, "ghost of a sum, p=" + std::to_string(p));
        T(ghost_oracle(p, pr, k, mod) == (ga * gb) % mod, "ghost of a product, p=" + std::to_string(p));
        T(Integer(static_cast<unsigned long>(ghost_map(A)[k].v)) == ga, "library ghost map, p=" + std::to_string(p));
      }
    }
  }
}

// ---- 2, 3. period rings

ModelPtr model(TiltModel kind, long p, long prec, long depth = 2) {
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
    if (M->kind() == TiltModel::Cyclotomic) num -= pk;
    long c = static_cast<long>(rng() % 50) - 25;
    w = w + WRElement::monomial(M, k0(M, c == 0 ? 1 : c), rat(num, pk));
  }
  return w;
}

void theta_checks(Tally& T) {
  std::mt19937_64 rng(102);
  for (long p : {2L, 3L, 5L}) {
    auto K = model(TiltModel::Kummer, p, kThetaPrec), C = model(TiltModel::Cyclotomic, p, kThetaPrec);
    T(theta(WRElement::uniformizer(K)).is_zero(), "theta(xi) = 0, kummer p=" + std::to_string(p));
    T(theta(WRElement::uniformizer(C)).is_zero(), "theta(xi) = 0, cyclotomic p=" + std::to_string(p));
    T(congruent(theta(WRElement::monomial(K, k0(K, 1), 1)), cs(K, p)), "theta([pi]) = p, p=" + std::to_string(p));
    T(congruent(theta(WRElement::monomial(C, k0(C, 1), 1)), cs(C, 1)), "theta([eps]) = 1, p=" + std::to_string(p));
  }
  for (int it = 0; it < 200; ++it) {
    long p = std::vector<long>{2, 3, 5}[it % 3];
    auto M = model(it % 2 ? TiltModel::Cyclotomic : TiltModel::Kummer, p, kThetaPrec);
    auto v = random_wr(M, rng), w = random_wr(M, rng);
    T(congruent(theta(v * w), theta(v) * theta(w)), "theta multiplicative, p=" + std::to_string(p));
  }
}

void log_checks(Tally& T) {
  std::mt19937_64 rng(103);
  for (long p : {2L, 3L, 5L}) {
    auto K = model(TiltModel::Kummer, p, kThetaPrec), C = model(TiltModel::Cyclotomic, p, kThetaPrec);
    auto l = log_pi(K, 3);
    T(l[0].is_zero() && congruent(l[1], cs(K, rat(1, p))) && congruent(l[2], cs(K, rat(-1, 2 * p * p))),
      "log_pi mod Fil^3, p=" + std::to_string(p));
    auto t = t_element(C, 4);
    T(t[0].is_zero(), "theta(t) = 0, p=" + std::to_string(p));
    T(congruent(t.truncate(2), BdRElement::uniformizer(C, 2)), "t = [eps] - 1 mod Fil^2, p=" + std::to_string(p));
  }
  const long N = 4;
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
  std::vector<ModelPtr> models = {model(TiltModel::Cyclotomic, 3, 10), model(TiltModel::Kummer, 2, 10),
                                  model(TiltModel::Cyclotomic, 2, 10), model(TiltModel::Kummer, 5, 10)};
  for (int it = 0; it < 100; ++it) {
    auto& M = models[it % models.size()];
    auto x = rnd(M);
    auto lhs = bst_action(bst_action(x, BstAction::Phi), BstAction::N);
    auto rhs = bst_action(bst_action(x, BstAction::N), BstAction::Phi).scale(M->prime());
    T(congruent(lhs, rhs), "N phi = p phi N, p=" + std::to_string(M->prime()));
  }
}

// ---- 4, 5, 6. filtered modules

std::vector<fmtest::Named> dim2_all() {
  std::vector<fmtest::Named> all;
  for (long p : {2L, 3L, 5L, 7L})
    for (auto& n : fmtest::dim2_corpus(p)) all.push_back({n.name + " p=" + std::to_string(p), n.D});
  return all;
}

void oracle_match(Tally& T, const FilteredModule& D, const fmtest::Oracle2& o, const std::string& name) {
  T(o.supported, name + ": oracle supports the module");
  T(t_H(D) == o.tH, name + ": tH");
  T(t_N(D) == o.tN, name + ": tN");
  auto P = polygons(D);
  T(P.newton_slopes == o.newton, name + ": Newton slopes");
  T(P.hodge_jumps == o.hodge, name + ": Hodge jumps");
  // the polygons from their slopes
  auto vertices_ok = [](const Polygon& poly, const std::vector<Rational>& slopes) {
    Rational y = 0;
    std::vector<std::pair<long, Rational>> pts = {{0, 0}};
    for (std::size_t i = 0; i < slopes.size(); ++i) {
      y += slopes[i];
      if (i + 1 < slopes.size() && slopes[i + 1] == slopes[i]) continue;
      pts.emplace_back(static_cast<long>(i + 1), y);
    }
    return poly.vertices == pts;
  };
  std::vector<Rational> hj(o.hodge.begin(), o.hodge.end());
  T(vertices_ok(P.newton, o.newton), name + ": Newton polygon");
  T(vertices_ok(P.hodge, hj), name + ": Hodge polygon");
  auto v = is_weakly_admissible(D).verdict;
  T(v == (o.admissible ? Verdict::Admissible : Verdict::NotAdmissible), name + ": verdict");
}

void dim2_corpus_checks(Tally& T) {
  std::mt19937_64 rng(104);
  auto all = dim2_all();
  for (auto& [name, D] : all) {
    auto o = fmtest::oracle2(D);
    oracle_match(T, D, o, name);
    for (int it = 0; it < 50; ++it) {
      auto E = change_basis(D, fmtest::random_invertible(D.field, 2, rng));
      auto oe = fmtest::oracle2(E);
      T(oe.admissible == o.admissible && oe.tH == o.tH && oe.tN == o.tN, name + ": oracle is basis independent");
      oracle_match(T, E, o, name + " conjugated");
    }
  }
}

// Block diagonal sum built from the matrices alone.
FilteredModule block_sum(const FilteredModule& A, const FilteredModule& B) {
  const L0Ptr& F = A.field;
  const long n = A.h + B.h;
  auto block = [&](const L0Matrix& a, const L0Matrix& b) {
    L0Matrix m(F, n, n);
    for (long i = 0; i < A.h; ++i)
      for (long j = 0; j < A.h; ++j) m(i, j) = a(i, j);
    for (long i = 0; i < B.h; ++i)
      for (long j = 0; j < B.h; ++j) m(A.h + i, A.h + j) = b(i, j);
    return m;
  };
  FilteredModule S;
  S.field = F;
  S.h = n;
  S.phi = block(A.phi, B.phi);
  S.N = block(A.N, B.N);
  // Fil^j of a summand is the first step with jump >= j
  auto fil = [](const FilteredModule& D, long j) -> const L0Matrix* {
    for (auto& s : D.filtration)
      if (s.jump >= j) return &s.basis;
    return nullptr;
  };
  std::vector<long> jumps;
  for (auto* D : {&A, &B})
    for (auto& s : D->filtration) jumps.push_back(s.jump);
  std::sort(jumps.begin(), jumps.end());
  jumps.erase(std::unique(jumps.begin(), jumps.end()), jumps.end());
  for (long j : jumps) {
    const L0Matrix* a = fil(A, j);
    const L0Matrix* b = fil(B, j);
    long ra = a ? a->rows() : 0, rb = b ? b->rows() : 0;
    L0Matrix basis(F, ra + rb, n);
    for (long i = 0; i < ra; ++i)
      for (long k = 0; k < A.h; ++k) basis(i, k) = (*a)(i, k);
    for (long i = 0; i < rb; ++i)
      for (long k = 0; k < B.h; ++k) basis(ra + i, A.h + k) = (*b)(i, k);
    S.filtration.push_back({j, basis});
  }
  return S;
}

void dh_checks(Tally& T) {
  std::mt19937_64 rng(105);
  auto all = dim2_all();
  for (auto& [name, D] : all) {
    auto o = fmtest::oracle2(D);
    if (!o.admissible) continue;
    auto r = dh_report(D);
    T(r.vplus0 == DhPair{o.tN, D.h}, name + ": V+0 = (tN, h)");
    T(r.vplus1 == DhPair{Rational(o.tH), 0}, name + ": V+1 = (tH, 0)");
    T(r.vstar && *r.vstar == DhPair{0, D.h}, name + ": V* = (0, h)");
  }
  for (int it = 0; it < 20; ++it) {
    long p = std::vector<long>{2, 3, 5, 7}[rng() % 4];
    auto c = fmtest::dim2_corpus(p);
    auto A = change_basis(c[rng() % 4].D, fmtest::random_invertible(c[0].D.field, 2, rng));
    auto B = change_basis(c[rng() % 4].D, fmtest::random_invertible(c[0].D.field, 2, rng));
    // φ scaled by the unit p + 1 (an unramified twist): t_N, t_H and admissibility are
    // unchanged, and the characteristic polynomials of the summands become coprime, so
    // the sum stays in the squarefree range where the verdict is decided
    B.phi = B.phi * L0Matrix::identity(B.field, 2).scale(L0Number::rational(B.field, p + 1));
    auto S = block_sum(A, B);
    auto ra = dh_report(A), rb = dh_report(B), rs = dh_report(S);
    auto add = [](const DhPair& x, const DhPair& y) { return DhPair{Rational(x.d + y.d), x.h + y.h}; };
    std::string tag = "direct sum " + std::to_string(it);
    T(rs.vplus0 == add(ra.vplus0, rb.vplus0), tag + ": V+0 additive");
    T(rs.vplus1 == add(ra.vplus1, rb.vplus1), tag + ": V+1 additive");
    if (ra.vstar && rb.vstar) T(rs.vstar && *rs.vstar == add(*ra.vstar, *rb.vstar), tag + ": V* additive");
    T(rs.deficit == ra.deficit + rb.deficit, tag + ": deficit additive");
  }
}

void twist_checks(Tally& T) {
  for (auto& [name, D] : dim2_all()) {
    auto o = fmtest::oracle2(D);
    auto v = is_weakly_admissible(D).verdict;
    for (long i = -3; i <= 3; ++i) {
      auto E = tate_twist(D, i);
      std::string tag = name + " twist " + std::to_string(i);
      T(t_H(E) == o.tH - i * D.h, tag + ": tH");
      T(t_N(E) == o.tN - i * D.h, tag + ": tN");
      T(is_weakly_admissible(E).verdict == v, tag + ": verdict");
    }
  }
}

// ---- 7, 8, 9. connections

PM to_pm(const SeriesMatrix& m, long r) {
  long h = m.rows();
  PM out(r, qm_zero(h));
  for (long k = 0; k < r; ++k)
    for (long i = 0; i < h; ++i)
      for (long j = 0; j < h; ++j) out[k][i][j] = m(i, j).coef(k).value.to_rational();
  return out;
}

void solve_checks(Tally& T) {
  std::mt19937_64 rng(106);
  for (int it = 0; it < 50; ++it) {
    long p = std::vector<long>{2, 3, 5}[it % 3];
    auto F = L0Field::get(p, 1);
    long h = 1 + static_cast<long>(rng() % 3);
    long deg = static_cast<long>(rng() % 4);
    SeriesMatrix A = random_holomorphic(F, h, deg, rng);
    // one order beyond the residual so that Y' is known through t^15
    auto S = solve_horizontal_formal(connection(F, A, Pole::Holomorphic), kSolveOrder + 1);
    PM Y = to_pm(S.Y, kSolveOrder + 1), Ap = to_pm(A, kSolveOrder);
    PM AY = pm_mul(Ap, Y, kSolveOrder);
    bool zero = Y[0] == qm_id(h);
    for (long k = 0; k < kSolveOrder; ++k) {
      QM dy = qm_zero(h);
      dy = qm_add(dy, Y[k + 1], Rational(k + 1));
      zero = zero && qm_add(dy, AY[k]) == qm_zero(h);
    }
    T(zero, "residual mod t^16, rank " + std::to_string(h));
  }
  for (long c : {-3L, -1L, 2L, 5L}) {
    auto F = L0Field::get(3, 1);
    SeriesMatrix A(F, 1, 1);
    A(0, 0) = RobbaSeries::constant(F, q(F, -c));  // dY/dt = −A·Y = c·Y
    auto S = solve_horizontal_formal(connection(F, A, Pole::Holomorphic), kSolveOrder);
    Rational term = 1;
    bool ok = true;
    for (long k = 0; k < kSolveOrder; ++k) {
      if (k > 0) term = term * c / k;
      ok = ok && S.Y(0, 0).coef(k).value.to_rational() == term;
    }
    T(ok, "rank-1 constant case c=" + std::to_string(c));
  }
}

void sen_checks(Tally& T) {
  std::mt19937_64 rng(107);
  const long r = kSenOrder;
  for (int it = 0; it < 50; ++it) {
    long p = std::vector<long>{2, 3, 5}[it % 3];
    auto F = L0Field::get(p, 1);
    long h = 1 + static_cast<long>(rng() % 3);
    long a = static_cast<long>(rng() % 5) - 2;
    long u = 0;
    while (u == 0) u = static_cast<long>(rng() % 21) - 10;
    Rational chi = 1 + Rational(p == 2 ? 4 : p) * u;
    // Γ = P χ^a (I + N(t)) P^-1 with N strictly upper triangular
    PM Nm(r, qm_zero(h));
    for (long k = 0; k < r; ++k)
      for (long i = 0; i < h; ++i)
        for (long j = i + 1; j < h; ++j) Nm[k][i][j] = static_cast<long>(rng() % 7) - 3;
    QM P;
    do {
      P = qm_zero(h);
      for (auto& row : P)
        for (auto& x : row) x = static_cast<long>(rng() % 7) - 3;
    } while (qm_det(P) == 0 || vq(qm_det(P), p) != 0);
    QM Pi = qm_inv(P);
    Rational chia = 1;
    for (long k = 0; k < std::abs(a); ++k) chia *= chi;
    if (a < 0) chia = 1 / chia;
    PM Gam(r, qm_zero(h));
    for (long k = 0; k < r; ++k) {
      QM Uk = k == 0 ? qm_add(qm_id(h), Nm[0]) : Nm[k];
      Gam[k] = qm_add(qm_zero(h), qm_mul(P, qm_mul(Uk, Pi)), chia);
    }
    std::string tag = "Sen roundtrip p=" + std::to_string(p) + " h=" + std::to_string(h) + " a=" + std::to_string(a) +
                      " chi=" + chi.get_str();
    SeriesMatrix back;
    try {
      back = sen_exponentiate(sen_connection(GammaActionData{F, to_sm(F, Gam), chi, kExactPrecision, r}, kSenPrec));
    } catch (const Error& e) {
      T(false, tag + ": " + e.what());
      continue;
    }
    bool ok = true;
    for (long k = 0; k < r; ++k)
      for (long i = 0; i < h; ++i)
        for (long j = 0; j < h; ++j) {
          Coef c = back(i, j).coef(k);
          ok = ok && c.prec >= kSenPrec && vq(c.value.to_rational() - Gam[k][i][j], p) >= kSenPrec;
        }
    T(ok, tag);
  }
}

void frobenius_checks(Tally& T) {
  std::mt19937_64 rng(108);
  for (int it = 0; it < 100; ++it) {
    long p = std::vector<long>{2, 3, 5}[it % 3];
    long z = it % 2;
    auto F = L0Field::get(p, 1);
    RobbaSeries zs = z ? RobbaSeries::constant(F, q(F, 1)) : RobbaSeries::zero(F);
    long lo = z ? 0 : -3;
    LP f = random_lp(rng, lo, 4), g = random_lp(rng, lo, 3);
    auto pf = frobenius_pullback(series(F, f), zs), pg = frobenius_pullback(series(F, g), zs);
    auto pfg = frobenius_pullback(series(F, lp_mul(f, g)), zs);
    auto pfpg = frobenius_pullback(series(F, lp_add(f, g)), zs);
    std::string tag = "p=" + std::to_string(p) + " z=" + std::to_string(z);
    T(compare(pfg, pf * pg, kExactPrecision).equal, tag + ": multiplicative");
    T(compare(pfpg, pf + pg, kExactPrecision).equal, tag + ": additive");
    T(pfg.is_polynomial() && agrees(pfg, phi_oracle(lp_mul(f, g), p, z, pfg.lo())), tag + ": binomial oracle");
  }
  auto F = L0Field::get(2, 1);
  auto px = frobenius_pullback(RobbaSeries::monomial(F, q(F, 1), 1), RobbaSeries::constant(F, q(F, 1)));
  T(px.is_polynomial() && px.all_exact() && agrees(px, LP{{0, 2}, {2, 1}}) && px.lo() == 0 && px.hi() == 2,
    "phi(x) = x^2 + 2 at p=2, z=1");
}

// ---- 10. command line

void cli_checks(Tally& T) {
  auto run = [](std::vector<std::string> args) {
    std::ostringstream out, err;
    return cli::run(args, out, err);
  };
  const std::string dir = PHODGE_CORPUS_DIR;
  T(run({"regress", "--corpus", dir + "/examples.json"}) == 0, "shipped corpus exits 0");
  T(run({"regress", "--corpus", dir + "/fixtures/corrupted.json"}) == 1, "corrupted fixture exits 1");
  T(run({"regress", "--corpus", dir + "/fixtures/schema_violation.json"}) == 2, "schema violations exit 2");
  T(run({"regress", "--corpus", dir + "/fixtures/malformed.json"}) == 2, "malformed JSON exits 2");
}

struct Criterion {
  int number;
  const char* name;
  double limit_s;  // 0: no limit
  std::function<void(Tally&)> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "Witt ghost map is a ring homomorphism over Z/p^8", 5, witt_ghost},
      {2, "theta on generators, theta multiplicative", 5, theta_checks},
      {3, "log[pi], t, and N phi = p phi N", 5, log_checks},
      {4, "rank-2 corpus against the eigenline oracle, conjugation invariance", 10, dim2_corpus_checks},
      {5, "dh pairs and additivity on direct sums", 0, dh_checks},
      {6, "Tate twists shift tH and tN, verdicts invariant", 0, twist_checks},
      {7, "formal solutions: residual mod t^16, exponential closed form", 10, solve_checks},
      {8, "Sen roundtrip mod t^8 at precision 12", 0, sen_checks},
      {9, "Frobenius pullback is a ring homomorphism", 0, frobenius_checks},
      {10, "command line regression exit codes", 0, cli_checks},
  };
  int failed = 0;
  for (auto& c : criteria) {
    Tally T;
    std::string error;
    auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(T);
    } catch (const std::exception& e) {
      error = e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool slow = c.limit_s > 0 && secs > c.limit_s;
    bool ok = error.empty() && T.failures == 0 && T.checks > 0 && !slow;
    if (!ok) ++failed;
    std::printf("%s  %2d  %-68s %6ld checks  %6.2fs", ok ? "PASS" : "FAIL", c.number, c.name, T.checks, secs);
    if (c.limit_s > 0) std::printf(" (limit %.0fs)", c.limit_s);
    if (!error.empty()) std::printf("  exception: %s", error.c_str());
    if (T.failures) std::printf("  %ld failed, first: %s", T.failures, T.first.c_str());
    if (slow) std::printf("  over the time limit");
    std::printf("\n");
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
