#include "phodge/filtered.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "phodge/errors.hpp"

namespace phodge {

namespace {

L0Number q(const L0Ptr& F, const Rational& x) { return L0Number::rational(F, x); }

std::string fmt_jumps(const std::vector<long>& js) {
  std::ostringstream os;
  for (std::size_t i = 0; i < js.size(); ++i) os << (i ? "," : "") << js[i];
  return os.str();
}

}  // namespace

ValidationReport validate(const FilteredModule& D) {
  ValidationReport rep;
  auto bad = [&](std::string msg) {
    rep.valid = false;
    rep.failures.push_back(std::move(msg));
  };
  if (!D.field) {
    bad("missing coefficient field");
    return rep;
  }
  const long h = D.h;
  if (h < 0) {
    bad("negative rank");
    return rep;
  }
  bool phi_ok = D.phi.rows() == h && D.phi.cols() == h;
  bool N_ok = D.N.rows() == h && D.N.cols() == h;
  if (!phi_ok) bad("phi is not " + std::to_string(h) + "x" + std::to_string(h));
  if (!N_ok) bad("N is not " + std::to_string(h) + "x" + std::to_string(h));
  if (phi_ok && h > 0 && D.phi.det().is_zero()) bad("phi is not bijective");
  if (N_ok && h > 0 && !D.N.pow(h).is_zero()) bad("N is not nilpotent");
  if (phi_ok && N_ok && h > 0) {
    L0Matrix lhs = D.N * D.phi;
    L0Matrix rhs = (D.phi * D.N.sigma()).scale(q(D.field, D.prime()));
    if (!(lhs == rhs)) bad("N phi != p phi N");
  }
  if (h > 0 && D.filtration.empty()) bad("filtration is not exhaustive: no steps");
  for (std::size_t k = 0; k < D.filtration.size(); ++k) {
    const auto& s = D.filtration[k];
    std::string at = "filtration step at jump " + std::to_string(s.jump);
    if (s.basis.cols() != h) {
      bad(at + ": vectors do not have " + std::to_string(h) + " coordinates");
      continue;
    }
    if (s.basis.rank() != s.basis.rows()) bad(at + ": basis vectors are dependent");
    if (k > 0) {
      const auto& prev = D.filtration[k - 1];
      if (s.jump <= prev.jump) bad(at + ": jumps must be strictly increasing");
      if (prev.basis.cols() == h && !subspace::contains(prev.basis, s.basis))
        bad(at + ": not contained in the previous step (filtration must be decreasing)");
    } else if (s.basis.rank() != h) {
      bad(at + ": first step must be the whole space (filtration must be exhaustive)");
    }
  }
  for (std::size_t g = 0; g < D.galois.size(); ++g) {
    const L0Matrix& G = D.galois[g];
    std::string at = "galois generator " + std::to_string(g);
    if (G.rows() != h || G.cols() != h) {
      bad(at + ": wrong shape");
      continue;
    }
    if (h > 0 && G.det().is_zero()) bad(at + ": not invertible");
    if (phi_ok && !(G * D.phi == D.phi * G.sigma())) bad(at + ": does not commute with phi");
    if (N_ok && !(G * D.N == D.N * G)) bad(at + ": does not commute with N");
  }
  return rep;
}

void require_valid(const FilteredModule& D) {
  ValidationReport r = validate(D);
  if (r.valid) return;
  std::string msg;
  for (auto& f : r.failures) msg += (msg.empty() ? "" : "; ") + f;
  fail(Errc::InvalidModule, msg);
}

L0Matrix fil(const FilteredModule& D, long i) {
  for (auto& s : D.filtration)
    if (s.jump >= i) return s.basis;
  return L0Matrix(D.field, 0, D.h);
}

long fil_dim(const FilteredModule& D, long i) { return fil(D, i).rows(); }

std::vector<long> hodge_jumps(const FilteredModule& D) {
  std::vector<long> js;
  for (std::size_t k = 0; k < D.filtration.size(); ++k) {
    long next = k + 1 < D.filtration.size() ? D.filtration[k + 1].basis.rows() : 0;
    for (long m = D.filtration[k].basis.rows() - next; m > 0; --m) js.push_back(D.filtration[k].jump);
  }
  return js;
}

Rational t_N(const FilteredModule& D) {
  if (D.h == 0) return 0;
  auto v = D.phi.det().valuation();
  if (!v) fail(Errc::InvalidModule, "phi is not bijective");
  return *v;
}

long t_H(const FilteredModule& D) {
  long t = 0;
  for (long j : hodge_jumps(D)) t += j;
  return t;
}

long subspace_t_H(const FilteredModule& D, const L0Matrix& W) {
  std::vector<long> d;
  for (auto& s : D.filtration) d.push_back(subspace::intersection_dim(W, s.basis));
  long t = 0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    long next = k + 1 < d.size() ? d[k + 1] : 0;
    t += D.filtration[k].jump * (d[k] - next);
  }
  return t;
}

Rational subspace_t_N(const FilteredModule& D, const L0Matrix& W0) {
  L0Matrix W = subspace::span(W0);
  const long r = W.rows();
  if (r == 0) return 0;
  L0Matrix img = subspace::image(D.phi, W, 1);
  L0Matrix A(D.field, r, r);
  for (long k = 0; k < r; ++k) {
    auto c = subspace::coordinates(W, img.row(k));
    if (!c) fail(Errc::InvalidArgument, "subspace is not phi-stable");
    for (long l = 0; l < r; ++l) A(k, l) = (*c)[l];
  }
  return *A.det().valuation();
}

bool is_phi_stable(const FilteredModule& D, const L0Matrix& W) {
  return subspace::contains(W, subspace::image(D.phi, W, 1));
}

bool is_N_stable(const FilteredModule& D, const L0Matrix& W) {
  return subspace::contains(W, subspace::image(D.N, W, 0));
}

L0Matrix stable_closure(const FilteredModule& D, const L0Matrix& W) {
  L0Matrix S = subspace::span(W);
  while (true) {
    L0Matrix T = subspace::span(subspace::stack(
        S, subspace::stack(subspace::image(D.phi, S, 1), subspace::image(D.N, S, 0))));
    if (T.rows() == S.rows()) return S;
    S = T;
  }
}

L0Matrix linearized_phi(const FilteredModule& D) {
  L0Matrix psi = D.phi;
  for (long k = 1; k < D.f(); ++k) psi = psi * D.phi.sigma(k);
  return psi;
}

Polygon Polygon::from_slopes(const std::vector<Rational>& s) {
  Polygon P;
  P.vertices.emplace_back(0, Rational(0));
  Rational y = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i > 0 && s[i] != s[i - 1]) P.vertices.emplace_back(static_cast<long>(i), y);
    y += s[i];
  }
  if (!s.empty()) P.vertices.emplace_back(static_cast<long>(s.size()), y);
  return P;
}

Polygons polygons(const FilteredModule& D) {
  require_valid(D);
  Polygons P;
  if (D.h > 0) {
    std::vector<L0Number> cp = linearized_phi(D).charpoly();
    std::vector<std::optional<Rational>> vals;
    for (auto& c : cp) {
      auto v = c.valuation();
      vals.push_back(v ? std::optional<Rational>(Rational(*v)) : std::nullopt);
    }
    for (auto& r : qpoly::root_valuations(vals)) P.newton_slopes.push_back(*r / D.f());
  }
  P.hodge_jumps = hodge_jumps(D);
  std::vector<Rational> hs(P.hodge_jumps.begin(), P.hodge_jumps.end());
  P.newton = Polygon::from_slopes(P.newton_slopes);
  P.hodge = Polygon::from_slopes(hs);
  return P;
}

bool newton_above_hodge(const Polygons& P) {
  if (P.newton_slopes.size() != P.hodge_jumps.size()) return false;
  Rational yn = 0, yh = 0;
  for (std::size_t i = 0; i < P.newton_slopes.size(); ++i) {
    yn += P.newton_slopes[i];
    yh += P.hodge_jumps[i];
    if (yn < yh) return false;
  }
  return yn == yh;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Admissible:
      return "Admissible";
    case Verdict::NotAdmissible:
      return "NotAdmissible";
    case Verdict::Inconclusive:
      return "Inconclusive";
  }
  return "?";
}

namespace {

struct Checker {
  const FilteredModule& D;
  AdmissibilityResult res;

  // True when W violates t_H <= t_N (and records the witness).
  bool check(const L0Matrix& W0, const std::string& what) {
    L0Matrix W = subspace::span(W0);
    ++res.subspaces_checked;
    long th = subspace_t_H(D, W);
    Rational tn = subspace_t_N(D, W);
    if (th <= tn) return false;
    res.verdict = Verdict::NotAdmissible;
    res.witness = Witness{W, W.rows(), th, tn, what};
    return true;
  }

  AdmissibilityResult done(std::string reason) {
    if (res.verdict != Verdict::NotAdmissible) res.verdict = Verdict::Admissible;
    if (res.reason.empty()) res.reason = std::move(reason);
    return res;
  }
};

L0Matrix poly_of(const L0Matrix& A, const QPoly& g) {
  const L0Ptr& F = A.field();
  L0Matrix r(F, A.rows(), A.cols());
  for (std::size_t i = g.size(); i-- > 0;)
    r = r * A + L0Matrix::identity(F, A.rows()).scale(q(F, g[i]));
  return r;
}

QPoly rational_charpoly(const L0Matrix& A) {
  QPoly chi;
  for (auto& c : A.charpoly()) chi.push_back(c.to_rational());
  return chi;
}

AdmissibilityResult lines(Checker& C) {
  const FilteredModule& D = C.D;
  const L0Ptr& F = D.field;
  C.res.strategy = "complete classification of stable lines (h = 2)";
  if (!D.N.is_zero()) {
    L0Matrix K = D.N.kernel();
    if (!is_phi_stable(D, K)) fail(Errc::InvalidModule, "ker N is not phi-stable");
    C.check(K, "ker N, the only N-stable line");
    return C.done("N != 0: the only N-stable line is ker N");
  }
  const L0Matrix& A = D.phi;
  const Rational s = (A(0, 0) + A(1, 1)).to_rational();
  const Rational n = A.det().to_rational();
  const Rational disc = s * s - 4 * n;
  if (A(0, 1).is_zero() && A(1, 0).is_zero() && A(0, 0) == A(1, 1)) {
    long top = -1;
    for (std::size_t k = 0; k < D.filtration.size(); ++k)
      if (D.filtration[k].basis.rows() > 0) top = static_cast<long>(k);
    L0Matrix line = L0Matrix::from_rows(F, 2, {D.filtration[top].basis.row(0)});
    C.check(line, "a line in the smallest nonzero filtration step (phi is scalar, every line is stable)");
    return C.done("phi is scalar: every line is stable; the line with the largest t_H was checked");
  }
  if (disc == 0) {
    Rational lam = s / 2;
    C.check((A - L0Matrix::identity(F, 2).scale(q(F, lam))).kernel(), "the eigenline of phi");
    return C.done("repeated eigenvalue, phi not scalar: one stable line");
  }
  if (auto r = qpoly::rational_sqrt(disc)) {
    for (const Rational& lam : std::vector<Rational>{Rational((s - *r) / 2), Rational((s + *r) / 2)}) {
      if (C.check((A - L0Matrix::identity(F, 2).scale(q(F, lam))).kernel(),
                  "eigenline for eigenvalue " + to_string(lam)))
        break;
    }
    return C.done("two rational eigenlines");
  }
  if (qpoly::is_qp_square(disc, D.prime())) {
    // The eigenlines are defined over Q(sqrt disc) but not over Q: neither lies
    // in a proper rational filtration step, so each has t_H = the largest jump
    // at which Fil is everything.
    long i0 = 0;
    for (auto& st : D.filtration)
      if (st.basis.rows() == 2) i0 = st.jump;
    QPoly chi = {n, -s, Rational(1)};
    std::vector<std::optional<Rational>> vals;
    for (auto& c : chi) vals.push_back(c == 0 ? std::nullopt : std::optional<Rational>(Rational(*vp(c, D.prime()))));
    auto rv = qpoly::root_valuations(vals);
    C.res.subspaces_checked += 2;
    if (Rational(i0) > *rv.front()) {
      C.res.verdict = Verdict::NotAdmissible;
      C.res.witness = Witness{L0Matrix(F, 0, 2), 1, i0, *rv.front(),
                              "eigenline of phi for the root of " + qpoly::to_string(chi) + " of valuation " +
                                  to_string(*rv.front()) + " (defined over Q_p, not over Q)"};
    }
    return C.done("eigenvalues in Q_p \\ Q: both eigenlines checked through root valuations");
  }
  return C.done("characteristic polynomial has no root in Q_p: no stable lines");
}

std::optional<AdmissibilityResult> components(Checker& C, std::string& note) {
  const FilteredModule& D = C.D;
  QPoly chi = rational_charpoly(D.phi);
  if (!qpoly::is_squarefree(chi)) {
    note = "characteristic polynomial " + qpoly::to_string(chi) + " is not squarefree";
    return std::nullopt;
  }
  auto factors = qpoly::factor(chi);
  if (factors.size() > 16) {
    note = "too many irreducible factors";
    return std::nullopt;
  }
  std::string certs;
  for (auto& fac : factors) {
    auto cert = qpoly::qp_irreducible(fac.poly, D.prime());
    if (!cert) {
      note = "no Q_p-irreducibility certificate for " + qpoly::to_string(fac.poly);
      return std::nullopt;
    }
    if (!cert->irreducible) {
      note = qpoly::to_string(fac.poly) + " splits over Q_p (" + cert->reason + ")";
      return std::nullopt;
    }
    certs += (certs.empty() ? "" : "; ") + qpoly::to_string(fac.poly) + ": " + cert->reason;
  }
  std::vector<L0Matrix> comps;
  for (auto& fac : factors) comps.push_back(poly_of(D.phi, fac.poly).kernel());
  const long r = static_cast<long>(comps.size());
  C.res.strategy = "enumeration of the phi-stable lattice (squarefree characteristic polynomial)";
  for (long mask = 1; mask + 1 < (1L << r); ++mask) {
    L0Matrix W(D.field, 0, D.h);
    for (long j = 0; j < r; ++j)
      if (mask >> j & 1) W = subspace::stack(W, comps[j]);
    if (!is_N_stable(D, W)) continue;
    std::string what = "sum of the components for";
    for (long j = 0; j < r; ++j)
      if (mask >> j & 1) what += " " + qpoly::to_string(factors[j].poly);
    if (C.check(W, what)) break;
  }
  return C.done("chi = product of " + std::to_string(r) + " Q_p-irreducible factors [" + certs +
                "]; every proper phi-stable subspace is a sum of components; the N-stable ones were checked");
}

AdmissibilityResult sampling(Checker& C, const std::string& note, const AdmissibilityOptions& opt) {
  const FilteredModule& D = C.D;
  const L0Ptr& F = D.field;
  C.res.strategy = "sampling of stable closures (advisory)";
  std::vector<L0Matrix> seen;
  auto consider = [&](const L0Matrix& W0, const std::string& what) {
    L0Matrix W = stable_closure(D, W0);
    if (W.rows() == 0 || W.rows() == D.h) return false;
    for (auto& s : seen)
      if (s == W) return false;
    seen.push_back(W);
    return C.check(W, what + " (stable closure; stability verified)");
  };
  bool found = false;
  if (D.f() == 1) {
    QPoly chi = rational_charpoly(D.phi);
    for (auto& fac : qpoly::factor(chi)) {
      L0Matrix W = poly_of(D.phi, fac.poly).pow(fac.mult).kernel();
      if ((found = consider(W, "generalized eigenspace for " + qpoly::to_string(fac.poly)))) break;
    }
  }
  for (std::size_t k = 0; !found && k < D.filtration.size(); ++k) {
    const L0Matrix& B = D.filtration[k].basis;
    for (long i = 0; !found && i < B.rows(); ++i)
      found = consider(L0Matrix::from_rows(F, D.h, {B.row(i)}),
                       "vector " + std::to_string(i) + " of Fil^" + std::to_string(D.filtration[k].jump));
  }
  std::mt19937_64 rng(opt.seed);
  std::uniform_int_distribution<int> coef(-3, 3);
  for (long t = 0; !found && t < opt.samples; ++t) {
    const auto& st = D.filtration[rng() % D.filtration.size()];
    if (st.basis.rows() == 0) continue;
    std::vector<L0Number> v(D.h, L0Number::zero(F));
    for (long i = 0; i < st.basis.rows(); ++i) {
      L0Number c = q(F, coef(rng));
      for (long j = 0; j < D.h; ++j) v[j] += c * st.basis(i, j);
    }
    bool nz = false;
    for (auto& x : v) nz = nz || !x.is_zero();
    if (!nz) continue;
    found = consider(L0Matrix::from_rows(F, D.h, {v}), "random vector of Fil^" + std::to_string(st.jump));
  }
  if (found) {
    C.res.reason = "a phi- and N-stable subspace violating t_H <= t_N was found (" + note + ")";
    return C.res;
  }
  C.res.verdict = Verdict::Inconclusive;
  C.res.reason = note + "; sampled " + std::to_string(seen.size()) +
                 " distinct stable subspaces, none violates t_H <= t_N";
  return C.res;
}

}  // namespace

AdmissibilityResult is_weakly_admissible(const FilteredModule& D, const AdmissibilityOptions& opt) {
  require_valid(D);
  for (auto& G : D.galois)
    if (!(G == L0Matrix::identity(D.field, D.h)))
      fail(Errc::GaloisUnsupported, "admissibility needs trivial Galois data (L = K)");
  Checker C{D, {}};
  const long tH = t_H(D);
  const Rational tN = t_N(D);
  if (tN != tH) {
    C.res.strategy = "condition (a)";
    C.res.verdict = Verdict::NotAdmissible;
    C.res.subspaces_checked = 1;
    C.res.witness = Witness{L0Matrix::identity(D.field, D.h), D.h, tH, tN, "the whole module: t_H(D) != t_N(D)"};
    C.res.reason = "t_H = " + std::to_string(tH) + " but t_N = " + to_string(tN);
    return C.res;
  }
  if (D.h <= 1) {
    C.res.strategy = "rank <= 1";
    return C.done("no proper nonzero subspaces");
  }
  if (D.f() == 1 && D.h == 2) return lines(C);
  std::string note;
  if (D.f() == 1) {
    if (auto r = components(C, note)) return *r;
  } else {
    note = "semilinear phi (f > 1): stable subspaces are not enumerated";
  }
  return sampling(C, note, opt);
}

FilteredModule tate_twist(const FilteredModule& D, long i) {
  FilteredModule T = D;
  T.phi = D.phi.scale(q(D.field, ppow_q(D.prime(), -i)));
  for (auto& s : T.filtration) s.jump -= i;
  return T;
}

namespace {

L0Matrix block(const L0Ptr& F, const L0Matrix& a, const L0Matrix& b) {
  L0Matrix m(F, a.rows() + b.rows(), a.cols() + b.cols());
  for (long i = 0; i < a.rows(); ++i)
    for (long j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
  for (long i = 0; i < b.rows(); ++i)
    for (long j = 0; j < b.cols(); ++j) m(a.rows() + i, a.cols() + j) = b(i, j);
  return m;
}

}  // namespace

FilteredModule direct_sum(const FilteredModule& A, const FilteredModule& B) {
  if (A.field != B.field) fail(Errc::CoefficientMismatch, "direct sum needs the same coefficient field");
  const L0Ptr& F = A.field;
  FilteredModule S;
  S.field = F;
  S.h = A.h + B.h;
  S.phi = block(F, A.phi, B.phi);
  S.N = block(F, A.N, B.N);
  std::set<long> jumps;
  for (auto& s : A.filtration) jumps.insert(s.jump);
  for (auto& s : B.filtration) jumps.insert(s.jump);
  for (long j : jumps) {
    L0Matrix a = fil(A, j), b = fil(B, j);
    L0Matrix rows = subspace::stack(block(F, a, L0Matrix(F, 0, B.h)), block(F, L0Matrix(F, 0, A.h), b));
    S.filtration.push_back({j, rows});
  }
  if (!A.galois.empty() || !B.galois.empty()) {
    std::size_t n = std::max(A.galois.size(), B.galois.size());
    for (std::size_t g = 0; g < n; ++g) {
      L0Matrix ga = g < A.galois.size() ? A.galois[g] : L0Matrix::identity(F, A.h);
      L0Matrix gb = g < B.galois.size() ? B.galois[g] : L0Matrix::identity(F, B.h);
      S.galois.push_back(block(F, ga, gb));
    }
  }
  return S;
}

FilteredModule change_basis(const FilteredModule& D, const L0Matrix& P) {
  L0Matrix Pinv = P.inverse();
  FilteredModule E = D;
  E.phi = Pinv * D.phi * P.sigma();
  E.N = Pinv * D.N * P;
  L0Matrix PinvT = Pinv.transpose();
  for (auto& s : E.filtration) s.basis = s.basis * PinvT;
  for (auto& G : E.galois) G = Pinv * G * P;
  return E;
}

FilteredModule zero_module(const L0Ptr& F) {
  FilteredModule Z;
  Z.field = F;
  Z.h = 0;
  Z.phi = L0Matrix(F, 0, 0);
  Z.N = L0Matrix(F, 0, 0);
  return Z;
}

DhReport dh_report(const FilteredModule& D, const AdmissibilityOptions& opt) {
  require_valid(D);
  if (fil_dim(D, 0) != D.h)
    fail(Errc::NotNormalized, "Fil^0 is not the whole module (jumps " + fmt_jumps(hodge_jumps(D)) +
                                  "); apply a Tate twist first");
  DhReport r;
  const Rational tN = t_N(D);
  const long tH = t_H(D);
  r.vplus0 = {tN, D.h};
  r.vplus1 = {Rational(tH), 0};
  r.deficit = tN - tH;
  AdmissibilityResult a = is_weakly_admissible(D, opt);
  r.verdict = a.verdict;
  if (a.verdict == Verdict::Admissible) {
    r.vstar = DhPair{Rational(0), D.h};
    r.note = "admissible: dh(V*) = dh(V+0) - dh(V+1)";
  } else if (a.verdict == Verdict::NotAdmissible) {
    r.note = "not admissible (" + a.reason + "); t_N - t_H = " + to_string(r.deficit);
  } else {
    r.note = "admissibility inconclusive (" + a.reason + "); t_N - t_H = " + to_string(r.deficit);
  }
  return r;
}

}  // namespace phodge
