#include "phodge/json_io.hpp"

#include <climits>

#include "phodge/errors.hpp"

namespace phodge::io {

void schema_fail(const std::string& path, const std::string& reason) {
  fail(Errc::SchemaError, (path.empty() ? std::string("<root>") : path) + ": " + reason);
}

namespace {

std::string at(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

// Error codes raised while building values from well-typed JSON become schema
// errors at the field that produced them.
template <class Fn>
auto guarded(const std::string& path, Fn fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.code() == Errc::SchemaError) throw;
    schema_fail(path, e.what());
  }
}

Json opt(const std::optional<long>& v) { return v ? Json(*v) : Json(nullptr); }

std::optional<long> read_opt_long(const Json& j, const std::string& key, const std::string& path) {
  const Json* m = optional_member(j, key);
  if (!m || m->is_null()) return std::nullopt;
  return read_long(*m, at(path, key));
}

}  // namespace

const Json* optional_member(const Json& j, const std::string& key) {
  if (!j.is_object()) return nullptr;
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

const Json& member(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) schema_fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) schema_fail(at(path, key), "missing");
  return *it;
}

long read_long(const Json& j, const std::string& path) {
  if (j.is_number_integer()) return j.get<long>();
  if (j.is_number_unsigned() && j.get<unsigned long>() <= static_cast<unsigned long>(LONG_MAX))
    return static_cast<long>(j.get<unsigned long>());
  schema_fail(path, "expected an integer");
}

bool read_bool(const Json& j, const std::string& path) {
  if (!j.is_boolean()) schema_fail(path, "expected a boolean");
  return j.get<bool>();
}

std::string read_string(const Json& j, const std::string& path) {
  if (!j.is_string()) schema_fail(path, "expected a string");
  return j.get<std::string>();
}

const Json& read_array(const Json& j, const std::string& path) {
  if (!j.is_array()) schema_fail(path, "expected an array");
  return j;
}

const Json& read_object(const Json& j, const std::string& path) {
  if (!j.is_object()) schema_fail(path, "expected an object");
  return j;
}

Json to_json(const Rational& x) {
  if (x.get_den() == 1 && x.get_num().fits_slong_p()) return Json(x.get_num().get_si());
  return Json(x.get_str());
}

Rational read_rational(const Json& j, const std::string& path) {
  if (j.is_number_integer() || j.is_number_unsigned()) {
    if (j.is_number_unsigned()) return Rational(Integer(std::to_string(j.get<unsigned long>())));
    return Rational(j.get<long>());
  }
  if (j.is_string()) {
    try {
      return parse_rational(j.get<std::string>());
    } catch (const Error&) {
      schema_fail(path, "not a rational number: '" + j.get<std::string>() + "'");
    }
  }
  schema_fail(path, "expected a rational (integer or \"a/b\" string)");
}

// ---- p-adic numbers

Json to_json(const PadicNumber& x) {
  Json j;
  j["p"] = x.prime();
  j["f"] = 1;
  j["valuation"] = opt(x.valuation());
  j["digits"] = x.digits();
  j["abs_prec"] = x.abs_precision();
  return j;
}

PadicNumber read_padic(const Json& j, const std::string& path) {
  read_object(j, path);
  long p = read_long(member(j, "p", path), at(path, "p"));
  if (!is_prime(p)) schema_fail(at(path, "p"), "not a prime");
  long abs = read_long(member(j, "abs_prec", path), at(path, "abs_prec"));
  auto v = read_opt_long(j, "valuation", path);
  const Json& dj = read_array(member(j, "digits", path), at(path, "digits"));
  std::vector<long> digits;
  for (std::size_t i = 0; i < dj.size(); ++i) digits.push_back(read_long(dj[i], at(at(path, "digits"), i)));
  if (!v) {
    if (!digits.empty()) schema_fail(at(path, "digits"), "a zero has no digits");
    return PadicNumber::zero(p, abs);
  }
  if (*v > abs) schema_fail(at(path, "valuation"), "valuation exceeds the absolute precision");
  return guarded(path, [&] { return PadicNumber::from_digits(p, *v, digits, abs); });
}

Json to_json(const UnramifiedElement& x) {
  if (x.degree() == 1) return to_json(x.coords().front());
  Json j;
  j["p"] = x.prime();
  j["f"] = x.degree();
  j["abs_prec"] = x.abs_precision();
  j["coords"] = Json::array();
  for (auto& c : x.coords()) j["coords"].push_back(to_json(c));
  return j;
}

UnramifiedElement read_unramified(const Json& j, const std::string& path) {
  read_object(j, path);
  long p = read_long(member(j, "p", path), at(path, "p"));
  long f = 1;
  if (auto* fj = optional_member(j, "f")) f = read_long(*fj, at(path, "f"));
  if (!is_prime(p) || f < 1) schema_fail(path, "bad field data");
  FieldPtr K = UnramifiedField::get(p, f);
  if (f == 1) return UnramifiedElement::from_padic(K, read_padic(j, path));
  const Json& cj = read_array(member(j, "coords", path), at(path, "coords"));
  std::vector<PadicNumber> c;
  for (std::size_t i = 0; i < cj.size(); ++i) c.push_back(read_padic(cj[i], at(at(path, "coords"), i)));
  return guarded(path, [&] { return UnramifiedElement(K, c); });
}

// ---- Witt vectors

Json to_json(const WittVector<Integer>& w) {
  Json j;
  j["p"] = w.prime();
  j["ring"] = "Z";
  j["components"] = Json::array();
  for (auto& a : w.components()) j["components"].push_back(to_json(Rational(a)));
  return j;
}

Json to_json(const WittVector<ZMod>& w) {
  Json j;
  j["p"] = w.prime();
  j["modulus"] = w[0].m;
  j["components"] = Json::array();
  for (auto& a : w.components()) j["components"].push_back(a.v);
  return j;
}

// ---- L0

Json field_json(const L0Ptr& F) { return Json{{"p", F->prime()}, {"f", F->residue_degree()}}; }

L0Ptr read_field(const Json& j, const std::string& path) {
  read_object(j, path);
  long p = read_long(member(j, "p", path), at(path, "p"));
  long f = 1;
  if (auto* fj = optional_member(j, "f")) f = read_long(*fj, at(path, "f"));
  if (!is_prime(p)) schema_fail(at(path, "p"), "not a prime");
  if (f < 1 || f > 6) schema_fail(at(path, "f"), "residue degree must be in 1..6");
  return L0Field::get(p, f);
}

Json to_json(const L0Number& x) {
  if (x.is_rational()) return to_json(x.to_rational());
  Json j = Json::array();
  for (auto& c : x.coeffs()) j.push_back(to_json(c));
  return j;
}

L0Number read_l0(const Json& j, const L0Ptr& F, const std::string& path) {
  if (j.is_array()) {
    if (static_cast<long>(j.size()) != F->degree())
      schema_fail(path, "expected " + std::to_string(F->degree()) + " coordinates on powers of zeta");
    std::vector<Rational> c;
    for (std::size_t i = 0; i < j.size(); ++i) c.push_back(read_rational(j[i], at(path, i)));
    return L0Number(F, c);
  }
  return L0Number::rational(F, read_rational(j, path));
}

Json to_json(const L0Matrix& m) {
  Json j = Json::array();
  for (long i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (long k = 0; k < m.cols(); ++k) row.push_back(to_json(m(i, k)));
    j.push_back(row);
  }
  return j;
}

L0Matrix read_matrix(const Json& j, const L0Ptr& F, long rows, long cols, const std::string& path) {
  read_array(j, path);
  if (rows >= 0 && static_cast<long>(j.size()) != rows) schema_fail(path, "expected " + std::to_string(rows) + " rows");
  long r = static_cast<long>(j.size());
  if (r == 0) return L0Matrix(F, 0, std::max(cols, 0L));
  for (std::size_t i = 0; i < j.size(); ++i) {
    read_array(j[i], at(path, i));
    long c = static_cast<long>(j[i].size());
    if (cols < 0) cols = c;
    if (c != cols) schema_fail(at(path, i), "expected " + std::to_string(cols) + " columns");
  }
  L0Matrix m(F, r, cols);
  for (long i = 0; i < r; ++i)
    for (long k = 0; k < cols; ++k) m(i, k) = read_l0(j[i][k], F, at(at(path, i), k));
  return m;
}

// ---- filtered modules

Json to_json(const FilteredModule& D) {
  Json j = field_json(D.field);
  j["phi"] = to_json(D.phi);
  j["N"] = to_json(D.N);
  j["filtration"] = Json::array();
  for (auto& s : D.filtration) j["filtration"].push_back(Json{{"jump", s.jump}, {"basis", to_json(s.basis)}});
  if (!D.galois.empty()) {
    j["galois"] = Json::array();
    for (auto& g : D.galois) j["galois"].push_back(to_json(g));
  }
  return j;
}

FilteredModule read_filtered_module(const Json& j, const std::string& path) {
  FilteredModule D;
  D.field = read_field(j, path);
  const Json& pj = member(j, "phi", path);
  D.phi = read_matrix(pj, D.field, -1, -1, at(path, "phi"));
  D.h = D.phi.rows();
  if (D.h < 1 || D.phi.cols() != D.h) schema_fail(at(path, "phi"), "expected a nonempty square matrix");
  if (auto* nj = optional_member(j, "N"))
    D.N = read_matrix(*nj, D.field, D.h, D.h, at(path, "N"));
  else
    D.N = L0Matrix(D.field, D.h, D.h);
  const Json& fj = read_array(member(j, "filtration", path), at(path, "filtration"));
  for (std::size_t i = 0; i < fj.size(); ++i) {
    std::string sp = at(at(path, "filtration"), i);
    long jump = read_long(member(fj[i], "jump", sp), at(sp, "jump"));
    L0Matrix b = read_matrix(member(fj[i], "basis", sp), D.field, -1, D.h, at(sp, "basis"));
    D.filtration.push_back({jump, b});
  }
  if (auto* gj = optional_member(j, "galois")) {
    read_array(*gj, at(path, "galois"));
    for (std::size_t i = 0; i < gj->size(); ++i)
      D.galois.push_back(read_matrix((*gj)[i], D.field, D.h, D.h, at(at(path, "galois"), i)));
  }
  return D;
}

Json to_json(const Polygon& P) {
  Json j = Json::array();
  for (auto& [x, y] : P.vertices) j.push_back(Json::array({x, to_json(y)}));
  return j;
}

namespace {

Polygon read_polygon(const Json& j, const std::string& path) {
  read_array(j, path);
  Polygon P;
  for (std::size_t i = 0; i < j.size(); ++i) {
    std::string vp = at(path, i);
    if (!j[i].is_array() || j[i].size() != 2) schema_fail(vp, "expected a vertex [x, y]");
    P.vertices.emplace_back(read_long(j[i][0], at(vp, 0)), read_rational(j[i][1], at(vp, 1)));
  }
  return P;
}

}  // namespace

Json to_json(const Polygons& P) {
  Json j;
  j["newton"] = to_json(P.newton);
  j["hodge"] = to_json(P.hodge);
  j["newton_slopes"] = Json::array();
  for (auto& s : P.newton_slopes) j["newton_slopes"].push_back(to_json(s));
  j["hodge_jumps"] = P.hodge_jumps;
  return j;
}

Polygons read_polygons(const Json& j, const std::string& path) {
  Polygons P;
  P.newton = read_polygon(member(j, "newton", path), at(path, "newton"));
  P.hodge = read_polygon(member(j, "hodge", path), at(path, "hodge"));
  const Json& s = read_array(member(j, "newton_slopes", path), at(path, "newton_slopes"));
  for (std::size_t i = 0; i < s.size(); ++i) P.newton_slopes.push_back(read_rational(s[i], at(at(path, "newton_slopes"), i)));
  const Json& h = read_array(member(j, "hodge_jumps", path), at(path, "hodge_jumps"));
  for (std::size_t i = 0; i < h.size(); ++i) P.hodge_jumps.push_back(read_long(h[i], at(at(path, "hodge_jumps"), i)));
  return P;
}

Verdict read_verdict(const Json& j, const std::string& path) {
  std::string s = read_string(j, path);
  for (Verdict v : {Verdict::Admissible, Verdict::NotAdmissible, Verdict::Inconclusive})
    if (s == verdict_name(v)) return v;
  schema_fail(path, "unknown verdict '" + s + "'");
}

Json to_json(const AdmissibilityResult& r, const L0Ptr& F) {
  Json j;
  j["verdict"] = verdict_name(r.verdict);
  j["strategy"] = r.strategy;
  j["reason"] = r.reason;
  j["subspaces_checked"] = r.subspaces_checked;
  if (r.witness) {
    const Witness& w = *r.witness;
    j["witness"] = Json{{"dim", w.dim},
                        {"tH", w.t_H},
                        {"tN", to_json(w.t_N)},
                        {"basis", w.basis.rows() ? to_json(w.basis) : Json::array()},
                        {"description", w.description}};
  } else {
    j["witness"] = nullptr;
  }
  (void)F;
  return j;
}

AdmissibilityResult read_admissibility(const Json& j, const L0Ptr& F, const std::string& path) {
  AdmissibilityResult r;
  r.verdict = read_verdict(member(j, "verdict", path), at(path, "verdict"));
  r.strategy = read_string(member(j, "strategy", path), at(path, "strategy"));
  r.reason = read_string(member(j, "reason", path), at(path, "reason"));
  r.subspaces_checked = read_long(member(j, "subspaces_checked", path), at(path, "subspaces_checked"));
  const Json& wj = member(j, "witness", path);
  if (!wj.is_null()) {
    std::string wp = at(path, "witness");
    Witness w;
    w.dim = read_long(member(wj, "dim", wp), at(wp, "dim"));
    w.t_H = read_long(member(wj, "tH", wp), at(wp, "tH"));
    w.t_N = read_rational(member(wj, "tN", wp), at(wp, "tN"));
    const Json& bj = member(wj, "basis", wp);
    w.basis = bj.empty() ? L0Matrix() : read_matrix(bj, F, -1, -1, at(wp, "basis"));
    w.description = read_string(member(wj, "description", wp), at(wp, "description"));
    r.witness = w;
  }
  return r;
}

Json to_json(const DhPair& d) { return Json{{"d", to_json(d.d)}, {"h", d.h}}; }

namespace {

DhPair read_dh(const Json& j, const std::string& path) {
  return DhPair{read_rational(member(j, "d", path), at(path, "d")), read_long(member(j, "h", path), at(path, "h"))};
}

}  // namespace

Json to_json(const DhReport& r) {
  Json j;
  j["vplus0"] = to_json(r.vplus0);
  j["vplus1"] = to_json(r.vplus1);
  j["vstar"] = r.vstar ? to_json(*r.vstar) : Json(nullptr);
  j["deficit"] = to_json(r.deficit);
  j["verdict"] = verdict_name(r.verdict);
  j["note"] = r.note;
  return j;
}

DhReport read_dh_report(const Json& j, const std::string& path) {
  DhReport r;
  r.vplus0 = read_dh(member(j, "vplus0", path), at(path, "vplus0"));
  r.vplus1 = read_dh(member(j, "vplus1", path), at(path, "vplus1"));
  const Json& s = member(j, "vstar", path);
  if (!s.is_null()) r.vstar = read_dh(s, at(path, "vstar"));
  r.deficit = read_rational(member(j, "deficit", path), at(path, "deficit"));
  r.verdict = read_verdict(member(j, "verdict", path), at(path, "verdict"));
  r.note = read_string(member(j, "note", path), at(path, "note"));
  return r;
}

// ---- period rings

PeriodConfig read_period_config(const Json& j, const std::string& path) {
  PeriodConfig c;
  c.kind = guarded(at(path, "model"), [&] { return parse_model(read_string(member(j, "model", path), at(path, "model"))); });
  c.p = read_long(member(j, "p", path), at(path, "p"));
  if (!is_prime(c.p)) schema_fail(at(path, "p"), "not a prime");
  if (auto* f = optional_member(j, "f")) c.f = read_long(*f, at(path, "f"));
  if (auto* d = optional_member(j, "depth")) c.depth = read_long(*d, at(path, "depth"));
  if (auto* k = optional_member(j, "prec")) c.prec = read_long(*k, at(path, "prec"));
  if (auto* k = optional_member(j, "cutoff")) c.cutoff = read_long(*k, at(path, "cutoff"));
  if (c.f < 1 || c.f > 6) schema_fail(at(path, "f"), "residue degree must be in 1..6");
  if (c.depth < 0 || c.depth > 6) schema_fail(at(path, "depth"), "depth must be in 0..6");
  if (c.prec < 1 || c.prec > 200) schema_fail(at(path, "prec"), "precision must be in 1..200");
  return c;
}

Json to_json(const CSideElement& x) {
  Json j;
  j["depth"] = x.field()->depth();
  j["coeffs"] = Json::array();
  for (auto& [i, c] : x.coeffs()) j["coeffs"].push_back(Json::array({i, to_json(c)}));
  return j;
}

CSideElement read_cside(const Json& j, const ModelPtr& M, const std::string& path) {
  long depth = read_long(member(j, "depth", path), at(path, "depth"));
  if (depth < 0 || depth > M->depth()) schema_fail(at(path, "depth"), "depth outside the model");
  CSidePtr F = CSideField::get(M->kind(), M->field(), depth);
  const Json& cj = read_array(member(j, "coeffs", path), at(path, "coeffs"));
  std::map<long, UnramifiedElement> c;
  for (std::size_t i = 0; i < cj.size(); ++i) {
    std::string ip = at(at(path, "coeffs"), i);
    if (!cj[i].is_array() || cj[i].size() != 2) schema_fail(ip, "expected [index, value]");
    c.emplace(read_long(cj[i][0], at(ip, 0)), read_unramified(cj[i][1], at(ip, 1)));
  }
  return guarded(path, [&] { return CSideElement::from_coeffs(F, std::move(c)); });
}

Json to_json(const BdRElement& x) {
  const PeriodConfig& c = x.model()->config();
  Json j;
  j["model"] = std::string(model_name(c.kind));
  j["p"] = c.p;
  j["f"] = c.f;
  j["depth"] = c.depth;
  j["prec"] = c.prec;
  j["N"] = x.order();
  j["coeffs"] = Json::array();
  for (auto& v : x.coeffs()) j["coeffs"].push_back(to_json(v));
  return j;
}

BdRElement read_bdr(const Json& j, const std::string& path) {
  ModelPtr M = PeriodModel::make(read_period_config(j, path));
  long N = read_long(member(j, "N", path), at(path, "N"));
  const Json& cj = read_array(member(j, "coeffs", path), at(path, "coeffs"));
  if (static_cast<long>(cj.size()) != N) schema_fail(at(path, "coeffs"), "expected N coefficients");
  std::vector<CSideElement> c;
  for (std::size_t i = 0; i < cj.size(); ++i) c.push_back(read_cside(cj[i], M, at(at(path, "coeffs"), i)));
  return guarded(path, [&] { return BdRElement(M, c); });
}

// ---- Robba series

Json to_json(const RobbaSeries& f) {
  Json j;
  j["field"] = field_json(f.field());
  j["r_exponent"] = f.radius() ? to_json(*f.radius()) : Json(nullptr);
  j["window"] = Json::array({f.lo(), f.hi()});
  j["lower_exact"] = f.lower_exact();
  j["upper_exact"] = f.upper_exact();
  Json c = Json::object(), pr = Json::object();
  for (long n = f.lo(); n <= f.hi(); ++n) {
    const Coef& k = f.stored()[n - f.lo()];
    c[std::to_string(n)] = to_json(k.value);
    if (!k.exact()) pr[std::to_string(n)] = k.prec;
  }
  j["coeffs"] = c;
  if (!pr.empty()) j["prec"] = pr;
  return j;
}

RobbaSeries read_series(const Json& j, const L0Ptr& F, const std::string& path) {
  if (!j.is_object()) return RobbaSeries::constant(F, read_l0(j, F, path));
  L0Ptr G = F;
  if (auto* fj = optional_member(j, "field")) {
    G = read_field(*fj, at(path, "field"));
    if (G != F) schema_fail(at(path, "field"), "series over a different field than its module");
  }
  const Json& cj = read_object(member(j, "coeffs", path), at(path, "coeffs"));
  std::map<long, L0Number> vals;
  for (auto it = cj.begin(); it != cj.end(); ++it) {
    long n = 0;
    try {
      std::size_t used = 0;
      n = std::stol(it.key(), &used);
      if (used != it.key().size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      schema_fail(at(at(path, "coeffs"), it.key()), "index is not an integer");
    }
    vals.emplace(n, read_l0(it.value(), F, at(at(path, "coeffs"), it.key())));
  }
  long lo = 0, hi = -1;
  if (auto* w = optional_member(j, "window")) {
    std::string wp = at(path, "window");
    if (!w->is_array() || w->size() != 2) schema_fail(wp, "expected [min, max]");
    lo = read_long((*w)[0], at(wp, 0));
    hi = read_long((*w)[1], at(wp, 1));
    if (hi < lo - 1) schema_fail(wp, "max < min − 1");
    if (hi - lo > 100000) schema_fail(wp, "window too large");
  } else if (!vals.empty()) {
    lo = vals.begin()->first;
    hi = vals.rbegin()->first;
  }
  for (auto& [n, v] : vals)
    if (n < lo || n > hi) schema_fail(at(at(path, "coeffs"), std::to_string(n)), "index outside the window");
  bool le = true, ue = true;
  if (auto* x = optional_member(j, "lower_exact")) le = read_bool(*x, at(path, "lower_exact"));
  if (auto* x = optional_member(j, "upper_exact")) ue = read_bool(*x, at(path, "upper_exact"));
  std::map<long, long> prec;
  if (auto* pj = optional_member(j, "prec")) {
    read_object(*pj, at(path, "prec"));
    for (auto it = pj->begin(); it != pj->end(); ++it) {
      long n = 0;
      try {
        n = std::stol(it.key());
      } catch (const std::exception&) {
        schema_fail(at(at(path, "prec"), it.key()), "index is not an integer");
      }
      prec[n] = read_long(it.value(), at(at(path, "prec"), it.key()));
    }
  }
  std::vector<Coef> c;
  for (long n = lo; n <= hi; ++n) {
    auto it = vals.find(n);
    Coef k{it == vals.end() ? L0Number::zero(F) : it->second};
    if (auto pt = prec.find(n); pt != prec.end()) k.prec = pt->second;
    c.push_back(k);
  }
  RobbaSeries s(F, lo, std::move(c), le, ue);
  if (auto* r = optional_member(j, "r_exponent"); r && !r->is_null()) {
    Rational rho = read_rational(*r, at(path, "r_exponent"));
    if (rho <= 0) schema_fail(at(path, "r_exponent"), "must be positive");
    s = s.with_radius(rho);
  }
  return s;
}

Json to_json(const SeriesMatrix& m) {
  Json j = Json::array();
  for (long i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (long k = 0; k < m.cols(); ++k) row.push_back(to_json(m(i, k)));
    j.push_back(row);
  }
  return j;
}

SeriesMatrix read_series_matrix(const Json& j, const L0Ptr& F, long rows, long cols, const std::string& path) {
  read_array(j, path);
  if (static_cast<long>(j.size()) != rows) schema_fail(path, "expected " + std::to_string(rows) + " rows");
  SeriesMatrix m(F, rows, cols);
  for (long i = 0; i < rows; ++i) {
    std::string rp = at(path, static_cast<std::size_t>(i));
    read_array(j[i], rp);
    if (static_cast<long>(j[i].size()) != cols) schema_fail(rp, "expected " + std::to_string(cols) + " columns");
    for (long k = 0; k < cols; ++k) m(i, k) = read_series(j[i][k], F, at(rp, static_cast<std::size_t>(k)));
  }
  return m;
}

Json to_json(const ConnectionModule& M) {
  Json j;
  j["field"] = field_json(M.field);
  j["rank"] = M.h;
  j["pole"] = pole_name(M.pole);
  j["A"] = to_json(M.A);
  if (M.frobenius) j["frobenius"] = Json{{"z", to_json(M.frobenius->z)}, {"phi", to_json(M.frobenius->phi)}};
  return j;
}

namespace {

Pole read_pole(const Json& j, const std::string& path) {
  std::string s = read_string(j, path);
  if (s == "logarithmic") return Pole::Logarithmic;
  if (s == "holomorphic") return Pole::Holomorphic;
  schema_fail(path, "pole must be \"logarithmic\" or \"holomorphic\"");
}

}  // namespace

ConnectionModule read_connection(const Json& j, const std::string& path) {
  ConnectionModule M;
  M.field = read_field(member(j, "field", path), at(path, "field"));
  M.h = read_long(member(j, "rank", path), at(path, "rank"));
  if (M.h < 1 || M.h > 7) schema_fail(at(path, "rank"), "rank must be in 1..7");
  M.pole = read_pole(member(j, "pole", path), at(path, "pole"));
  M.A = read_series_matrix(member(j, "A", path), M.field, M.h, M.h, at(path, "A"));
  if (auto* fj = optional_member(j, "frobenius"); fj && !fj->is_null()) {
    std::string fp = at(path, "frobenius");
    FrobeniusData fr;
    fr.z = read_series(member(*fj, "z", fp), M.field, at(fp, "z"));
    fr.phi = read_series_matrix(member(*fj, "phi", fp), M.field, M.h, M.h, at(fp, "phi"));
    M.frobenius = fr;
  }
  return M;
}

Json to_json(const ResidueReport& r) {
  Json j;
  j["residue"] = to_json(r.residue);
  j["charpoly"] = Json::array();
  for (auto& c : r.charpoly) j["charpoly"].push_back(to_json(c));
  j["factored"] = r.factored;
  j["factors"] = Json::array();
  for (auto& f : r.factors) {
    Json poly = Json::array();
    for (auto& c : f.poly) poly.push_back(to_json(c));
    j["factors"].push_back(
        Json{{"poly", poly}, {"multiplicity", f.multiplicity}, {"root", f.root ? to_json(*f.root) : Json(nullptr)}});
  }
  j["exponents"] = Json::array();
  for (auto& e : r.exponents) j["exponents"].push_back(to_json(e));
  j["nilpotent"] = r.nilpotent;
  j["semisimple"] = r.semisimple ? Json(*r.semisimple) : Json(nullptr);
  return j;
}

ResidueReport read_residue_report(const Json& j, const L0Ptr& F, const std::string& path) {
  ResidueReport r;
  r.residue = read_matrix(member(j, "residue", path), F, -1, -1, at(path, "residue"));
  const Json& cp = read_array(member(j, "charpoly", path), at(path, "charpoly"));
  for (std::size_t i = 0; i < cp.size(); ++i) r.charpoly.push_back(read_l0(cp[i], F, at(at(path, "charpoly"), i)));
  r.factored = read_bool(member(j, "factored", path), at(path, "factored"));
  const Json& fs = read_array(member(j, "factors", path), at(path, "factors"));
  for (std::size_t i = 0; i < fs.size(); ++i) {
    std::string fp = at(at(path, "factors"), i);
    ExponentFactor f;
    const Json& pj = read_array(member(fs[i], "poly", fp), at(fp, "poly"));
    for (std::size_t k = 0; k < pj.size(); ++k) f.poly.push_back(read_rational(pj[k], at(at(fp, "poly"), k)));
    f.multiplicity = read_long(member(fs[i], "multiplicity", fp), at(fp, "multiplicity"));
    const Json& rj = member(fs[i], "root", fp);
    if (!rj.is_null()) f.root = read_rational(rj, at(fp, "root"));
    r.factors.push_back(f);
  }
  const Json& ej = read_array(member(j, "exponents", path), at(path, "exponents"));
  for (std::size_t i = 0; i < ej.size(); ++i) r.exponents.push_back(read_rational(ej[i], at(at(path, "exponents"), i)));
  r.nilpotent = read_bool(member(j, "nilpotent", path), at(path, "nilpotent"));
  const Json& s = member(j, "semisimple", path);
  if (!s.is_null()) r.semisimple = read_bool(s, at(path, "semisimple"));
  return r;
}

Json to_json(const FormalSolution& s) {
  Json j;
  j["order"] = s.order;
  j["Y"] = to_json(s.Y);
  j["unipotent"] = s.unipotent;
  j["residue"] = s.residue.rows() ? to_json(s.residue) : Json(nullptr);
  j["filtration"] = Json::array();
  for (auto& k : s.filtration) j["filtration"].push_back(to_json(k));
  return j;
}

FormalSolution read_formal_solution(const Json& j, const L0Ptr& F, const std::string& path) {
  FormalSolution s;
  s.order = read_long(member(j, "order", path), at(path, "order"));
  const Json& yj = read_array(member(j, "Y", path), at(path, "Y"));
  long h = static_cast<long>(yj.size());
  s.Y = read_series_matrix(yj, F, h, h, at(path, "Y"));
  s.unipotent = read_bool(member(j, "unipotent", path), at(path, "unipotent"));
  const Json& rj = member(j, "residue", path);
  if (!rj.is_null()) s.residue = read_matrix(rj, F, h, h, at(path, "residue"));
  const Json& fj = read_array(member(j, "filtration", path), at(path, "filtration"));
  for (std::size_t i = 0; i < fj.size(); ++i) {
    const Json& m = fj[i];
    s.filtration.push_back(m.empty() ? L0Matrix(F, 0, h) : read_matrix(m, F, -1, h, at(at(path, "filtration"), i)));
  }
  return s;
}

Json to_json(const FrobeniusCheck& c) {
  Json j;
  j["pass"] = c.pass;
  j["window"] = Json::array({c.lo, c.hi});
  j["verified_through"] = c.verified_through;
  j["first_failure"] = opt(c.first_failure);
  return j;
}

FrobeniusCheck read_frobenius_check(const Json& j, const std::string& path) {
  FrobeniusCheck c;
  c.pass = read_bool(member(j, "pass", path), at(path, "pass"));
  const Json& w = member(j, "window", path);
  if (!w.is_array() || w.size() != 2) schema_fail(at(path, "window"), "expected [min, max]");
  c.lo = read_long(w[0], at(at(path, "window"), 0));
  c.hi = read_long(w[1], at(at(path, "window"), 1));
  c.verified_through = read_long(member(j, "verified_through", path), at(path, "verified_through"));
  c.first_failure = read_opt_long(j, "first_failure", path);
  return c;
}

Json to_json(const GammaActionData& g) {
  Json j;
  j["field"] = field_json(g.field);
  j["gamma"] = to_json(g.gamma);
  j["chi"] = to_json(g.chi);
  j["chi_prec"] = g.chi_prec == kExactPrecision ? Json(nullptr) : Json(g.chi_prec);
  j["r"] = g.r;
  return j;
}

GammaActionData read_gamma(const Json& j, const L0Ptr& F, const std::string& path) {
  GammaActionData g;
  g.field = F;
  if (auto* fj = optional_member(j, "field"))
    if (read_field(*fj, at(path, "field")) != F) schema_fail(at(path, "field"), "gamma data over a different field");
  const Json& gj = read_array(member(j, "gamma", path), at(path, "gamma"));
  long h = static_cast<long>(gj.size());
  if (h < 1 || h > 7) schema_fail(at(path, "gamma"), "rank must be in 1..7");
  g.gamma = read_series_matrix(gj, F, h, h, at(path, "gamma"));
  g.chi = read_rational(member(j, "chi", path), at(path, "chi"));
  if (auto c = read_opt_long(j, "chi_prec", path)) g.chi_prec = *c;
  if (auto r = read_opt_long(j, "r", path)) g.r = *r;
  if (g.r < 1 || g.r > 64) schema_fail(at(path, "r"), "t-order must be in 1..64");
  return g;
}

Json to_json(const SenResult& s) {
  Json j;
  j["nabla0"] = to_json(s.nabla0);
  j["log_chi"] = to_json(s.log_chi);
  j["prec"] = s.prec;
  j["r"] = s.r;
  j["log_terms"] = s.log_terms;
  j["guard"] = s.guard;
  return j;
}

SenResult read_sen_result(const Json& j, const L0Ptr& F, const std::string& path) {
  SenResult s;
  const Json& nj = read_array(member(j, "nabla0", path), at(path, "nabla0"));
  long h = static_cast<long>(nj.size());
  s.nabla0 = read_series_matrix(nj, F, h, h, at(path, "nabla0"));
  s.log_chi = read_rational(member(j, "log_chi", path), at(path, "log_chi"));
  s.prec = read_long(member(j, "prec", path), at(path, "prec"));
  s.r = read_long(member(j, "r", path), at(path, "r"));
  s.log_terms = read_long(member(j, "log_terms", path), at(path, "log_terms"));
  s.guard = read_long(member(j, "guard", path), at(path, "guard"));
  return s;
}

Json to_json(const D0Result& d) {
  Json j;
  j["pass"] = d.pass;
  j["order"] = d.order;
  j["gauged"] = to_json(d.gauged);
  j["pole_index"] = opt(d.pole_index);
  j["holomorphic"] = d.holomorphic ? to_json(*d.holomorphic) : Json(nullptr);
  return j;
}

D0Result read_d0_result(const Json& j, const L0Ptr& F, const std::string& path) {
  D0Result d;
  d.pass = read_bool(member(j, "pass", path), at(path, "pass"));
  d.order = read_long(member(j, "order", path), at(path, "order"));
  const Json& gj = read_array(member(j, "gauged", path), at(path, "gauged"));
  long h = static_cast<long>(gj.size());
  d.gauged = read_series_matrix(gj, F, h, h, at(path, "gauged"));
  d.pole_index = read_opt_long(j, "pole_index", path);
  const Json& hj = member(j, "holomorphic", path);
  if (!hj.is_null()) d.holomorphic = read_connection(hj, at(path, "holomorphic"));
  return d;
}

}  // namespace phodge::io
