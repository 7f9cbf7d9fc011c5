#include "phodge/cli.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "phodge/errors.hpp"

namespace phodge::cli {

using io::member;
using io::optional_member;
using io::read_long;
using io::schema_fail;

namespace {

const std::vector<std::string> kKinds = {"filtered_module", "connection_module", "period_computation",
                                         "witt_computation"};

const std::vector<std::pair<std::string, std::string>> kCommands = {
    {"admissible", "filtered_module"},   {"polygon", "filtered_module"},       {"twist", "filtered_module"},
    {"dh", "filtered_module"},           {"theta", "period_computation"},      {"xi", "period_computation"},
    {"log", "period_computation"},       {"solve", "connection_module"},       {"residue", "connection_module"},
    {"sen", "connection_module"},        {"frobcheck", "connection_module"},   {"d0", "connection_module"},
    {"witt", "witt_computation"},
};

const std::vector<std::string> kWittOps = {"add", "sub", "mul", "neg", "ghost", "frobenius", "verschiebung"};

std::string rational_text(const Rational& x) { return x.get_str(); }

std::string polygon_text(const Polygon& P) {
  std::string s;
  for (auto& [x, y] : P.vertices) s += (s.empty() ? "" : "-") + ("(" + std::to_string(x) + "," + rational_text(y) + ")");
  return s;
}

// ---- payload readers shared by validation and execution

struct WittPayload {
  long p = 2;
  std::optional<long> k;  // Z/p^k, or Z when absent
  std::string op = "add";
  std::vector<Integer> a, b;
};

std::vector<Integer> read_integer_vector(const Json& j, const std::string& path) {
  io::read_array(j, path);
  if (j.empty() || j.size() > 8) schema_fail(path, "Witt vectors have length 1..8");
  std::vector<Integer> v;
  for (std::size_t i = 0; i < j.size(); ++i) {
    Rational x = io::read_rational(j[i], path + "[" + std::to_string(i) + "]");
    if (x.get_den() != 1) schema_fail(path + "[" + std::to_string(i) + "]", "expected an integer");
    v.push_back(x.get_num());
  }
  return v;
}

WittPayload read_witt_payload(const Json& j, const std::string& path) {
  io::read_object(j, path);
  WittPayload w;
  w.p = read_long(member(j, "p", path), path + ".p");
  if (!is_prime(w.p)) schema_fail(path + ".p", "not a prime");
  if (auto* r = optional_member(j, "ring")) {
    std::string ring = io::read_string(*r, path + ".ring");
    if (ring.rfind("Z/p^", 0) == 0) {
      try {
        w.k = std::stol(ring.substr(4));
      } catch (const std::exception&) {
        schema_fail(path + ".ring", "expected \"Z\" or \"Z/p^k\"");
      }
      if (*w.k < 1) schema_fail(path + ".ring", "k must be positive");
      Integer m = ppow(w.p, *w.k);
      if (mpz_sizeinbase(m.get_mpz_t(), 2) > 62) schema_fail(path + ".ring", "p^k must fit in 62 bits");
    } else if (ring != "Z") {
      schema_fail(path + ".ring", "expected \"Z\" or \"Z/p^k\"");
    }
  }
  if (auto* o = optional_member(j, "op")) {
    w.op = io::read_string(*o, path + ".op");
    if (std::find(kWittOps.begin(), kWittOps.end(), w.op) == kWittOps.end())
      schema_fail(path + ".op", "unknown Witt operation '" + w.op + "'");
  }
  w.a = read_integer_vector(member(j, "a", path), path + ".a");
  bool binary = w.op == "add" || w.op == "sub" || w.op == "mul";
  if (binary) {
    w.b = read_integer_vector(member(j, "b", path), path + ".b");
    if (w.b.size() != w.a.size()) schema_fail(path + ".b", "length differs from a");
  }
  return w;
}

struct PeriodPayload {
  PeriodConfig config;
  std::optional<WRElement> element;
  ModelPtr model;
  std::optional<std::string> series;
};

PeriodPayload read_period_payload(const Json& j, const std::string& path, long default_prec) {
  io::read_object(j, path);
  PeriodPayload out;
  Json cj = j;
  if (!optional_member(j, "prec")) cj["prec"] = default_prec;
  out.config = io::read_period_config(cj, path);
  out.model = PeriodModel::make(out.config);
  const ModelPtr& M = out.model;
  if (auto* e = optional_member(j, "element")) {
    std::string ep = path + ".element";
    if (e->is_string()) {
      std::string name = e->get<std::string>();
      if (name == "uniformizer")
        out.element = WRElement::uniformizer(M);
      else if (name == "generator")
        out.element = WRElement::monomial(M, UnramifiedElement::one(M->field(), M->prec()), 1);
      else
        schema_fail(ep, "expected \"uniformizer\", \"generator\" or a list of terms");
    } else {
      io::read_array(*e, ep);
      WRElement w = WRElement::zero(M);
      for (std::size_t i = 0; i < e->size(); ++i) {
        std::string tp = ep + "[" + std::to_string(i) + "]";
        Rational c = io::read_rational(member((*e)[i], "coeff", tp), tp + ".coeff");
        Rational x = io::read_rational(member((*e)[i], "exp", tp), tp + ".exp");
        if (M->kind() == TiltModel::Kummer && x < 0) schema_fail(tp + ".exp", "kummer exponents are nonnegative");
        try {
          w = w + WRElement::monomial(M, UnramifiedElement::exact(M->field(), c, M->prec()), x);
        } catch (const Error& err) {
          schema_fail(tp, err.what());
        }
      }
      out.element = w;
    }
  }
  if (auto* s = optional_member(j, "series")) {
    out.series = io::read_string(*s, path + ".series");
    if (*out.series != "log_pi" && *out.series != "t") schema_fail(path + ".series", "expected \"log_pi\" or \"t\"");
  }
  return out;
}

struct ConnectionPayload {
  ConnectionModule M;
  std::optional<SeriesMatrix> basis;
  std::optional<GammaActionData> gamma;
};

ConnectionPayload read_connection_payload(const Json& j, const std::string& path) {
  ConnectionPayload c;
  c.M = io::read_connection(j, path);
  if (auto* b = optional_member(j, "basis"))
    c.basis = io::read_series_matrix(*b, c.M.field, c.M.h, c.M.h, path + ".basis");
  if (auto* g = optional_member(j, "gamma")) c.gamma = io::read_gamma(*g, c.M.field, path + ".gamma");
  return c;
}

void validate_settings(const Json& j, const std::string& path) {
  io::read_object(j, path);
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    std::string kp = path + "." + k;
    if (k == "window") {
      if (!it->is_array() || it->size() != 2) schema_fail(kp, "expected [min, max]");
      long a = read_long((*it)[0], kp + "[0]"), b = read_long((*it)[1], kp + "[1]");
      if (a > b) schema_fail(kp, "min > max");
    } else if (k == "prec" || k == "order" || k == "t_order") {
      long v = read_long(*it, kp);
      if (v < 1 || v > 256) schema_fail(kp, "must be in 1..256");
    } else if (k == "twist") {
      read_long(*it, kp);
    } else {
      schema_fail(kp, "unknown setting");
    }
  }
}

void validate_payload(const std::string& kind, const Json& payload, const std::string& path) {
  if (kind == "filtered_module")
    io::read_filtered_module(payload, path);
  else if (kind == "connection_module")
    read_connection_payload(payload, path);
  else if (kind == "period_computation")
    read_period_payload(payload, path, 12);
  else
    read_witt_payload(payload, path);
  if (auto* s = optional_member(payload, "settings")) validate_settings(*s, path + ".settings");
}

long line_of(const std::string& text, std::size_t byte) {
  long line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

Json error_json(const std::string& code, const std::string& message) {
  return Json{{"error", code}, {"message", message}};
}

// ---- commands

Outcome filtered_command(const std::string& cmd, const FilteredModule& D, const Settings& s) {
  Outcome o;
  if (cmd == "admissible") {
    AdmissibilityResult r = is_weakly_admissible(D);
    o.result = io::to_json(r, D.field);
    o.result["tH"] = t_H(D);
    o.result["tN"] = io::to_json(t_N(D));
    o.status = r.verdict == Verdict::Admissible      ? Status::Ok
               : r.verdict == Verdict::NotAdmissible ? Status::Fail
                                                     : Status::Error;
    o.summary = verdict_name(r.verdict);
    if (r.witness) o.summary += " (witness: " + r.witness->description + ")";
    if (r.verdict == Verdict::Inconclusive && !r.reason.empty()) o.summary += " (" + r.reason + ")";
  } else if (cmd == "polygon") {
    Polygons P = polygons(D);
    o.result = io::to_json(P);
    o.result["newton_above_hodge"] = newton_above_hodge(P);
    o.summary = "Newton " + polygon_text(P.newton) + "; Hodge " + polygon_text(P.hodge);
  } else if (cmd == "twist") {
    FilteredModule T = tate_twist(D, s.twist);
    AdmissibilityResult before = is_weakly_admissible(D), after = is_weakly_admissible(T);
    o.result = Json{{"i", s.twist},
                    {"tH", t_H(T)},
                    {"tN", io::to_json(t_N(T))},
                    {"tH_shift", t_H(T) - t_H(D)},
                    {"tN_shift", io::to_json(Rational(t_N(T) - t_N(D)))},
                    {"hodge_jumps", hodge_jumps(T)},
                    {"verdict", verdict_name(after.verdict)},
                    {"verdict_unchanged", before.verdict == after.verdict}};
    o.status = after.verdict == Verdict::Admissible      ? Status::Ok
               : after.verdict == Verdict::NotAdmissible ? Status::Fail
                                                         : Status::Error;
    o.summary = "twist " + std::to_string(s.twist) + ": tH " + std::to_string(t_H(T)) + ", tN " +
                rational_text(t_N(T)) + ", " + verdict_name(after.verdict);
  } else if (cmd == "dh") {
    DhReport r = dh_report(D);
    o.result = io::to_json(r);
    auto pair = [](const DhPair& d) { return "(" + rational_text(d.d) + "," + std::to_string(d.h) + ")"; };
    o.summary = "V+0 " + pair(r.vplus0) + ", V+1 " + pair(r.vplus1) + ", V* " + (r.vstar ? pair(*r.vstar) : "undefined");
  }
  return o;
}

std::string cside_text(const CSideElement& x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

Outcome period_command(const std::string& cmd, const PeriodPayload& P, const Settings& s) {
  Outcome o;
  const ModelPtr& M = P.model;
  if (cmd == "theta" || cmd == "xi") {
    if (!P.element) fail(Errc::InvalidArgument, "payload has no element");
    if (cmd == "theta") {
      CSideElement v = theta(*P.element);
      auto val = v.valuation();
      o.result = Json{{"theta", io::to_json(v)}, {"valuation", val ? io::to_json(*val) : Json(nullptr)},
                      {"text", cside_text(v)}};
      o.summary = "theta = " + cside_text(v);
    } else {
      BdRElement x = xi_expand(*P.element, s.order);
      Json text = Json::array();
      for (auto& c : x.coeffs()) text.push_back(cside_text(c));
      o.result = Json{{"expansion", io::to_json(x)}, {"fil_degree", x.fil_degree()}, {"text", text}};
      o.summary = "order " + std::to_string(x.order()) + ", Fil degree " + std::to_string(x.fil_degree());
    }
  } else {
    std::string series = P.series ? *P.series : (M->kind() == TiltModel::Kummer ? "log_pi" : "t");
    BdRElement x = series == "log_pi" ? log_pi(M, s.order) : t_element(M, s.order);
    Json text = Json::array();
    for (auto& c : x.coeffs()) text.push_back(cside_text(c));
    o.result = Json{{"series", series}, {"expansion", io::to_json(x)}, {"fil_degree", x.fil_degree()}, {"text", text}};
    o.summary = series + " mod Fil^" + std::to_string(x.order()) + ", Fil degree " + std::to_string(x.fil_degree());
  }
  return o;
}

std::string exponents_text(const ResidueReport& r) {
  std::string s = "{";
  for (std::size_t i = 0; i < r.exponents.size(); ++i) s += (i ? "," : "") + rational_text(r.exponents[i]);
  for (auto& f : r.factors)
    if (!f.root) s += std::string(s.size() > 1 ? "," : "") + "roots of " + qpoly::to_string(f.poly);
  return s + "}";
}

Outcome connection_command(const std::string& cmd, const ConnectionPayload& C, const Settings& s) {
  Outcome o;
  const ConnectionModule& M = C.M;
  if (cmd == "solve") {
    // one extra order so that the residual is determined modulo t^t_order
    FormalSolution S = solve_horizontal_formal(M, s.t_order + 1);
    SeriesMatrix res = formal_residual(M, S);
    auto w = res.known_window();
    bool zero = res.is_zero() && w.second >= s.t_order - 1;
    o.result = io::to_json(S);
    o.result["residual_zero"] = zero;
    o.result["residual_through"] = w.second == LONG_MAX ? Json(nullptr) : Json(w.second);
    o.status = zero ? Status::Ok : Status::Fail;
    if (M.pole == Pole::Holomorphic) {
      o.summary = "Y mod t^" + std::to_string(S.order) + ", residual " + (zero ? "0" : "NONZERO") + " mod t^" +
                  std::to_string(w.second + 1);
    } else {
      std::string dims;
      for (auto& k : S.filtration) dims += (dims.empty() ? "" : ",") + std::to_string(k.rows());
      o.summary = "formally unipotent mod t^" + std::to_string(S.order) + ", filtration dims " + dims;
    }
  } else if (cmd == "residue") {
    ResidueReport r = residue_exponents(M);
    o.result = io::to_json(r);
    o.summary = "exponents " + exponents_text(r) +
                (r.semisimple ? (*r.semisimple ? ", semisimple" : ", not semisimple") : "") +
                (r.nilpotent ? ", nilpotent" : "");
  } else if (cmd == "sen") {
    if (!C.gamma) fail(Errc::InvalidArgument, "payload has no gamma data");
    SenResult r = sen_connection(*C.gamma, s.prec);
    SeriesMatrix back = sen_exponentiate(r);
    Agreement ag = compare(back, C.gamma->gamma.truncate(0, C.gamma->r - 1), s.prec);
    o.result = io::to_json(r);
    o.result["roundtrip"] = ag.equal;
    o.status = ag.equal ? Status::Ok : Status::Fail;
    o.summary = "nabla0 mod t^" + std::to_string(r.r) + " at p^" + std::to_string(r.prec) + ", roundtrip " +
                (ag.equal ? "ok" : "FAILED");
  } else if (cmd == "frobcheck") {
    FrobeniusCheck c = frobenius_structure_check(M, s.prec, std::make_pair(s.window_lo, s.window_hi));
    o.result = io::to_json(c);
    o.status = c.pass ? Status::Ok : Status::Fail;
    o.summary = c.pass ? "pass on [" + std::to_string(c.lo) + "," + std::to_string(c.hi) + "]"
                       : "fail at index " + std::to_string(c.first_failure ? *c.first_failure : c.lo) +
                             ", verified through " + std::to_string(c.verified_through);
  } else if (cmd == "d0") {
    SeriesMatrix B = C.basis ? *C.basis : SeriesMatrix::identity(M.field, M.h);
    D0Result d = d0_lattice_test(M, B, s.t_order);
    o.result = io::to_json(d);
    if (d.pass) {
      FormalSolution S = solve_horizontal_formal(*d.holomorphic, s.t_order);
      o.result["gauged_solves"] = formal_residual(*d.holomorphic, S).is_zero();
    }
    o.status = d.pass ? Status::Ok : Status::Fail;
    o.summary = d.pass ? "pass to order " + std::to_string(d.order)
                       : "fail: pole term at t^" + std::to_string(d.pole_index ? *d.pole_index : 0);
  }
  return o;
}

template <class R>
Json components_json(const WittVector<R>& w) {
  Json j = Json::array();
  for (auto& c : w.components()) {
    if constexpr (std::is_same_v<R, ZMod>)
      j.push_back(c.v);
    else
      j.push_back(io::to_json(Rational(c)));
  }
  return j;
}

template <class R>
std::string components_text(const Json& j) {
  std::string s = "(";
  for (std::size_t i = 0; i < j.size(); ++i) s += (i ? "," : "") + (j[i].is_string() ? j[i].get<std::string>() : j[i].dump());
  return s + ")";
}

template <class R>
Outcome witt_run(const WittPayload& w, const std::vector<R>& a, const std::vector<R>& b) {
  Outcome o;
  WittVector<R> A(w.p, a);
  Json value;
  if (w.op == "ghost") {
    Json g = Json::array();
    for (auto& c : ghost_map(A)) {
      if constexpr (std::is_same_v<R, ZMod>)
        g.push_back(c.v);
      else
        g.push_back(io::to_json(Rational(c)));
    }
    value = g;
  } else if (w.op == "neg") {
    value = components_json(-A);
  } else if (w.op == "frobenius") {
    value = components_json(witt_frobenius(A));
  } else if (w.op == "verschiebung") {
    value = components_json(verschiebung(A));
  } else {
    WittVector<R> B(w.p, b);
    value = components_json(w.op == "add" ? A + B : w.op == "sub" ? A - B : A * B);
  }
  o.result = Json{{"p", w.p}, {"ring", w.k ? "Z/p^" + std::to_string(*w.k) : std::string("Z")}, {"op", w.op}};
  o.result[w.op == "ghost" ? "ghost" : "value"] = value;
  o.summary = w.op + " = " + components_text<R>(value);
  return o;
}

Outcome witt_command(const WittPayload& w) {
  if (!w.k) return witt_run<Integer>(w, w.a, w.b);
  const unsigned long m = ppow(w.p, *w.k).get_ui();
  auto conv = [&](const std::vector<Integer>& v) {
    std::vector<ZMod> r;
    for (auto& x : v) r.push_back(ZMod::from_integer(x, m));
    return r;
  };
  return witt_run<ZMod>(w, conv(w.a), conv(w.b));
}

}  // namespace

// ---- corpus

Corpus parse_corpus(const std::string& text, const std::string& source) {
  Corpus c;
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    c.issues.push_back({source + ": line " + std::to_string(line_of(text, e.byte)), "malformed JSON"});
    return c;
  }
  const Json* entries = nullptr;
  if (doc.is_array()) {
    entries = &doc;
  } else if (doc.is_object()) {
    auto* sj = optional_member(doc, "schema");
    if (!sj)
      c.issues.push_back({"schema", "missing"});
    else if (!sj->is_number_integer() || sj->get<long>() != 1)
      c.issues.push_back({"schema", "unsupported schema version (expected 1)"});
    auto* ej = optional_member(doc, "entries");
    if (!ej || !ej->is_array())
      c.issues.push_back({"entries", ej ? "expected an array" : "missing"});
    else
      entries = ej;
    if (!c.issues.empty()) return c;
  } else {
    c.issues.push_back({"<root>", "expected an object with \"schema\" and \"entries\""});
    return c;
  }
  std::set<std::string> ids;
  for (std::size_t i = 0; i < entries->size(); ++i) {
    const Json& e = (*entries)[i];
    const std::string path = "entries[" + std::to_string(i) + "]";
    try {
      io::read_object(e, path);
      CorpusEntry ce;
      ce.id = io::read_string(member(e, "id", path), path + ".id");
      if (ce.id.empty()) schema_fail(path + ".id", "empty id");
      if (!ids.insert(ce.id).second) schema_fail(path + ".id", "duplicate id '" + ce.id + "'");
      ce.kind = io::read_string(member(e, "kind", path), path + ".kind");
      if (std::find(kKinds.begin(), kKinds.end(), ce.kind) == kKinds.end())
        schema_fail(path + ".kind", "unknown kind '" + ce.kind + "'");
      ce.payload = io::read_object(member(e, "payload", path), path + ".payload");
      validate_payload(ce.kind, ce.payload, path + ".payload");
      if (auto* x = optional_member(e, "expected")) {
        io::read_object(*x, path + ".expected");
        for (auto it = x->begin(); it != x->end(); ++it) {
          if (!command_applies(it.key(), ce.kind))
            schema_fail(path + ".expected." + it.key(), "not a command for kind " + ce.kind);
          io::read_object(it.value(), path + ".expected." + it.key());
        }
        ce.expected = *x;
      }
      for (auto it = e.begin(); it != e.end(); ++it)
        if (it.key() != "id" && it.key() != "kind" && it.key() != "payload" && it.key() != "expected")
          schema_fail(path + "." + it.key(), "unknown field");
      c.entries.push_back(std::move(ce));
    } catch (const Error& err) {
      std::string what = err.what();
      const std::string tag = "SchemaError: ";
      if (what.rfind(tag, 0) == 0) what = what.substr(tag.size());
      auto colon = what.find(": ");
      if (err.code() == Errc::SchemaError && colon != std::string::npos)
        c.issues.push_back({what.substr(0, colon), what.substr(colon + 2)});
      else
        c.issues.push_back({path, what});
    }
  }
  return c;
}

Corpus load_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::IoError, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_corpus(ss.str(), path);
}

Settings entry_settings(const Settings& global, const CorpusEntry& e) {
  Settings s = global;
  const Json* j = optional_member(e.payload, "settings");
  if (!j) return s;
  if (auto* x = optional_member(*j, "prec")) s.prec = x->get<long>();
  if (auto* x = optional_member(*j, "order")) s.order = x->get<long>();
  if (auto* x = optional_member(*j, "t_order")) s.t_order = x->get<long>();
  if (auto* x = optional_member(*j, "twist")) s.twist = x->get<long>();
  if (auto* x = optional_member(*j, "window")) {
    s.window_lo = (*x)[0].get<long>();
    s.window_hi = (*x)[1].get<long>();
  }
  return s;
}

const char* status_name(Status s) {
  switch (s) {
    case Status::Ok:
      return "ok";
    case Status::Fail:
      return "fail";
    case Status::Error:
      return "error";
    case Status::Skipped:
      return "skipped";
  }
  return "error";
}

bool command_applies(const std::string& command, const std::string& kind) {
  for (auto& [c, k] : kCommands)
    if (c == command) return k == kind;
  return false;
}

Outcome run_entry(const std::string& command, const CorpusEntry& e, const Settings& global) {
  Outcome o;
  try {
    if (!command_applies(command, e.kind))
      fail(Errc::KindMismatch, "command '" + command + "' does not apply to kind " + e.kind);
    Settings s = entry_settings(global, e);
    const char* needs = command == "sen" ? "gamma" : command == "frobcheck" ? "frobenius" : nullptr;
    if (needs && !optional_member(e.payload, needs)) {
      o.status = Status::Skipped;
      o.result = Json{{"skipped", std::string("payload has no ") + needs}};
      o.summary = std::string("no ") + needs + " data";
    } else if (e.kind == "filtered_module")
      o = filtered_command(command, io::read_filtered_module(e.payload, "payload"), s);
    else if (e.kind == "period_computation")
      o = period_command(command, read_period_payload(e.payload, "payload", s.prec), s);
    else if (e.kind == "connection_module")
      o = connection_command(command, read_connection_payload(e.payload, "payload"), s);
    else
      o = witt_command(read_witt_payload(e.payload, "payload"));
  } catch (const Error& err) {
    o.status = Status::Error;
    o.result = error_json(std::string(errc_name(err.code())), err.what());
    o.summary = err.what();
  } catch (const std::exception& err) {
    o.status = Status::Error;
    o.result = error_json("InternalError", err.what());
    o.summary = err.what();
  }
  o.id = e.id;
  o.kind = e.kind;
  o.command = command;
  return o;
}

Outcome regress_entry(const CorpusEntry& e, const Settings& s) {
  Outcome o;
  o.id = e.id;
  o.kind = e.kind;
  o.command = "regress";
  if (!e.expected || e.expected->empty()) {
    o.status = Status::Skipped;
    o.result = Json{{"checked", 0}, {"mismatches", Json::array()}};
    o.summary = "no expected block";
    return o;
  }
  Json mismatches = Json::array();
  long checked = 0;
  bool errored = false;
  std::string first_error;
  for (auto it = e.expected->begin(); it != e.expected->end(); ++it) {
    Outcome r = run_entry(it.key(), e, s);
    Json got = r.result;
    got["status"] = status_name(r.status);
    bool expects_error = it.value().contains("error");
    if (r.status == Status::Error && !expects_error) {
      errored = true;
      if (first_error.empty()) first_error = it.key() + ": " + r.summary;
    }
    for (auto f = it.value().begin(); f != it.value().end(); ++f) {
      ++checked;
      Json g = got.contains(f.key()) ? got[f.key()] : Json(nullptr);
      if (g != f.value())
        mismatches.push_back(Json{{"command", it.key()}, {"field", f.key()}, {"expected", f.value()}, {"got", g}});
    }
  }
  o.result = Json{{"checked", checked}, {"mismatches", mismatches}};
  if (errored) {
    o.status = Status::Error;
    o.summary = first_error;
  } else if (!mismatches.empty()) {
    o.status = Status::Fail;
    const Json& m = mismatches[0];
    o.summary = m["command"].get<std::string>() + "." + m["field"].get<std::string>() + ": expected " +
                m["expected"].dump() + ", got " + m["got"].dump();
    if (mismatches.size() > 1) o.summary += " (+" + std::to_string(mismatches.size() - 1) + " more)";
  } else {
    o.summary = "pass (" + std::to_string(checked) + (checked == 1 ? " field)" : " fields)");
  }
  return o;
}

int exit_code(const std::vector<Outcome>& outcomes) {
  int code = 0;
  for (auto& o : outcomes) {
    if (o.status == Status::Error) return 2;
    if (o.status == Status::Fail) code = 1;
  }
  return code;
}

// ---- front end

namespace {

void print_table(std::ostream& out, const std::vector<Outcome>& rows) {
  std::size_t wid = 5, wcmd = 7, wst = 6;
  for (auto& r : rows) {
    wid = std::max(wid, r.id.size());
    wcmd = std::max(wcmd, r.command.size());
    wst = std::max(wst, std::string(status_name(r.status)).size());
  }
  out << std::left << std::setw(static_cast<int>(wid)) << "ENTRY" << "  " << std::setw(static_cast<int>(wcmd))
      << "COMMAND" << "  " << std::setw(static_cast<int>(wst)) << "STATUS" << "  RESULT\n";
  for (auto& r : rows)
    out << std::left << std::setw(static_cast<int>(wid)) << r.id << "  " << std::setw(static_cast<int>(wcmd))
        << r.command << "  " << std::setw(static_cast<int>(wst)) << status_name(r.status) << "  " << r.summary
        << "\n";
}

Json summary_json(const std::vector<Outcome>& rows, int code) {
  long n[4] = {0, 0, 0, 0};
  for (auto& r : rows) ++n[static_cast<int>(r.status)];
  return Json{{"summary", {{"ok", n[0]}, {"fail", n[1]}, {"error", n[2]}, {"skipped", n[3]}, {"exit", code}}}};
}

std::vector<Integer> parse_vector_operand(const std::string& text) {
  std::string s;
  for (char c : text)
    if (c != '(' && c != ')' && c != ' ') s += c;
  std::vector<Integer> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    Integer x;
    if (item.empty() || x.set_str(item, 10) != 0) fail(Errc::SchemaError, "not an integer vector: '" + text + "'");
    v.push_back(x);
  }
  return v;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"phodge: p-adic Hodge theory computations on a corpus of examples"};
  std::string command;
  std::vector<std::string> operands;
  std::string corpus_path;
  std::string entry_id;
  Settings global;
  std::vector<long> window;
  bool json = false;
  long jobs = 1;
  long witt_p = 0;
  long witt_k = 0;
  app.add_option("command", command,
                 "admissible | polygon | twist | dh | theta | xi | log | solve | residue | sen | frobcheck | d0 | "
                 "witt | regress")
      ->required();
  app.add_option("operands", operands, "witt: operation and vectors, e.g. `witt add 1,0 1,0 --p 2`");
  app.add_option("--corpus", corpus_path, "corpus file (JSON, schema 1)");
  app.add_option("--entry", entry_id, "run a single entry by id");
  app.add_option("--prec", global.prec, "p-adic digits")->check(CLI::Range(1, 256));
  app.add_option("--order", global.order, "xi-adic order N")->check(CLI::Range(1, 64));
  app.add_option("--t-order", global.t_order, "t-adic order for solve and d0")->check(CLI::Range(1, 256));
  app.add_option("--window", window, "series window as two integers: MIN MAX")->expected(2);
  app.add_option("--by", global.twist, "twist: the Tate twist index");
  app.add_option("--jobs", jobs, "parallel workers")->check(CLI::Range(1, 256));
  app.add_option("--p", witt_p, "witt: the prime for vectors given on the command line");
  app.add_option("--modulus", witt_k, "witt: work over Z/p^K instead of Z");
  app.add_flag("--json", json, "JSON lines instead of a table");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "phodge: " << e.what() << "\n" << app.help();
    return 2;
  }
  if (window.size() == 2) {
    global.window_lo = window[0];
    global.window_hi = window[1];
  }

  bool known = command == "regress";
  for (auto& [c, k] : kCommands) known = known || c == command;
  if (!known) {
    err << "phodge: " << errc_name(Errc::UnknownCommand) << ": '" << command << "'\n";
    return 2;
  }

  std::vector<CorpusEntry> entries;
  if (!corpus_path.empty()) {
    Corpus c;
    try {
      c = load_corpus(corpus_path);
    } catch (const Error& e) {
      err << "phodge: " << e.what() << "\n";
      return 2;
    }
    if (!c.issues.empty()) {
      for (auto& i : c.issues) {
        if (json)
          out << Json{{"schema_error", {{"location", i.location}, {"reason", i.reason}}}}.dump() << "\n";
        else
          err << "phodge: SchemaError at " << i.location << ": " << i.reason << "\n";
      }
      return 2;
    }
    entries = std::move(c.entries);
  }

  if (command == "witt" && !operands.empty()) {
    std::string op = operands[0];
    if (corpus_path.empty()) {
      Json payload{{"p", witt_p}, {"op", op}};
      if (witt_k > 0) payload["ring"] = "Z/p^" + std::to_string(witt_k);
      try {
        for (std::size_t i = 1; i < operands.size() && i < 3; ++i) {
          Json v = Json::array();
          for (auto& x : parse_vector_operand(operands[i])) v.push_back(io::to_json(Rational(x)));
          payload[i == 1 ? "a" : "b"] = v;
        }
        validate_payload("witt_computation", payload, "command line");
      } catch (const Error& e) {
        err << "phodge: " << e.what() << "\n";
        return 2;
      }
      entries.push_back(CorpusEntry{"cli", "witt_computation", payload, std::nullopt});
    } else {
      for (auto& e : entries)
        if (e.kind == "witt_computation") e.payload["op"] = op;
    }
  }
  if (entries.empty() && corpus_path.empty()) {
    err << "phodge: --corpus is required for '" << command << "'\n";
    return 2;
  }

  std::vector<const CorpusEntry*> selected;
  for (auto& e : entries) {
    if (!entry_id.empty() && e.id != entry_id) continue;
    if (command != "regress" && entry_id.empty() && !command_applies(command, e.kind)) continue;
    selected.push_back(&e);
  }
  if (!entry_id.empty() && selected.empty()) {
    err << "phodge: no entry with id '" << entry_id << "'\n";
    return 2;
  }

  std::vector<Outcome> rows(selected.size());
  auto work = [&](std::size_t i) {
    rows[i] = command == "regress" ? regress_entry(*selected[i], global) : run_entry(command, *selected[i], global);
  };
  if (jobs <= 1 || selected.size() < 2) {
    for (std::size_t i = 0; i < selected.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (long t = 0; t < std::min<long>(jobs, static_cast<long>(selected.size())); ++t)
      pool.emplace_back([&] {
        for (std::size_t i; (i = next++) < selected.size();) work(i);
      });
    for (auto& t : pool) t.join();
  }

  int code = exit_code(rows);
  if (json) {
    for (auto& r : rows)
      out << Json{{"id", r.id}, {"kind", r.kind}, {"command", r.command}, {"status", status_name(r.status)},
                  {"result", r.result}}
                 .dump()
          << "\n";
    out << summary_json(rows, code).dump() << "\n";
  } else {
    print_table(out, rows);
    Json s = summary_json(rows, code)["summary"];
    out << "\n" << rows.size() << " entries: " << s["ok"] << " ok, " << s["fail"] << " fail, " << s["error"]
        << " error, " << s["skipped"] << " skipped; exit " << code << "\n";
  }
  return code;
}

}  // namespace phodge::cli
