#pragma once

// JSON forms of library values.
//
// Rationals are JSON integers when they are integral and fit in 64 bits, and
// strings "a/b" otherwise. Readers take the field path of the value so that
// schema errors point at the offending field (SchemaError "path: reason").

#include <string>

#include "json.hpp"
#include "phodge/filtered.hpp"
#include "phodge/padic.hpp"
#include "phodge/period.hpp"
#include "phodge/robba.hpp"
#include "phodge/witt.hpp"

namespace phodge::io {

using Json = nlohmann::json;

[[noreturn]] void schema_fail(const std::string& path, const std::string& reason);

/// Member lookup; SchemaError when missing (required) or of the wrong type.
const Json& member(const Json& j, const std::string& key, const std::string& path);
const Json* optional_member(const Json& j, const std::string& key);
long read_long(const Json& j, const std::string& path);
bool read_bool(const Json& j, const std::string& path);
std::string read_string(const Json& j, const std::string& path);
const Json& read_array(const Json& j, const std::string& path);
const Json& read_object(const Json& j, const std::string& path);

Json to_json(const Rational& x);
Rational read_rational(const Json& j, const std::string& path);

// ---- p-adic numbers: {p, f, valuation, digits[], abs_prec}

Json to_json(const PadicNumber& x);
PadicNumber read_padic(const Json& j, const std::string& path);
/// f = 1: a Q_p record; f > 1: {p, f, abs_prec, coords: [Q_p records]}.
Json to_json(const UnramifiedElement& x);
UnramifiedElement read_unramified(const Json& j, const std::string& path);

// ---- Witt vectors

Json to_json(const WittVector<Integer>& w);
Json to_json(const WittVector<ZMod>& w);

// ---- exact L0 coefficients, matrices and filtered modules

/// {p, f}
Json field_json(const L0Ptr& F);
L0Ptr read_field(const Json& j, const std::string& path);
/// A rational, or an array of rationals on 1, ζ, ..., ζ^(d−1).
Json to_json(const L0Number& x);
L0Number read_l0(const Json& j, const L0Ptr& F, const std::string& path);
Json to_json(const L0Matrix& m);
/// rows x cols, or any shape when rows < 0.
L0Matrix read_matrix(const Json& j, const L0Ptr& F, long rows, long cols, const std::string& path);

/// {p, f, phi, N, filtration: [{jump, basis}], galois?}
Json to_json(const FilteredModule& D);
FilteredModule read_filtered_module(const Json& j, const std::string& path);

Json to_json(const Polygon& P);
Json to_json(const Polygons& P);
Polygons read_polygons(const Json& j, const std::string& path);
Json to_json(const AdmissibilityResult& r, const L0Ptr& F);
AdmissibilityResult read_admissibility(const Json& j, const L0Ptr& F, const std::string& path);
Verdict read_verdict(const Json& j, const std::string& path);
Json to_json(const DhPair& d);
Json to_json(const DhReport& r);
DhReport read_dh_report(const Json& j, const std::string& path);

// ---- period rings

PeriodConfig read_period_config(const Json& j, const std::string& path);
Json to_json(const CSideElement& x);
CSideElement read_cside(const Json& j, const ModelPtr& M, const std::string& path);
/// {model, p, f, depth, N, coeffs: [[[index, value], ...], ...]}
Json to_json(const BdRElement& x);
BdRElement read_bdr(const Json& j, const std::string& path);

// ---- Robba series and connections

/// {field, r_exponent, window: [min, max], coeffs: {index: value}, lower_exact,
/// upper_exact, prec?: {index: digits}}. A bare number or string is accepted as
/// a constant when reading.
Json to_json(const RobbaSeries& f);
RobbaSeries read_series(const Json& j, const L0Ptr& F, const std::string& path);
Json to_json(const SeriesMatrix& m);
SeriesMatrix read_series_matrix(const Json& j, const L0Ptr& F, long rows, long cols, const std::string& path);
/// {field, rank, pole, A, frobenius?: {z, phi}}
Json to_json(const ConnectionModule& M);
ConnectionModule read_connection(const Json& j, const std::string& path);
Json to_json(const ResidueReport& r);
ResidueReport read_residue_report(const Json& j, const L0Ptr& F, const std::string& path);
Json to_json(const FormalSolution& s);
FormalSolution read_formal_solution(const Json& j, const L0Ptr& F, const std::string& path);
/// The report fields (the compared matrices are not serialized).
Json to_json(const FrobeniusCheck& c);
FrobeniusCheck read_frobenius_check(const Json& j, const std::string& path);
/// {field, gamma, chi, chi_prec?, r}
Json to_json(const GammaActionData& g);
GammaActionData read_gamma(const Json& j, const L0Ptr& F, const std::string& path);
Json to_json(const SenResult& s);
SenResult read_sen_result(const Json& j, const L0Ptr& F, const std::string& path);
Json to_json(const D0Result& d);
D0Result read_d0_result(const Json& j, const L0Ptr& F, const std::string& path);

}  // namespace phodge::io
