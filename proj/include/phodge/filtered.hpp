#pragma once

// Filtered (φ,N)-modules over L0 with L = K = L0.
//
// Vectors are columns of coordinates; φ(x) = Φ·σ(x) and N(x) = N·x. The
// filtration is a list of steps (jump, basis rows), jumps increasing:
// Fil^i is the span of the first step whose jump is >= i, and 0 past the last.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "phodge/linalg.hpp"

namespace phodge {

struct FiltrationStep {
  long jump;
  L0Matrix basis;  // rows
};

struct FilteredModule {
  L0Ptr field;
  long h = 0;
  L0Matrix phi;
  L0Matrix N;
  std::vector<FiltrationStep> filtration;
  std::vector<L0Matrix> galois;

  long prime() const { return field->prime(); }
  long f() const { return field->residue_degree(); }
};

struct ValidationReport {
  bool valid = true;
  std::vector<std::string> failures;
};

ValidationReport validate(const FilteredModule& D);
/// InvalidModule listing every failure.
void require_valid(const FilteredModule& D);

/// Basis rows of Fil^i.
L0Matrix fil(const FilteredModule& D, long i);
long fil_dim(const FilteredModule& D, long i);
/// Filtration jumps with multiplicity, increasing.
std::vector<long> hodge_jumps(const FilteredModule& D);

Rational t_N(const FilteredModule& D);
long t_H(const FilteredModule& D);

/// The rows of W span a subspace; t_H for the induced filtration.
long subspace_t_H(const FilteredModule& D, const L0Matrix& W);
/// W must be φ-stable.
Rational subspace_t_N(const FilteredModule& D, const L0Matrix& W);
bool is_phi_stable(const FilteredModule& D, const L0Matrix& W);
bool is_N_stable(const FilteredModule& D, const L0Matrix& W);
/// Smallest φ- and N-stable subspace containing the rows of W.
L0Matrix stable_closure(const FilteredModule& D, const L0Matrix& W);

/// The L0-linear map φ^f = Φ σ(Φ) ... σ^(f−1)(Φ).
L0Matrix linearized_phi(const FilteredModule& D);

struct Polygon {
  std::vector<std::pair<long, Rational>> vertices;
  static Polygon from_slopes(const std::vector<Rational>& sorted_slopes);
  friend bool operator==(const Polygon& a, const Polygon& b) { return a.vertices == b.vertices; }
};

struct Polygons {
  Polygon newton;
  Polygon hodge;
  std::vector<Rational> newton_slopes;
  std::vector<long> hodge_jumps;
};

Polygons polygons(const FilteredModule& D);
/// Whether the Newton polygon lies on or above the Hodge polygon.
bool newton_above_hodge(const Polygons& P);

enum class Verdict { Admissible, NotAdmissible, Inconclusive };
const char* verdict_name(Verdict v);

struct Witness {
  /// Basis rows of the violating subspace; empty when it is not defined over L0.
  L0Matrix basis;
  long dim = 0;
  long t_H = 0;
  Rational t_N;
  std::string description;
};

struct AdmissibilityResult {
  Verdict verdict = Verdict::Inconclusive;
  std::optional<Witness> witness;
  std::string strategy;
  std::string reason;
  long subspaces_checked = 0;
};

struct AdmissibilityOptions {
  std::uint64_t seed = 1;
  long samples = 64;
};

AdmissibilityResult is_weakly_admissible(const FilteredModule& D, const AdmissibilityOptions& opt = {});

FilteredModule tate_twist(const FilteredModule& D, long i);
FilteredModule direct_sum(const FilteredModule& A, const FilteredModule& B);
/// The same module in the basis given by the columns of P (old coordinates).
FilteredModule change_basis(const FilteredModule& D, const L0Matrix& P);
/// The zero module.
FilteredModule zero_module(const L0Ptr& F);

struct DhPair {
  Rational d;
  long h = 0;
  friend bool operator==(const DhPair& a, const DhPair& b) { return a.d == b.d && a.h == b.h; }
};

struct DhReport {
  DhPair vplus0;
  DhPair vplus1;
  std::optional<DhPair> vstar;
  Rational deficit;  // t_N − t_H
  Verdict verdict = Verdict::Inconclusive;
  std::string note;
};

/// NotNormalized unless Fil^0 is everything.
DhReport dh_report(const FilteredModule& D, const AdmissibilityOptions& opt = {});

}  // namespace phodge
