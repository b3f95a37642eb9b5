#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "spce/sampling.hpp"
#include "spce/solvers.hpp"
#include "spce/surrogate.hpp"

namespace spce {

/// Scheme ids: "static", "pq", "fn", "ad".
const std::vector<std::string>& scheme_ids();

struct AdaptivityConfig {
  int p_min = 1;
  int p_max = 10;
  std::vector<double> q_range = {1.0};

  int fn_T = 3;
  int fn_initial_p = -1;  // -1: degree with |A^p| closest to 10N
  double fn_q = 1.0;

  int ad_initial_p = -1;  // -1: ceil(p_max / 2)

  std::size_t max_basis_size = 100000;

  void validate() const;
  nlohmann::json to_json() const;
  static AdaptivityConfig from_json(const nlohmann::json& j);
  std::string digest() const;
};

struct TraceEntry {
  std::string descriptor;
  int basis_size = 0;
  double criterion = 0.0;
  bool selected = false;
};

struct AdaptivityTrace {
  std::vector<TraceEntry> entries;
};

struct FitResult {
  SparseSurrogate surrogate;
  AdaptivityTrace trace;
};

/// Static-basis rule: q = 1 for d < 20, q = 0.5 otherwise; degree p chosen
/// so the basis cardinality is closest to (10/3) N (ties to the smaller p).
MultiIndexSet static_basis(int d, int N);

/// Degree with total-degree cardinality closest to the target count.
int degree_closest_to(int d, double target_size, double q = 1.0);

/// Degree and q-norm adaptivity: fits every (p, q) grid point (p ascending
/// outer, q ascending inner), scores with the solver's own criterion, and
/// returns the argmin (ties to the smaller basis). Grid points whose basis
/// would exceed max_basis_size are skipped with a trace note.
FitResult pq_adaptive(const SolverFn& solver, const std::string& solver_id, const Design& design,
                      const InputModel& model, const AdaptivityConfig& cfg);

/// Forward neighbor basis adaptivity: restriction to the active set, T
/// cumulative admissible-frontier expansions, fit of each, and the
/// best-of-T continuation rule; stops when the best of the T expansions no
/// longer improves on the incumbent best (the initial fit included).
FitResult forward_neighbor_adaptive(const SolverFn& solver, const std::string& solver_id,
                                    const Design& design, const InputModel& model,
                                    const AdaptivityConfig& cfg);

/// Anisotropic degree basis adaptivity (low-dimensional models only,
/// d <= 19): outer restriction / inner progressive-removal loops with the
/// componentwise degree step p_new = p_max + 1, strike-counter breaks, and
/// final selection of the best PCE among the outer-loop selections.
FitResult anisotropic_adaptive(const SolverFn& solver, const std::string& solver_id,
                               const Design& design, const InputModel& model,
                               const AdaptivityConfig& cfg);

/// Fit on the static basis (scheme "static").
FitResult static_fit(const SolverFn& solver, const std::string& solver_id, const Design& design,
                     const InputModel& model, const AdaptivityConfig& cfg);

/// Dispatch by scheme id.
FitResult fit_with_scheme(const SolverFn& solver, const std::string& solver_id,
                          const std::string& scheme_id, const Design& design,
                          const InputModel& model, const AdaptivityConfig& cfg);

}  // namespace spce
