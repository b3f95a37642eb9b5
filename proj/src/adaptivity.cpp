#include "spce/adaptivity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace spce {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(const char* f, ...) {
  char buf[160];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof(buf), f, args);
  va_end(args);
  return buf;
}

struct Candidate {
  SparseSolution solution;
  MultiIndexSet basis;
  int trace_index = -1;
  bool valid = false;
};

/// Builds the regression matrix for `basis`, runs the solver, and appends a
/// trace entry. Solver failures become degenerate (infinite) criteria.
Candidate fit_candidate(const SolverFn& solver, const Design& design, const InputModel& model,
                        const MultiIndexSet& basis, const std::string& descriptor,
                        AdaptivityTrace& trace) {
  Candidate cand;
  cand.basis = basis;
  TraceEntry entry{descriptor, basis.size(), kInf, false};
  try {
    Mat Psi = build_regression_matrix(basis, families_for(model), design.U);
    cand.solution = solver(Psi, design.y);
    entry.criterion = cand.solution.criterion_value;
    cand.valid = true;
  } catch (const std::exception& e) {
    entry.descriptor += std::string(" [failed: ") + e.what() + "]";
  }
  cand.trace_index = static_cast<int>(trace.entries.size());
  trace.entries.push_back(entry);
  return cand;
}

SparseSurrogate make_surrogate(const Candidate& cand, const Design& design,
                               const InputModel& model, const std::string& solver_id,
                               const std::string& scheme_id, const AdaptivityConfig& cfg) {
  SparseSurrogate s;
  s.input_model = model;
  s.basis = cand.basis;
  s.coefficients = cand.solution.coefficients;
  s.active = cand.solution.active;
  s.solver_id = solver_id;
  s.scheme_id = scheme_id;
  s.criterion_kind = cand.solution.criterion_kind;
  s.criterion_k = cand.solution.criterion_k;
  s.criterion_value = cand.solution.criterion_value;
  s.hyperparameter = cand.solution.hyperparameter;
  s.cv_seed = cand.solution.cv_seed;
  s.design_fingerprint = design.fingerprint();
  s.config_digest = cfg.digest();
  return s;
}

void require_design(const Design& design, const InputModel& model) {
  if (!design.has_y) throw std::invalid_argument("adaptivity: design has no responses");
  if (design.dim() != model.dim()) throw std::invalid_argument("adaptivity: dimension mismatch");
  if (design.n() < 2) throw std::invalid_argument("adaptivity: need at least two points");
}

/// Active multi-indices of a solution; falls back to the constant term so
/// the expansion graph always has a seed.
MultiIndexSet active_or_constant(const Candidate& cand) {
  if (!cand.solution.active.empty()) return cand.basis.subset(cand.solution.active);
  return MultiIndexSet(cand.basis.dim(),
                       {MultiIndex(static_cast<std::size_t>(cand.basis.dim()), 0)});
}

}  // namespace

const std::vector<std::string>& scheme_ids() {
  static const std::vector<std::string> ids = {"static", "pq", "fn", "ad"};
  return ids;
}

void AdaptivityConfig::validate() const {
  if (p_min < 0 || p_max < p_min) throw std::invalid_argument("AdaptivityConfig: bad p range");
  if (q_range.empty()) throw std::invalid_argument("AdaptivityConfig: empty q range");
  for (double q : q_range)
    if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("AdaptivityConfig: q must be in (0,1]");
  if (fn_T < 1) throw std::invalid_argument("AdaptivityConfig: fn_T must be >= 1");
  if (!(fn_q > 0.0 && fn_q <= 1.0)) throw std::invalid_argument("AdaptivityConfig: bad fn_q");
  if (max_basis_size < 1) throw std::invalid_argument("AdaptivityConfig: bad max_basis_size");
}

nlohmann::json AdaptivityConfig::to_json() const {
  return nlohmann::json{{"p_min", p_min},
                        {"p_max", p_max},
                        {"q_range", q_range},
                        {"fn_T", fn_T},
                        {"fn_initial_p", fn_initial_p},
                        {"fn_q", fn_q},
                        {"ad_initial_p", ad_initial_p},
                        {"max_basis_size", max_basis_size}};
}

AdaptivityConfig AdaptivityConfig::from_json(const nlohmann::json& j) {
  AdaptivityConfig c;
  c.p_min = j.value("p_min", c.p_min);
  c.p_max = j.value("p_max", c.p_max);
  if (j.contains("q_range")) c.q_range = j.at("q_range").get<std::vector<double>>();
  c.fn_T = j.value("fn_T", c.fn_T);
  c.fn_initial_p = j.value("fn_initial_p", c.fn_initial_p);
  c.fn_q = j.value("fn_q", c.fn_q);
  c.ad_initial_p = j.value("ad_initial_p", c.ad_initial_p);
  c.max_basis_size = j.value("max_basis_size", c.max_basis_size);
  c.validate();
  return c;
}

std::string AdaptivityConfig::digest() const {
  const std::string s = to_json().dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (char ch : s) {
    h ^= static_cast<unsigned char>(ch);
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

int degree_closest_to(int d, double target_size, double q) {
  int p = 0;
  long long prev_size = 1;
  while (true) {
    const long long size = MultiIndexSet::hyperbolic(d, p, q).size();
    if (static_cast<double>(size) >= target_size || p > 500) {
      if (p == 0) return 0;
      const double d_lo = std::abs(static_cast<double>(prev_size) - target_size);
      const double d_hi = std::abs(static_cast<double>(size) - target_size);
      return d_lo <= d_hi ? p - 1 : p;
    }
    prev_size = size;
    ++p;
  }
}

MultiIndexSet static_basis(int d, int N) {
  if (N < 1) throw std::invalid_argument("static_basis: need N >= 1");
  const double q = d < 20 ? 1.0 : 0.5;
  const int p = degree_closest_to(d, 10.0 / 3.0 * static_cast<double>(N), q);
  return MultiIndexSet::hyperbolic(d, p, q);
}

FitResult static_fit(const SolverFn& solver, const std::string& solver_id, const Design& design,
                     const InputModel& model, const AdaptivityConfig& cfg) {
  require_design(design, model);
  AdaptivityTrace trace;
  MultiIndexSet basis = static_basis(model.dim(), design.n());
  Candidate cand = fit_candidate(solver, design, model, basis,
                                 fmt("static p via P~(10/3)N, P=%d", basis.size()), trace);
  if (!cand.valid) throw std::runtime_error("static fit failed");
  trace.entries[static_cast<std::size_t>(cand.trace_index)].selected = true;
  return {make_surrogate(cand, design, model, solver_id, "static", cfg), trace};
}

FitResult pq_adaptive(const SolverFn& solver, const std::string& solver_id, const Design& design,
                      const InputModel& model, const AdaptivityConfig& cfg) {
  require_design(design, model);
  cfg.validate();
  std::vector<double> qs = cfg.q_range;
  std::sort(qs.begin(), qs.end());

  AdaptivityTrace trace;
  Candidate best;
  double best_value = kInf;
  int best_size = 0;

  for (int p = cfg.p_min; p <= cfg.p_max; ++p) {
    for (double q : qs) {
      MultiIndexSet basis = MultiIndexSet::hyperbolic(model.dim(), p, q);
      if (static_cast<std::size_t>(basis.size()) > cfg.max_basis_size) {
        trace.entries.push_back(
            {fmt("p=%d,q=%.2f [skipped: %d > max_basis_size]", p, q, basis.size()), basis.size(),
             kInf, false});
        continue;
      }
      Candidate cand =
          fit_candidate(solver, design, model, basis, fmt("p=%d,q=%.2f", p, q), trace);
      if (!cand.valid) continue;
      const double v = cand.solution.criterion_value;
      if (v < best_value || (v == best_value && best.valid && basis.size() < best_size)) {
        best = std::move(cand);
        best_value = v;
        best_size = best.basis.size();
      }
    }
  }
  if (!best.valid || !std::isfinite(best_value))
    throw std::runtime_error("pq_adaptive: no valid basis");
  trace.entries[static_cast<std::size_t>(best.trace_index)].selected = true;
  return {make_surrogate(best, design, model, solver_id, "pq", cfg), trace};
}

FitResult forward_neighbor_adaptive(const SolverFn& solver, const std::string& solver_id,
                                    const Design& design, const InputModel& model,
                                    const AdaptivityConfig& cfg) {
  require_design(design, model);
  cfg.validate();
  const int d = model.dim();
  const int n = design.n();

  int p0 = cfg.fn_initial_p;
  if (p0 < 0) p0 = degree_closest_to(d, 10.0 * static_cast<double>(n), cfg.fn_q);
  MultiIndexSet initial = MultiIndexSet::hyperbolic(d, p0, cfg.fn_q);
  while (static_cast<std::size_t>(initial.size()) > cfg.max_basis_size && p0 > 0)
    initial = MultiIndexSet::hyperbolic(d, --p0, cfg.fn_q);

  AdaptivityTrace trace;
  Candidate incumbent = fit_candidate(solver, design, model, initial,
                                      fmt("initial p=%d,q=%.2f", p0, cfg.fn_q), trace);
  if (!incumbent.valid) throw std::runtime_error("forward_neighbor_adaptive: initial fit failed");
  double incumbent_value = incumbent.solution.criterion_value;

  const int max_outer = 100;
  for (int outer = 1; outer <= max_outer; ++outer) {
    MultiIndexSet current = active_or_constant(incumbent);

    std::vector<Candidate> round;
    bool frontier_blocked = false;
    for (int t = 1; t <= cfg.fn_T; ++t) {
      MultiIndexSet frontier = admissible_frontier(current);
      if (frontier.empty() ||
          static_cast<std::size_t>(current.size() + frontier.size()) > cfg.max_basis_size) {
        if (t == 1) frontier_blocked = true;
        break;
      }
      current = current.unite(frontier);
      round.push_back(fit_candidate(solver, design, model, current,
                                    fmt("expand t=%d (outer %d)", t, outer), trace));
    }
    if (frontier_blocked || round.empty()) break;

    int best_t = -1;
    double best_t_value = kInf;
    for (std::size_t i = 0; i < round.size(); ++i) {
      if (!round[i].valid) continue;
      if (round[i].solution.criterion_value < best_t_value) {
        best_t_value = round[i].solution.criterion_value;
        best_t = static_cast<int>(i);
      }
    }
    if (best_t < 0 || best_t_value > incumbent_value) break;
    incumbent = std::move(round[static_cast<std::size_t>(best_t)]);
    incumbent_value = best_t_value;
  }

  trace.entries[static_cast<std::size_t>(incumbent.trace_index)].selected = true;
  return {make_surrogate(incumbent, design, model, solver_id, "fn", cfg), trace};
}

FitResult anisotropic_adaptive(const SolverFn& solver, const std::string& solver_id,
                               const Design& design, const InputModel& model,
                               const AdaptivityConfig& cfg) {
  require_design(design, model);
  cfg.validate();
  const int d = model.dim();
  if (d >= 20)
    throw std::invalid_argument("anisotropic_adaptive: scheme not applicable for d >= 20");

  int p0 = cfg.ad_initial_p;
  if (p0 < 0) p0 = (cfg.p_max + 1) / 2;
  MultiIndexSet initial = MultiIndexSet::total_degree(d, p0);
  while (static_cast<std::size_t>(initial.size()) > cfg.max_basis_size && p0 > 0)
    initial = MultiIndexSet::total_degree(d, --p0);

  AdaptivityTrace trace;
  Candidate last_selected =
      fit_candidate(solver, design, model, initial, fmt("initial p=%d", p0), trace);
  if (!last_selected.valid) throw std::runtime_error("anisotropic_adaptive: initial fit failed");

  Candidate overall_best = last_selected;
  double overall_best_value = last_selected.solution.criterion_value;
  int outer_increase_streak = 0;

  for (int outer = 1; outer <= 10; ++outer) {
    MultiIndexSet active = active_or_constant(last_selected);
    // Removal priority: smallest |coefficient| first, ties by higher total
    // degree, then by later canonical position.
    std::vector<std::pair<double, int>> order;  // (|coef|, position in active)
    {
      std::vector<int> positions(static_cast<std::size_t>(active.size()));
      for (int i = 0; i < active.size(); ++i) positions[static_cast<std::size_t>(i)] = i;
      std::vector<double> mag(static_cast<std::size_t>(active.size()), 0.0);
      for (int i = 0; i < active.size(); ++i) {
        const int pos_in_basis = last_selected.basis.position(active[i]);
        mag[static_cast<std::size_t>(i)] =
            pos_in_basis >= 0 ? std::abs(last_selected.solution.coefficients[pos_in_basis]) : 0.0;
      }
      std::sort(positions.begin(), positions.end(), [&](int a, int b) {
        const double ma = mag[static_cast<std::size_t>(a)], mb = mag[static_cast<std::size_t>(b)];
        if (ma != mb) return ma < mb;
        const int ga = total_degree(active[a]), gb = total_degree(active[b]);
        if (ga != gb) return ga > gb;
        return a > b;
      });
      for (int p : positions) order.push_back({mag[static_cast<std::size_t>(p)], p});
    }

    std::vector<Candidate> inner;
    int strike = 0;
    double e_prev = last_selected.solution.criterion_value;
    for (int i = 1; i <= 10; ++i) {
      const int n_remove =
          static_cast<int>(std::floor(static_cast<double>(i - 1) / 10.0 * active.size()));
      std::vector<char> removed(static_cast<std::size_t>(active.size()), 0);
      for (int r = 0; r < n_remove; ++r) removed[static_cast<std::size_t>(order[static_cast<std::size_t>(r)].second)] = 1;
      std::vector<int> keep;
      for (int j = 0; j < active.size(); ++j)
        if (!removed[static_cast<std::size_t>(j)]) keep.push_back(j);
      MultiIndexSet restricted = active.subset(keep);

      std::vector<int> p_new = restricted.max_degrees();
      for (int& v : p_new) v += 1;
      MultiIndexSet basis = MultiIndexSet::anisotropic(p_new);
      if (static_cast<std::size_t>(basis.size()) > cfg.max_basis_size) {
        trace.entries.push_back({fmt("o=%d,i=%d [skipped: %d > max_basis_size]", outer, i,
                                     basis.size()),
                                 basis.size(), kInf, false});
        if (++strike >= 3) break;
        continue;
      }
      Candidate cand =
          fit_candidate(solver, design, model, basis, fmt("o=%d,i=%d", outer, i), trace);
      double e_i = cand.valid ? cand.solution.criterion_value : kInf;
      if (cand.valid) inner.push_back(std::move(cand));
      if (e_i >= e_prev) {
        if (++strike >= 3) break;
      }
      e_prev = e_i;
    }
    if (inner.empty()) break;

    int best_i = -1;
    double best_i_value = kInf;
    for (std::size_t i = 0; i < inner.size(); ++i) {
      if (inner[i].solution.criterion_value < best_i_value) {
        best_i_value = inner[i].solution.criterion_value;
        best_i = static_cast<int>(i);
      }
    }
    if (best_i < 0) break;

    const double prev_selected_value = last_selected.solution.criterion_value;
    last_selected = std::move(inner[static_cast<std::size_t>(best_i)]);
    if (best_i_value < overall_best_value) {
      overall_best = last_selected;
      overall_best_value = best_i_value;
    }
    if (best_i_value >= prev_selected_value) {
      if (++outer_increase_streak >= 3) break;
    } else {
      outer_increase_streak = 0;
    }
  }

  trace.entries[static_cast<std::size_t>(overall_best.trace_index)].selected = true;
  return {make_surrogate(overall_best, design, model, solver_id, "ad", cfg), trace};
}

FitResult fit_with_scheme(const SolverFn& solver, const std::string& solver_id,
                          const std::string& scheme_id, const Design& design,
                          const InputModel& model, const AdaptivityConfig& cfg) {
  if (scheme_id == "static") return static_fit(solver, solver_id, design, model, cfg);
  if (scheme_id == "pq") return pq_adaptive(solver, solver_id, design, model, cfg);
  if (scheme_id == "fn") return forward_neighbor_adaptive(solver, solver_id, design, model, cfg);
  if (scheme_id == "ad") return anisotropic_adaptive(solver, solver_id, design, model, cfg);
  throw std::invalid_argument("unknown scheme id: " + scheme_id);
}

}  // namespace spce
