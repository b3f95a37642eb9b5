#include "spce/auto_select.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "spce/adaptivity.hpp"
#include "spce/rng.hpp"
#include "spce/solvers.hpp"

namespace spce {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

int rank_of(const std::vector<std::string>& ids, const std::string& id) {
  for (std::size_t i = 0; i < ids.size(); ++i)
    if (ids[i] == id) return static_cast<int>(i);
  return static_cast<int>(ids.size());
}

}  // namespace

std::string class_name(BenchClass c) {
  switch (c) {
    case BenchClass::LowSmall: return "lowdim_small";
    case BenchClass::LowLarge: return "lowdim_large";
    case BenchClass::HighSmall: return "highdim_small";
    case BenchClass::HighLarge: return "highdim_large";
  }
  return "?";
}

BenchClass class_of(int d, bool large_ed, bool* warning) {
  if (warning) *warning = d > 10 && d < 20;
  const bool high = d >= 20;
  if (high) return large_ed ? BenchClass::HighLarge : BenchClass::HighSmall;
  return large_ed ? BenchClass::LowLarge : BenchClass::LowSmall;
}

std::pair<std::string, std::string> fixed_rule_combo(BenchClass c) {
  switch (c) {
    case BenchClass::LowSmall: return {"bcs", "fn"};
    case BenchClass::LowLarge: return {"sploo", "fn"};
    case BenchClass::HighSmall: return {"spk5", "fn"};
    case BenchClass::HighLarge: return {"spk5", "fn"};
  }
  return {"", ""};
}

SelectionCriterion SelectionCriterion::parse(const std::string& name, std::uint64_t seed,
                                             const Design* validation) {
  SelectionCriterion c;
  c.seed = seed;
  c.validation = validation;
  if (name == "internal") c.kind = Kind::SolverInternal;
  else if (name == "hyb_loo") c.kind = Kind::HybridLOO;
  else if (name == "hyb_modloo") c.kind = Kind::HybridModifiedLOO;
  else if (name == "hyb_kfold10") c.kind = Kind::HybridKFold10;
  else if (name == "fixed") c.kind = Kind::FixedRule;
  else if (name == "random") c.kind = Kind::Random;
  else if (name == "oracle") c.kind = Kind::Oracle;
  else throw std::invalid_argument("unknown selection criterion: " + name);
  return c;
}

std::string SelectionCriterion::name() const {
  switch (kind) {
    case Kind::SolverInternal: return "internal";
    case Kind::HybridLOO: return "hyb_loo";
    case Kind::HybridModifiedLOO: return "hyb_modloo";
    case Kind::HybridKFold10: return "hyb_kfold10";
    case Kind::FixedRule: return "fixed";
    case Kind::Random: return "random";
    case Kind::Oracle: return "oracle";
  }
  return "?";
}

SelectionResult auto_select(const std::vector<SparseSurrogate>& candidates,
                            const SelectionCriterion& criterion, const Design& fit_design,
                            int d, bool large_ed) {
  if (candidates.empty()) throw std::invalid_argument("auto_select: no candidates");
  const std::uint64_t fp = fit_design.fingerprint();
  for (const auto& c : candidates)
    if (c.design_fingerprint != fp)
      throw std::invalid_argument("auto_select: candidate fitted on a different design");

  // Canonical evaluation order: (solver rank, scheme rank, original index).
  std::vector<int> order(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const int sa = rank_of(solver_ids(), candidates[static_cast<std::size_t>(a)].solver_id);
    const int sb = rank_of(solver_ids(), candidates[static_cast<std::size_t>(b)].solver_id);
    if (sa != sb) return sa < sb;
    const int ca = rank_of(scheme_ids(), candidates[static_cast<std::size_t>(a)].scheme_id);
    const int cb = rank_of(scheme_ids(), candidates[static_cast<std::size_t>(b)].scheme_id);
    if (ca != cb) return ca < cb;
    return a < b;
  });

  SelectionResult res;
  res.scores.assign(candidates.size(), kInf);

  using Kind = SelectionCriterion::Kind;
  switch (criterion.kind) {
    case Kind::Random: {
      Rng rng(criterion.seed);
      res.selected = static_cast<int>(rng.uniform_below(candidates.size()));
      res.scores.assign(candidates.size(), 0.0);
      return res;
    }
    case Kind::FixedRule: {
      const auto combo = fixed_rule_combo(class_of(d, large_ed));
      for (int i : order) {
        const auto& c = candidates[static_cast<std::size_t>(i)];
        if (c.solver_id == combo.first && c.scheme_id == combo.second) {
          res.selected = i;
          res.scores[static_cast<std::size_t>(i)] = 0.0;
          return res;
        }
      }
      throw std::runtime_error("auto_select: fixed-rule combination (" + combo.first + ", " +
                               combo.second + ") absent from candidates");
    }
    case Kind::Oracle: {
      if (!criterion.validation || !criterion.validation->has_y)
        throw std::invalid_argument("auto_select: oracle requires a validation design");
      for (std::size_t i = 0; i < candidates.size(); ++i) {
        Vec pred = candidates[i].predict_standard(criterion.validation->U);
        ErrorEstimate e = rel_mse(pred, criterion.validation->y);
        res.scores[i] = e.value;
      }
      break;
    }
    case Kind::SolverInternal: {
      for (std::size_t i = 0; i < candidates.size(); ++i)
        res.scores[i] = candidates[i].criterion_value;
      break;
    }
    default: {  // hybrid estimators
      if (!fit_design.has_y) throw std::invalid_argument("auto_select: design has no responses");
      EstimatorKind ek = EstimatorKind::HybridLOO;
      if (criterion.kind == Kind::HybridModifiedLOO) ek = EstimatorKind::HybridModifiedLOO;
      if (criterion.kind == Kind::HybridKFold10) ek = EstimatorKind::HybridKFold;
      for (std::size_t i = 0; i < candidates.size(); ++i) {
        const auto& c = candidates[i];
        if (c.active.empty()) continue;  // degenerate stays +inf
        Mat Psi_active = build_regression_matrix_cols(c.basis, families_for(c.input_model),
                                                      fit_design.U, c.active);
        ErrorEstimate e = hybrid_estimate(ek, Psi_active, fit_design.y, criterion.seed, 10);
        res.scores[i] = e.value;
      }
      bool all_degenerate = true;
      for (double s : res.scores)
        if (std::isfinite(s)) all_degenerate = false;
      if (all_degenerate) {
        // A single interpolating candidate list must not abort selection.
        res.fallback_internal = true;
        for (std::size_t i = 0; i < candidates.size(); ++i)
          res.scores[i] = candidates[i].criterion_value;
      }
      break;
    }
  }

  double best = kInf;
  for (int i : order) {
    const double s = res.scores[static_cast<std::size_t>(i)];
    if (s < best) {
      best = s;
      res.selected = i;
    }
  }
  if (res.selected < 0) res.selected = order.front();  // everything degenerate
  return res;
}

}  // namespace spce
