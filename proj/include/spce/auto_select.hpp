#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spce/sampling.hpp"
#include "spce/surrogate.hpp"

namespace spce {

enum class BenchClass { LowSmall, LowLarge, HighSmall, HighLarge };

std::string class_name(BenchClass c);

/// Dimensionality/ED-size class: low is d <= 10, high is d >= 20. The gap
/// 11..19 is classified low with `warning` set.
BenchClass class_of(int d, bool large_ed, bool* warning = nullptr);

/// Criterion strings: "internal", "hyb_loo", "hyb_modloo", "hyb_kfold10",
/// "fixed", "random", "oracle".
struct SelectionCriterion {
  enum class Kind {
    SolverInternal,
    HybridLOO,
    HybridModifiedLOO,
    HybridKFold10,
    FixedRule,
    Random,
    Oracle,
  };
  Kind kind = Kind::SolverInternal;
  std::uint64_t seed = 0;                 // Random
  const Design* validation = nullptr;    // Oracle: design with responses

  static SelectionCriterion parse(const std::string& name, std::uint64_t seed = 0,
                                  const Design* validation = nullptr);
  std::string name() const;
};

/// The benchmark's per-class fixed rule: (solver, scheme) chosen a priori by
/// dimensionality and ED size.
std::pair<std::string, std::string> fixed_rule_combo(BenchClass c);

struct SelectionResult {
  int selected = -1;
  std::vector<double> scores;    // per candidate; +inf = degenerate
  bool fallback_internal = false;  // all hybrid scores degenerate
};

/// Picks one candidate surrogate per the criterion. All candidates must be
/// fitted on the identical design (checked by fingerprint). Candidates are
/// ranked in canonical (solver, scheme) order so ties resolve first-wins.
SelectionResult auto_select(const std::vector<SparseSurrogate>& candidates,
                            const SelectionCriterion& criterion, const Design& fit_design,
                            int d, bool large_ed);

}  // namespace spce
