#pragma once

#include <functional>
#include <string>
#include <vector>

#include "spce/input_model.hpp"

namespace spce {

/// Analytical benchmark model: input model, closed-form response, and the
/// small/large experimental-design sizes used by the comparative study.
struct BenchmarkModel {
  std::string id;
  int d = 0;
  InputModel input;
  std::function<double(const Vec&)> evaluate_one;
  int small_n = 0;
  int large_n = 0;
  bool synthetic = false;  // true for the non-reference high-dimensional stand-in

  /// Row-wise evaluation with support checking.
  Vec evaluate(const Mat& X) const;
};

/// Model ids: "ishigami", "oscillator6", "borehole", "damped8",
/// "wingweight", "morris", "hd100".
const std::vector<BenchmarkModel>& model_registry();
const BenchmarkModel& model_by_id(const std::string& id);
bool has_model(const std::string& id);

}  // namespace spce
