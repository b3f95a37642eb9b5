#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "spce/cv_error.hpp"
#include "spce/input_model.hpp"
#include "spce/multi_index.hpp"
#include "spce/poly_basis.hpp"

namespace spce {

/// A fitted sparse PCE: candidate basis, coefficient vector (zero off the
/// active subset), and provenance (solver, scheme, criterion, design
/// fingerprint) so that later selection steps are auditable.
struct SparseSurrogate {
  InputModel input_model;
  MultiIndexSet basis;
  Vec coefficients;
  std::vector<int> active;

  std::string solver_id;
  std::string scheme_id;
  EstimatorKind criterion_kind = EstimatorKind::ModifiedLOO;
  int criterion_k = 0;
  double criterion_value = 0.0;
  double hyperparameter = 0.0;
  std::uint64_t cv_seed = 0;
  std::uint64_t design_fingerprint = 0;
  std::string config_digest;

  int active_count() const { return static_cast<int>(active.size()); }
  int basis_size() const { return basis.size(); }

  /// Predictions at physical points (rows of X): transform to the
  /// standardized space and evaluate the active expansion terms.
  Vec predict(const Mat& X) const;
  /// Predictions at standardized points.
  Vec predict_standard(const Mat& U) const;

  /// JSON round trip preserves coefficients bit-exactly (decimal encoding
  /// with 17 significant digits).
  nlohmann::json to_json() const;
  static SparseSurrogate from_json(const nlohmann::json& j);

  void save(const std::string& path) const;
  static SparseSurrogate load(const std::string& path);
};

/// Shortest-exact decimal encoding helpers shared by persistence and the
/// benchmark records.
std::string format_double_exact(double v);
double parse_double_exact(const std::string& s);

}  // namespace spce
