#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "spce/adaptivity.hpp"
#include "spce/auto_select.hpp"
#include "spce/test_models.hpp"

namespace spce {

/// One campaign: the cross product of models, ED sizes, replications,
/// solvers and schemes, fitted on shared per-replication designs.
struct CampaignConfig {
  std::vector<std::string> models;
  std::string ed_sizes = "both";  // "small" | "large" | "both"
  std::map<std::string, std::vector<int>> explicit_n;  // per-model override
  int replications = 30;
  std::vector<std::string> solvers;
  std::vector<std::string> schemes;
  int validation_n = 0;  // 0: default 1e5 (1e4 for d >= 50)
  std::uint64_t seed = 1;
  int lhs_restarts = 50;
  std::map<std::string, nlohmann::json> overrides;  // per-model AdaptivityConfig fields

  void validate() const;
  nlohmann::json to_json() const;
  static CampaignConfig from_json(const nlohmann::json& j);
  static CampaignConfig load(const std::string& path);

  std::vector<int> ed_sizes_for(const BenchmarkModel& m) const;
  int validation_n_for(const BenchmarkModel& m) const;
  /// Scheme list for one model ("ad" is dropped for d >= 20).
  std::vector<std::string> schemes_for(const BenchmarkModel& m) const;
  /// Adaptivity settings: per-model defaults table merged with overrides.
  AdaptivityConfig adaptivity_for(const std::string& model_id, bool large_ed) const;
};

/// One (model, N, replication, solver, scheme) cell.
struct BenchmarkRecord {
  std::string model;
  int d = 0;
  int n = 0;
  int replication = 0;
  std::string solver;
  std::string scheme;
  double rel_mse = 0.0;        // validation relMSE; inf = degenerate cell
  std::string criterion_kind;
  double criterion_value = 0.0;
  double hyb_loo = 0.0;
  double hyb_modloo = 0.0;
  double hyb_kfold10 = 0.0;
  int basis_size = 0;
  int active_count = 0;
  std::uint64_t design_fingerprint = 0;

  std::string key() const;  // model|n|replication|solver|scheme
  std::string combo() const { return solver + "&" + scheme; }
};

/// Fixed CSV column order (documented in the README). Wall-clock time is
/// deliberately not part of the record file: record bytes must be a pure
/// function of config and seed.
extern const char* const kRecordsCsvHeader;

void write_records_csv(const std::string& path, const std::vector<BenchmarkRecord>& records);
std::vector<BenchmarkRecord> read_records_csv(const std::string& path);

/// Runs the campaign, appending records to `records_csv` incrementally in
/// canonical cell order (resume: cells already present in the file are
/// skipped). When `surrogate_dir` is non-empty every fitted surrogate is
/// persisted there. Returns the full record set in canonical order.
/// Worker count comes from the SPCE_WORKERS environment variable (default:
/// hardware concurrency); results do not depend on it.
std::vector<BenchmarkRecord> run_campaign(const CampaignConfig& config,
                                          const std::string& records_csv,
                                          const std::string& surrogate_dir = "");

/// The per-model defaults table mirrored from the benchmark settings
/// (shipped as data/model_defaults.json and embedded at build time).
const nlohmann::json& model_defaults();

// --- aggregation -----------------------------------------------------------

struct AggregateRow {
  std::string combo;
  int n_runs = 0;
  double best_pct = 0.0;
  std::vector<double> within_pct;  // one per factor
};

struct AggregateTables {
  std::vector<double> factors;
  std::map<std::string, std::vector<AggregateRow>> by_class;  // class name -> rows
  std::vector<AggregateRow> all;
  bool incomplete = false;  // some combination missing on some ED
};

/// Within-factor-of-best aggregation: per ED realization the best relMSE
/// eps* is found; each combination is scored by whether it attained eps*
/// (ties all count) and whether it came within factor f of eps*. Counts are
/// normalized per dimensionality/ED-size class and sorted by the first
/// factor's percentage.
AggregateTables aggregate(const std::vector<BenchmarkRecord>& records,
                          const std::vector<double>& factors = {2.0, 5.0, 10.0});

void write_aggregate_tables(const AggregateTables& tables, const std::string& out_dir);

/// Per-(model, N, combo) relMSE quantiles over replications (plot-ready).
void write_quantile_table(const std::vector<BenchmarkRecord>& records, const std::string& path);

// --- automatic-selection evaluation ----------------------------------------

struct SelectionEvalRow {
  std::string criterion;
  int n_runs = 0;
  double best_pct = 0.0;
  std::vector<double> within_pct;
};

struct SelectionEvalTables {
  std::vector<double> factors;
  std::map<std::string, std::vector<SelectionEvalRow>> by_class;
  std::vector<SelectionEvalRow> all;
};

/// Evaluates selection criteria on recorded candidates: per ED the criterion
/// picks one record (from `pool` when non-empty, otherwise all records of
/// the ED) and is scored against the oracle minimum over all records of that
/// ED, with the same within-factor aggregation as `aggregate`.
SelectionEvalTables selection_eval(const std::vector<BenchmarkRecord>& records,
                                   const std::vector<std::string>& criteria,
                                   std::uint64_t random_seed = 1,
                                   const std::vector<std::string>& pool = {},
                                   const std::vector<double>& factors = {2.0, 5.0, 10.0});

void write_selection_tables(const SelectionEvalTables& tables, const std::string& out_dir);

}  // namespace spce
