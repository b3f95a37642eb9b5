// Command-line front end: surrogate fitting, prediction, and the benchmark
// harness (campaign runner, within-factor aggregation, selection study).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spce/bench.hpp"
#include "spce/sampling.hpp"
#include "spce/surrogate.hpp"

namespace {

using spce::Mat;
using spce::Vec;

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(spce::parse_double_exact(tok));
  return out;
}

std::vector<std::string> parse_string_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(tok);
  return out;
}

/// Numeric CSV, optional single header line.
Mat read_points_csv(const std::string& path, int expected_cols) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string tok;
    bool numeric = true;
    while (std::getline(ss, tok, ',')) {
      try {
        row.push_back(spce::parse_double_exact(tok));
      } catch (const std::exception&) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;  // header line
      }
      throw std::runtime_error("non-numeric row in " + path + ": " + line);
    }
    first = false;
    if (expected_cols > 0 && static_cast<int>(row.size()) != expected_cols)
      throw std::runtime_error("row with " + std::to_string(row.size()) + " columns, expected " +
                               std::to_string(expected_cols) + " in " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("no data rows in " + path);
  Mat m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

struct AdaptivityFlags {
  int p_min = -1, p_max = -1, fn_initial_p = -2, ad_initial_p = -2, fn_t = -1;
  double fn_q = -1.0;
  std::string q_range;
  long long max_basis_size = -1;

  void apply(spce::AdaptivityConfig& cfg) const {
    if (p_min >= 0) cfg.p_min = p_min;
    if (p_max >= 0) cfg.p_max = p_max;
    if (!q_range.empty()) cfg.q_range = parse_double_list(q_range);
    if (fn_initial_p >= -1) cfg.fn_initial_p = fn_initial_p;
    if (ad_initial_p >= -1) cfg.ad_initial_p = ad_initial_p;
    if (fn_t >= 1) cfg.fn_T = fn_t;
    if (fn_q > 0.0) cfg.fn_q = fn_q;
    if (max_basis_size > 0) cfg.max_basis_size = static_cast<std::size_t>(max_basis_size);
    cfg.validate();
  }

  void add_to(CLI::App* cmd) {
    cmd->add_option("--p-min", p_min, "Minimum degree for pq adaptivity");
    cmd->add_option("--p-max", p_max, "Maximum degree for pq adaptivity");
    cmd->add_option("--q-range", q_range, "Comma-separated q-norm values, e.g. 0.5,0.75,1");
    cmd->add_option("--fn-initial-p", fn_initial_p,
                    "Initial degree for forward-neighbor adaptivity (-1: 10N rule)");
    cmd->add_option("--fn-q", fn_q, "q-norm of the forward-neighbor initial basis");
    cmd->add_option("--fn-t", fn_t, "Number of expansion steps per forward-neighbor round");
    cmd->add_option("--ad-initial-p", ad_initial_p,
                    "Initial degree for anisotropic-degree adaptivity (-1: ceil(p_max/2))");
    cmd->add_option("--max-basis-size", max_basis_size, "Candidate-basis size cap");
  }
};

int cmd_fit(const std::string& model_arg, const std::string& input_model_path,
            const std::string& solver, const std::string& scheme, const std::string& ed_size,
            int n, std::uint64_t seed, int lhs_restarts, const AdaptivityFlags& flags,
            const std::string& out_path) {
  spce::Design design;
  spce::InputModel input;
  spce::AdaptivityConfig cfg;

  if (spce::has_model(model_arg)) {
    const auto& model = spce::model_by_id(model_arg);
    input = model.input;
    int n_used = n;
    if (n_used <= 0) n_used = ed_size == "large" ? model.large_n : model.small_n;
    spce::CampaignConfig defaults_probe;
    defaults_probe.models = {model_arg};
    defaults_probe.solvers = {solver};
    defaults_probe.schemes = {scheme};
    cfg = defaults_probe.adaptivity_for(model_arg, n_used >= model.large_n);
    design = spce::lhs_maximin(n_used, input, seed, lhs_restarts);
    design.y = model.evaluate(design.X);
    design.has_y = true;
  } else {
    if (input_model_path.empty())
      throw std::runtime_error("--input-model is required when fitting from a CSV file");
    std::ifstream in(input_model_path);
    if (!in) throw std::runtime_error("cannot read " + input_model_path);
    nlohmann::json ij;
    in >> ij;
    input = spce::InputModel::from_json(ij);
    Mat data = read_points_csv(model_arg, input.dim() + 1);
    design.X = data.leftCols(input.dim());
    design.U = input.to_standard(design.X);
    design.y = data.col(input.dim());
    design.has_y = true;
    design.seed = seed;
    design.kind = spce::DesignKind::Iid;
  }
  flags.apply(cfg);

  spce::FitResult fit = spce::fit_with_scheme(spce::solver_by_id(solver, seed), solver, scheme,
                                              design, input, cfg);
  const auto& s = fit.surrogate;
  std::cout << "fitted " << solver << " & " << scheme << ": basis " << s.basis_size()
            << ", active " << s.active_count() << ", criterion ("
            << spce::estimator_name(s.criterion_kind, s.criterion_k)
            << ") = " << spce::format_double_exact(s.criterion_value) << "\n";
  if (!out_path.empty()) {
    s.save(out_path);
    std::cout << "wrote " << out_path << "\n";
  }
  return 0;
}

int cmd_predict(const std::string& surrogate_path, const std::string& points_path,
                const std::string& out_path) {
  spce::SparseSurrogate s = spce::SparseSurrogate::load(surrogate_path);
  Mat pts = read_points_csv(points_path, s.input_model.dim());
  Vec pred = s.predict(pts);
  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw std::runtime_error("cannot write " + out_path);
    os = &file;
  }
  (*os) << "y\n";
  for (Eigen::Index i = 0; i < pred.size(); ++i)
    (*os) << spce::format_double_exact(pred[i]) << "\n";
  if (!out_path.empty()) std::cout << "wrote " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse PCE surrogate toolkit"};
  app.require_subcommand(1);

  // fit --------------------------------------------------------------------
  std::string fit_model, fit_input_model, fit_solver, fit_scheme = "pq", fit_ed = "small";
  std::string fit_out;
  int fit_n = 0, fit_restarts = 50;
  std::uint64_t fit_seed = 1;
  AdaptivityFlags fit_flags;
  auto* fit = app.add_subcommand("fit", "Fit a sparse PCE surrogate");
  fit->add_option("--model", fit_model, "Benchmark model id or CSV file (x1..xd,y)")->required();
  fit->add_option("--input-model", fit_input_model, "Input-model JSON (CSV fits only)");
  fit->add_option("--solver", fit_solver, "lars|omp|spk5|sploo|bcs")->required();
  fit->add_option("--scheme", fit_scheme, "static|pq|fn|ad");
  fit->add_option("--ed-size", fit_ed, "small|large (registry models)");
  fit->add_option("--n", fit_n, "Explicit experimental-design size");
  fit->add_option("--seed", fit_seed, "Root seed");
  fit->add_option("--lhs-restarts", fit_restarts, "Maximin restarts");
  fit->add_option("--out", fit_out, "Output surrogate JSON path");
  fit_flags.add_to(fit);

  // predict ------------------------------------------------------------------
  std::string pred_surrogate, pred_points, pred_out;
  auto* predict = app.add_subcommand("predict", "Evaluate a stored surrogate");
  predict->add_option("--surrogate", pred_surrogate, "Surrogate JSON")->required();
  predict->add_option("--points", pred_points, "CSV of physical points")->required();
  predict->add_option("--out", pred_out, "Output CSV (default: stdout)");

  // bench ---------------------------------------------------------------------
  auto* bench = app.add_subcommand("bench", "Benchmark harness");
  bench->require_subcommand(1);

  std::string run_config, run_out, run_surrogates;
  auto* bench_run = bench->add_subcommand("run", "Run a campaign");
  bench_run->add_option("--config", run_config, "Campaign config JSON")->required();
  bench_run->add_option("--out", run_out, "Records CSV (appended, resumable)")->required();
  bench_run->add_option("--surrogates", run_surrogates, "Directory for fitted surrogates");

  std::string agg_records, agg_factors = "2,5,10", agg_out = "tables";
  auto* bench_agg = bench->add_subcommand("aggregate", "Within-factor-of-best tables");
  bench_agg->add_option("--records", agg_records, "Records CSV")->required();
  bench_agg->add_option("--factors", agg_factors, "Comma-separated factors");
  bench_agg->add_option("--out", agg_out, "Output directory");

  std::string sel_records, sel_criteria = "internal,hyb_loo,hyb_modloo,hyb_kfold10,fixed,random,oracle";
  std::string sel_pool, sel_out = "tables";
  std::uint64_t sel_seed = 1;
  auto* bench_sel = bench->add_subcommand("select", "Automatic-selection study");
  bench_sel->add_option("--records", sel_records, "Records CSV")->required();
  bench_sel->add_option("--criteria", sel_criteria, "Comma-separated criteria");
  bench_sel->add_option("--seed", sel_seed, "Seed for the random criterion");
  bench_sel->add_option("--pool", sel_pool,
                        "Candidate pool filter, e.g. bcs&fn,sploo&pq (default: all)");
  bench_sel->add_option("--out", sel_out, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*fit)
      return cmd_fit(fit_model, fit_input_model, fit_solver, fit_scheme, fit_ed, fit_n, fit_seed,
                     fit_restarts, fit_flags, fit_out);
    if (*predict) return cmd_predict(pred_surrogate, pred_points, pred_out);
    if (*bench_run) {
      auto config = spce::CampaignConfig::load(run_config);
      auto records = spce::run_campaign(config, run_out, run_surrogates);
      std::cout << "wrote " << records.size() << " records to " << run_out << "\n";
      return 0;
    }
    if (*bench_agg) {
      auto records = spce::read_records_csv(agg_records);
      auto tables = spce::aggregate(records, parse_double_list(agg_factors));
      spce::write_aggregate_tables(tables, agg_out);
      spce::write_quantile_table(records,
                                 (std::filesystem::path(agg_out) / "quantiles.csv").string());
      if (tables.incomplete)
        std::cerr << "warning: some combinations missing on some EDs; per-ED denominators "
                     "exclude them\n";
      std::cout << "wrote tables to " << agg_out << "\n";
      return 0;
    }
    if (*bench_sel) {
      auto records = spce::read_records_csv(sel_records);
      auto tables = spce::selection_eval(records, parse_string_list(sel_criteria), sel_seed,
                                         sel_pool.empty() ? std::vector<std::string>{}
                                                          : parse_string_list(sel_pool));
      spce::write_selection_tables(tables, sel_out);
      std::cout << "wrote selection tables to " << sel_out << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
