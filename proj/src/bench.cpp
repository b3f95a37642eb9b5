#include "spce/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "spce/embedded_defaults.hpp"
#include "spce/rng.hpp"
#include "spce/sampling.hpp"
#include "spce/surrogate.hpp"

namespace spce {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t fnv_str(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (char ch : s) {
    h ^= static_cast<unsigned char>(ch);
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

const nlohmann::json& model_defaults() {
  static const nlohmann::json defaults = nlohmann::json::parse(detail::embedded_model_defaults());
  return defaults;
}

// --- config ------------------------------------------------------------------

void CampaignConfig::validate() const {
  if (models.empty()) throw std::invalid_argument("campaign: no models");
  for (const auto& id : models)
    if (!has_model(id)) throw std::invalid_argument("campaign: unknown model " + id);
  if (ed_sizes != "small" && ed_sizes != "large" && ed_sizes != "both")
    throw std::invalid_argument("campaign: ed_sizes must be small|large|both");
  if (replications < 1) throw std::invalid_argument("campaign: replications must be >= 1");
  if (solvers.empty()) throw std::invalid_argument("campaign: no solvers");
  for (const auto& s : solvers)
    if (std::find(solver_ids().begin(), solver_ids().end(), s) == solver_ids().end())
      throw std::invalid_argument("campaign: unknown solver " + s);
  if (schemes.empty()) throw std::invalid_argument("campaign: no schemes");
  for (const auto& s : schemes)
    if (std::find(scheme_ids().begin(), scheme_ids().end(), s) == scheme_ids().end())
      throw std::invalid_argument("campaign: unknown scheme " + s);
  if (validation_n < 0) throw std::invalid_argument("campaign: validation_n must be >= 0");
  if (lhs_restarts < 1) throw std::invalid_argument("campaign: lhs_restarts must be >= 1");
}

nlohmann::json CampaignConfig::to_json() const {
  nlohmann::json j;
  j["models"] = models;
  j["ed_sizes"] = ed_sizes;
  if (!explicit_n.empty()) j["explicit_n"] = explicit_n;
  j["replications"] = replications;
  j["solvers"] = solvers;
  j["schemes"] = schemes;
  if (validation_n > 0) j["validation_n"] = validation_n;
  j["seed"] = seed;
  j["lhs_restarts"] = lhs_restarts;
  if (!overrides.empty()) {
    nlohmann::json o;
    for (const auto& [k, v] : overrides) o[k] = v;
    j["overrides"] = o;
  }
  return j;
}

CampaignConfig CampaignConfig::from_json(const nlohmann::json& j) {
  CampaignConfig c;
  c.models = j.at("models").get<std::vector<std::string>>();
  c.ed_sizes = j.value("ed_sizes", std::string("both"));
  if (j.contains("explicit_n"))
    c.explicit_n = j.at("explicit_n").get<std::map<std::string, std::vector<int>>>();
  c.replications = j.value("replications", 30);
  c.solvers = j.at("solvers").get<std::vector<std::string>>();
  c.schemes = j.at("schemes").get<std::vector<std::string>>();
  c.validation_n = j.value("validation_n", 0);
  c.seed = j.value("seed", static_cast<std::uint64_t>(1));
  c.lhs_restarts = j.value("lhs_restarts", 50);
  if (j.contains("overrides"))
    for (const auto& [k, v] : j.at("overrides").items()) c.overrides[k] = v;
  c.validate();
  return c;
}

CampaignConfig CampaignConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  nlohmann::json j;
  in >> j;
  return from_json(j);
}

std::vector<int> CampaignConfig::ed_sizes_for(const BenchmarkModel& m) const {
  auto it = explicit_n.find(m.id);
  if (it != explicit_n.end()) return it->second;
  std::vector<int> out;
  if (ed_sizes != "large") out.push_back(m.small_n);
  if (ed_sizes != "small") out.push_back(m.large_n);
  return out;
}

int CampaignConfig::validation_n_for(const BenchmarkModel& m) const {
  if (validation_n > 0) return validation_n;
  return m.d >= 50 ? 10000 : 100000;
}

std::vector<std::string> CampaignConfig::schemes_for(const BenchmarkModel& m) const {
  std::vector<std::string> out;
  for (const auto& s : schemes) {
    if (s == "ad" && m.d >= 20) continue;  // not run for high-dimensional models
    out.push_back(s);
  }
  return out;
}

AdaptivityConfig CampaignConfig::adaptivity_for(const std::string& model_id, bool large_ed) const {
  AdaptivityConfig cfg;
  const auto& defaults = model_defaults();
  if (defaults.contains(model_id)) {
    const auto& dj = defaults.at(model_id);
    if (dj.contains("pq_p")) {
      cfg.p_min = dj.at("pq_p").at(0).get<int>();
      cfg.p_max = dj.at("pq_p").at(1).get<int>();
    }
    if (dj.contains("pq_q")) cfg.q_range = dj.at("pq_q").get<std::vector<double>>();
    if (dj.contains("fn_p"))
      cfg.fn_initial_p = dj.at("fn_p").at(large_ed ? "large" : "small").get<int>();
    if (dj.contains("fn_q")) cfg.fn_q = dj.at("fn_q").get<double>();
    if (dj.contains("ad_p")) cfg.ad_initial_p = dj.at("ad_p").get<int>();
  }
  auto it = overrides.find(model_id);
  if (it != overrides.end()) {
    const nlohmann::json& o = it->second;
    cfg.p_min = o.value("p_min", cfg.p_min);
    cfg.p_max = o.value("p_max", cfg.p_max);
    if (o.contains("q_range")) cfg.q_range = o.at("q_range").get<std::vector<double>>();
    cfg.fn_T = o.value("fn_T", cfg.fn_T);
    cfg.fn_initial_p = o.value("fn_initial_p", cfg.fn_initial_p);
    cfg.fn_q = o.value("fn_q", cfg.fn_q);
    cfg.ad_initial_p = o.value("ad_initial_p", cfg.ad_initial_p);
    cfg.max_basis_size = o.value("max_basis_size", cfg.max_basis_size);
  }
  cfg.validate();
  return cfg;
}

// --- records ----------------------------------------------------------------

const char* const kRecordsCsvHeader =
    "model,d,n,replication,solver,scheme,rel_mse,criterion_kind,criterion_value,"
    "hyb_loo,hyb_modloo,hyb_kfold10,basis_size,active_count,design_fingerprint";

std::string BenchmarkRecord::key() const {
  return model + "|" + std::to_string(n) + "|" + std::to_string(replication) + "|" + solver + "|" +
         scheme;
}

namespace {

std::string record_to_csv(const BenchmarkRecord& r) {
  std::ostringstream os;
  os << r.model << ',' << r.d << ',' << r.n << ',' << r.replication << ',' << r.solver << ','
     << r.scheme << ',' << format_double_exact(r.rel_mse) << ',' << r.criterion_kind << ','
     << format_double_exact(r.criterion_value) << ',' << format_double_exact(r.hyb_loo) << ','
     << format_double_exact(r.hyb_modloo) << ',' << format_double_exact(r.hyb_kfold10) << ','
     << r.basis_size << ',' << r.active_count << ',' << r.design_fingerprint;
  return os.str();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(field);
  return out;
}

BenchmarkRecord record_from_csv(const std::string& line) {
  const auto f = split_csv_line(line);
  if (f.size() != 15) throw std::runtime_error("records csv: bad field count in line: " + line);
  BenchmarkRecord r;
  r.model = f[0];
  r.d = std::stoi(f[1]);
  r.n = std::stoi(f[2]);
  r.replication = std::stoi(f[3]);
  r.solver = f[4];
  r.scheme = f[5];
  r.rel_mse = parse_double_exact(f[6]);
  r.criterion_kind = f[7];
  r.criterion_value = parse_double_exact(f[8]);
  r.hyb_loo = parse_double_exact(f[9]);
  r.hyb_modloo = parse_double_exact(f[10]);
  r.hyb_kfold10 = parse_double_exact(f[11]);
  r.basis_size = std::stoi(f[12]);
  r.active_count = std::stoi(f[13]);
  r.design_fingerprint = std::stoull(f[14]);
  return r;
}

}  // namespace

void write_records_csv(const std::string& path, const std::vector<BenchmarkRecord>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << kRecordsCsvHeader << '\n';
  for (const auto& r : records) out << record_to_csv(r) << '\n';
}

std::vector<BenchmarkRecord> read_records_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string line;
  if (!std::getline(in, line)) return {};
  if (line != kRecordsCsvHeader) throw std::runtime_error("records csv: unexpected header");
  std::vector<BenchmarkRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(record_from_csv(line));
  }
  return out;
}

// --- campaign ----------------------------------------------------------------

namespace {

struct EdTask {
  std::string model_id;
  int n = 0;
  bool large_ed = false;
  int replication = 0;
  std::vector<std::pair<std::string, std::string>> combos;  // (solver, scheme), canonical order
};

struct EdBlock {
  std::vector<BenchmarkRecord> records;
};

int worker_count() {
  if (const char* env = std::getenv("SPCE_WORKERS")) {
    const int w = std::atoi(env);
    if (w >= 1) return w;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

/// Runs one ED cell: design + validation + every (solver, scheme) fit.
EdBlock run_ed_task(const CampaignConfig& config, const EdTask& task,
                    const std::string& surrogate_dir,
                    const std::set<std::string>& done_keys) {
  const BenchmarkModel& model = model_by_id(task.model_id);
  {
    bool any_todo = false;
    for (const auto& [solver_id, scheme_id] : task.combos) {
      BenchmarkRecord probe;
      probe.model = task.model_id;
      probe.n = task.n;
      probe.replication = task.replication;
      probe.solver = solver_id;
      probe.scheme = scheme_id;
      if (!done_keys.count(probe.key())) any_todo = true;
    }
    if (!any_todo) return {};
  }
  const std::string ed_tag =
      task.model_id + ":" + std::to_string(task.n) + ":" + std::to_string(task.replication);
  const std::uint64_t ed_seed = derive_seed(config.seed, fnv_str(ed_tag + ":ed"));
  const std::uint64_t val_seed = derive_seed(config.seed, fnv_str(ed_tag + ":val"));
  const std::uint64_t hyb_seed = derive_seed(config.seed, fnv_str(ed_tag + ":hyb"));

  Design design = lhs_maximin(task.n, model.input, ed_seed, config.lhs_restarts);
  design.y = model.evaluate(design.X);
  design.has_y = true;

  Design validation = iid_sample(config.validation_n_for(model), model.input, val_seed);
  validation.y = model.evaluate(validation.X);
  validation.has_y = true;

  const AdaptivityConfig cfg = config.adaptivity_for(task.model_id, task.large_ed);
  const auto families = families_for(model.input);

  EdBlock block;
  for (const auto& [solver_id, scheme_id] : task.combos) {
    BenchmarkRecord r;
    r.model = task.model_id;
    r.d = model.d;
    r.n = task.n;
    r.replication = task.replication;
    r.solver = solver_id;
    r.scheme = scheme_id;
    r.design_fingerprint = design.fingerprint();
    if (done_keys.count(r.key())) continue;

    try {
      const std::uint64_t solver_seed = derive_seed(ed_seed, fnv_str(solver_id));
      FitResult fit =
          fit_with_scheme(solver_by_id(solver_id, solver_seed), solver_id, scheme_id, design,
                          model.input, cfg);
      const SparseSurrogate& s = fit.surrogate;
      r.criterion_kind = estimator_name(s.criterion_kind, s.criterion_k);
      r.criterion_value = s.criterion_value;
      r.basis_size = s.basis_size();
      r.active_count = s.active_count();

      Vec pred = s.predict_standard(validation.U);
      r.rel_mse = rel_mse(pred, validation.y).value;

      if (s.active.empty()) {
        r.hyb_loo = r.hyb_modloo = r.hyb_kfold10 = kInf;
      } else {
        Mat Psi_active = build_regression_matrix_cols(s.basis, families, design.U, s.active);
        r.hyb_loo = hybrid_estimate(EstimatorKind::HybridLOO, Psi_active, design.y).value;
        r.hyb_modloo =
            hybrid_estimate(EstimatorKind::HybridModifiedLOO, Psi_active, design.y).value;
        r.hyb_kfold10 =
            hybrid_estimate(EstimatorKind::HybridKFold, Psi_active, design.y, hyb_seed, 10).value;
      }

      if (!surrogate_dir.empty()) {
        const std::string name = task.model_id + "_n" + std::to_string(task.n) + "_r" +
                                 std::to_string(task.replication) + "_" + solver_id + "_" +
                                 scheme_id + ".json";
        fit.surrogate.save((std::filesystem::path(surrogate_dir) / name).string());
      }
    } catch (const std::exception& e) {
      // Degenerate cell; campaign continues.
      r.rel_mse = kInf;
      r.criterion_kind = "failed";
      r.criterion_value = kInf;
      r.hyb_loo = r.hyb_modloo = r.hyb_kfold10 = kInf;
      std::cerr << "[bench] cell " << r.key() << " failed: " << e.what() << "\n";
    }
    block.records.push_back(std::move(r));
  }
  return block;
}

}  // namespace

std::vector<BenchmarkRecord> run_campaign(const CampaignConfig& config,
                                          const std::string& records_csv,
                                          const std::string& surrogate_dir) {
  config.validate();
  if (!surrogate_dir.empty()) std::filesystem::create_directories(surrogate_dir);

  // Resume support: previously written records are kept as-is.
  std::vector<BenchmarkRecord> existing;
  std::set<std::string> done_keys;
  if (!records_csv.empty() && std::filesystem::exists(records_csv)) {
    existing = read_records_csv(records_csv);
    for (const auto& r : existing) done_keys.insert(r.key());
  }

  // Canonical task order: models x ED sizes x replications.
  std::vector<EdTask> tasks;
  for (const auto& model_id : config.models) {
    const BenchmarkModel& model = model_by_id(model_id);
    const auto schemes = config.schemes_for(model);
    for (int n : config.ed_sizes_for(model)) {
      for (int rep = 0; rep < config.replications; ++rep) {
        EdTask t;
        t.model_id = model_id;
        t.n = n;
        t.large_ed = n >= model.large_n;
        t.replication = rep;
        for (const auto& solver : config.solvers)
          for (const auto& scheme : schemes) t.combos.push_back({solver, scheme});
        if (!t.combos.empty()) tasks.push_back(std::move(t));
      }
    }
  }

  std::vector<std::optional<EdBlock>> blocks(tasks.size());
  std::atomic<std::size_t> next_task{0};
  std::mutex flush_mutex;
  std::size_t flushed = 0;
  std::ofstream out;
  if (!records_csv.empty()) {
    const bool fresh = existing.empty();
    out.open(records_csv, fresh ? std::ios::trunc : std::ios::app);
    if (!out) throw std::runtime_error("cannot write " + records_csv);
    if (fresh) out << kRecordsCsvHeader << '\n';
  }

  auto flush_ready = [&]() {
    std::lock_guard<std::mutex> lock(flush_mutex);
    while (flushed < blocks.size() && blocks[flushed].has_value()) {
      if (out.is_open()) {
        for (const auto& r : blocks[flushed]->records) out << record_to_csv(r) << '\n';
        out.flush();
      }
      ++flushed;
    }
  };

  auto work = [&]() {
    for (;;) {
      const std::size_t i = next_task.fetch_add(1);
      if (i >= tasks.size()) break;
      EdBlock block = run_ed_task(config, tasks[i], surrogate_dir, done_keys);
      {
        std::lock_guard<std::mutex> lock(flush_mutex);
        blocks[i] = std::move(block);
      }
      flush_ready();
    }
  };

  const int workers = std::min<int>(worker_count(), static_cast<int>(tasks.size()));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  flush_ready();

  // Full record set in canonical order (existing records slot into place).
  std::map<std::string, BenchmarkRecord> by_key;
  for (const auto& r : existing) by_key[r.key()] = r;
  for (const auto& b : blocks)
    if (b)
      for (const auto& r : b->records) by_key[r.key()] = r;

  std::vector<BenchmarkRecord> result;
  for (const auto& t : tasks)
    for (const auto& [solver, scheme] : t.combos) {
      BenchmarkRecord probe;
      probe.model = t.model_id;
      probe.n = t.n;
      probe.replication = t.replication;
      probe.solver = solver;
      probe.scheme = scheme;
      auto it = by_key.find(probe.key());
      if (it != by_key.end()) result.push_back(it->second);
    }
  return result;
}

// --- aggregation --------------------------------------------------------------

namespace {

struct EdGroup {
  std::string model;
  int n = 0;
  int replication = 0;
  int d = 0;
  bool large_ed = false;
  std::vector<const BenchmarkRecord*> records;
  double eps_star = kInf;
};

std::vector<EdGroup> group_by_ed(const std::vector<BenchmarkRecord>& records) {
  std::map<std::string, EdGroup> groups;
  for (const auto& r : records) {
    const std::string k = r.model + "|" + std::to_string(r.n) + "|" + std::to_string(r.replication);
    EdGroup& g = groups[k];
    if (g.records.empty()) {
      g.model = r.model;
      g.n = r.n;
      g.replication = r.replication;
      g.d = r.d;
      g.large_ed = has_model(r.model) ? r.n >= model_by_id(r.model).large_n : false;
    }
    g.records.push_back(&r);
    g.eps_star = std::min(g.eps_star, r.rel_mse);
  }
  std::vector<EdGroup> out;
  for (auto& [k, g] : groups) out.push_back(std::move(g));
  return out;
}

struct ComboCounter {
  int runs = 0;
  int best = 0;
  std::vector<int> within;
};

void sort_rows(std::vector<AggregateRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const AggregateRow& a, const AggregateRow& b) {
    if (a.within_pct.empty() || b.within_pct.empty()) return false;
    return a.within_pct[0] > b.within_pct[0];
  });
}

}  // namespace

AggregateTables aggregate(const std::vector<BenchmarkRecord>& records,
                          const std::vector<double>& factors) {
  if (records.empty()) throw std::invalid_argument("aggregate: no records");
  AggregateTables tables;
  tables.factors = factors;

  auto groups = group_by_ed(records);

  // Per class and per combo, counts over ED realizations.
  std::map<std::string, std::map<std::string, ComboCounter>> per_class;
  std::map<std::string, ComboCounter> overall;
  std::set<std::string> expected_combos;
  for (const auto& r : records) expected_combos.insert(r.combo());

  for (const auto& g : groups) {
    if (g.records.size() < expected_combos.size()) tables.incomplete = true;
    const std::string cls = class_name(class_of(g.d, g.large_ed));
    for (const BenchmarkRecord* r : g.records) {
      auto bump = [&](ComboCounter& c) {
        if (c.within.empty()) c.within.assign(factors.size(), 0);
        c.runs += 1;
        if (std::isfinite(g.eps_star) && r->rel_mse == g.eps_star) c.best += 1;
        for (std::size_t f = 0; f < factors.size(); ++f)
          if (std::isfinite(g.eps_star) && r->rel_mse <= factors[f] * g.eps_star)
            c.within[f] += 1;
      };
      bump(per_class[cls][r->combo()]);
      bump(overall[r->combo()]);
    }
  }

  auto to_rows = [&](const std::map<std::string, ComboCounter>& counters) {
    std::vector<AggregateRow> rows;
    for (const auto& [combo, c] : counters) {
      AggregateRow row;
      row.combo = combo;
      row.n_runs = c.runs;
      row.best_pct = 100.0 * c.best / std::max(1, c.runs);
      for (std::size_t f = 0; f < factors.size(); ++f)
        row.within_pct.push_back(100.0 * c.within[f] / std::max(1, c.runs));
      rows.push_back(std::move(row));
    }
    sort_rows(rows);
    return rows;
  };

  for (const auto& [cls, counters] : per_class) tables.by_class[cls] = to_rows(counters);
  tables.all = to_rows(overall);
  return tables;
}

namespace {

void write_rows_csv(const std::string& path, const std::vector<double>& factors,
                    const std::string& label_header,
                    const std::vector<std::pair<std::string, std::pair<int, std::vector<double>>>>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << label_header << ",n_runs,best_pct";
  for (double f : factors) out << ",within" << f << "_pct";
  out << '\n';
  for (const auto& [label, data] : rows) {
    out << label << ',' << data.first << ',' << format_double_exact(data.second[0]);
    for (std::size_t i = 1; i < data.second.size(); ++i)
      out << ',' << format_double_exact(data.second[i]);
    out << '\n';
  }
}

}  // namespace

void write_aggregate_tables(const AggregateTables& tables, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  auto dump = [&](const std::string& name, const std::vector<AggregateRow>& rows) {
    std::vector<std::pair<std::string, std::pair<int, std::vector<double>>>> flat;
    for (const auto& r : rows) {
      std::vector<double> vals = {r.best_pct};
      vals.insert(vals.end(), r.within_pct.begin(), r.within_pct.end());
      flat.push_back({r.combo, {r.n_runs, vals}});
    }
    write_rows_csv((std::filesystem::path(out_dir) / (name + ".csv")).string(), tables.factors,
                   "combo", flat);
  };
  for (const auto& [cls, rows] : tables.by_class) dump(cls, rows);
  dump("all", tables.all);
}

void write_quantile_table(const std::vector<BenchmarkRecord>& records, const std::string& path) {
  std::map<std::string, std::vector<double>> series;
  std::map<std::string, std::tuple<std::string, int, std::string>> meta;
  for (const auto& r : records) {
    const std::string k = r.model + "|" + std::to_string(r.n) + "|" + r.combo();
    series[k].push_back(r.rel_mse);
    meta[k] = {r.model, r.n, r.combo()};
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "model,n,combo,count,min,q25,median,q75,max\n";
  for (auto& [k, v] : series) {
    std::sort(v.begin(), v.end());
    auto quant = [&](double q) {
      const double pos = q * (static_cast<double>(v.size()) - 1.0);
      const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
      const std::size_t hi = std::min(v.size() - 1, lo + 1);
      const double w = pos - std::floor(pos);
      return (1.0 - w) * v[lo] + w * v[hi];
    };
    const auto& [model, n, combo] = meta[k];
    out << model << ',' << n << ',' << combo << ',' << v.size() << ','
        << format_double_exact(v.front()) << ',' << format_double_exact(quant(0.25)) << ','
        << format_double_exact(quant(0.5)) << ',' << format_double_exact(quant(0.75)) << ','
        << format_double_exact(v.back()) << '\n';
  }
}

// --- selection evaluation ------------------------------------------------------

SelectionEvalTables selection_eval(const std::vector<BenchmarkRecord>& records,
                                   const std::vector<std::string>& criteria,
                                   std::uint64_t random_seed,
                                   const std::vector<std::string>& pool,
                                   const std::vector<double>& factors) {
  if (records.empty()) throw std::invalid_argument("selection_eval: no records");
  SelectionEvalTables tables;
  tables.factors = factors;

  const std::set<std::string> pool_set(pool.begin(), pool.end());
  auto in_pool = [&](const BenchmarkRecord& r) {
    return pool_set.empty() || pool_set.count(r.combo()) > 0;
  };

  auto groups = group_by_ed(records);

  struct Counter {
    int runs = 0;
    int best = 0;
    std::vector<int> within;
  };
  std::map<std::string, std::map<std::string, Counter>> per_class;  // class -> criterion
  std::map<std::string, Counter> overall;

  // Canonical order of candidates within an ED: solver rank then scheme rank.
  auto canonical_less = [](const BenchmarkRecord* a, const BenchmarkRecord* b) {
    auto rank = [](const std::vector<std::string>& ids, const std::string& id) {
      for (std::size_t i = 0; i < ids.size(); ++i)
        if (ids[i] == id) return static_cast<int>(i);
      return static_cast<int>(ids.size());
    };
    const int sa = rank(solver_ids(), a->solver), sb = rank(solver_ids(), b->solver);
    if (sa != sb) return sa < sb;
    return rank(scheme_ids(), a->scheme) < rank(scheme_ids(), b->scheme);
  };

  for (const auto& g : groups) {
    std::vector<const BenchmarkRecord*> cands;
    for (const BenchmarkRecord* r : g.records)
      if (in_pool(*r)) cands.push_back(r);
    if (cands.empty()) continue;
    std::stable_sort(cands.begin(), cands.end(), canonical_less);
    const double eps_star = g.eps_star;  // oracle min over all records of the ED
    const std::string cls = class_name(class_of(g.d, g.large_ed));

    for (const auto& crit : criteria) {
      const BenchmarkRecord* pick = nullptr;
      if (crit == "oracle") {
        for (const auto* r : cands)
          if (!pick || r->rel_mse < pick->rel_mse) pick = r;
      } else if (crit == "random") {
        const std::string tag = g.model + ":" + std::to_string(g.n) + ":" +
                                std::to_string(g.replication) + ":random";
        Rng rng(derive_seed(random_seed, fnv_str(tag)));
        pick = cands[rng.uniform_below(cands.size())];
      } else if (crit == "fixed") {
        const auto combo = fixed_rule_combo(class_of(g.d, g.large_ed));
        for (const auto* r : cands)
          if (r->solver == combo.first && r->scheme == combo.second) pick = r;
        // Absent fixed-rule combination counts as a miss for this ED.
      } else if (crit == "internal") {
        for (const auto* r : cands)
          if (!pick || r->criterion_value < pick->criterion_value) pick = r;
      } else if (crit == "hyb_loo" || crit == "hyb_modloo" || crit == "hyb_kfold10") {
        auto score = [&](const BenchmarkRecord* r) {
          if (crit == "hyb_loo") return r->hyb_loo;
          if (crit == "hyb_modloo") return r->hyb_modloo;
          return r->hyb_kfold10;
        };
        bool all_degenerate = true;
        for (const auto* r : cands)
          if (std::isfinite(score(r))) all_degenerate = false;
        for (const auto* r : cands) {
          const double s = all_degenerate ? r->criterion_value : score(r);
          if (!pick) {
            pick = r;
            continue;
          }
          const double sp = all_degenerate ? pick->criterion_value : score(pick);
          if (s < sp) pick = r;
        }
      } else {
        throw std::invalid_argument("selection_eval: unknown criterion " + crit);
      }

      const double picked = pick ? pick->rel_mse : kInf;
      auto bump = [&](Counter& c) {
        if (c.within.empty()) c.within.assign(factors.size(), 0);
        c.runs += 1;
        if (pick && std::isfinite(eps_star) && picked == eps_star) c.best += 1;
        for (std::size_t f = 0; f < factors.size(); ++f)
          if (std::isfinite(eps_star) && picked <= factors[f] * eps_star) c.within[f] += 1;
      };
      bump(per_class[cls][crit]);
      bump(overall[crit]);
    }
  }

  auto to_rows = [&](const std::map<std::string, Counter>& counters) {
    std::vector<SelectionEvalRow> rows;
    for (const auto& crit : criteria) {
      auto it = counters.find(crit);
      if (it == counters.end()) continue;
      SelectionEvalRow row;
      row.criterion = crit;
      row.n_runs = it->second.runs;
      row.best_pct = 100.0 * it->second.best / std::max(1, it->second.runs);
      for (std::size_t f = 0; f < factors.size(); ++f)
        row.within_pct.push_back(100.0 * it->second.within[f] / std::max(1, it->second.runs));
      rows.push_back(std::move(row));
    }
    return rows;
  };

  for (const auto& [cls, counters] : per_class) tables.by_class[cls] = to_rows(counters);
  tables.all = to_rows(overall);
  return tables;
}

void write_selection_tables(const SelectionEvalTables& tables, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  auto dump = [&](const std::string& name, const std::vector<SelectionEvalRow>& rows) {
    std::vector<std::pair<std::string, std::pair<int, std::vector<double>>>> flat;
    for (const auto& r : rows) {
      std::vector<double> vals = {r.best_pct};
      vals.insert(vals.end(), r.within_pct.begin(), r.within_pct.end());
      flat.push_back({r.criterion, {r.n_runs, vals}});
    }
    write_rows_csv((std::filesystem::path(out_dir) / ("selection_" + name + ".csv")).string(),
                   tables.factors, "criterion", flat);
  };
  for (const auto& [cls, rows] : tables.by_class) dump(cls, rows);
  dump("all", tables.all);
}

}  // namespace spce
