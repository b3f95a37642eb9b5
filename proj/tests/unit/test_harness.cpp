#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "spce/bench.hpp"

using namespace spce;

namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& tag) {
  fs::path dir = fs::temp_directory_path() / ("spce_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

BenchmarkRecord rec(const std::string& model, int d, int n, int rep, const std::string& solver,
                    const std::string& scheme, double rel) {
  BenchmarkRecord r;
  r.model = model;
  r.d = d;
  r.n = n;
  r.replication = rep;
  r.solver = solver;
  r.scheme = scheme;
  r.rel_mse = rel;
  r.criterion_kind = "modloo";
  r.criterion_value = rel;
  r.hyb_loo = rel;
  r.hyb_modloo = rel;
  r.hyb_kfold10 = rel;
  r.basis_size = 10;
  r.active_count = 3;
  return r;
}

CampaignConfig small_campaign() {
  CampaignConfig c;
  c.models = {"ishigami"};
  c.explicit_n["ishigami"] = {30};
  c.replications = 2;
  c.solvers = {"omp", "lars"};
  c.schemes = {"static", "pq"};
  c.validation_n = 2000;
  c.seed = 4242;
  c.lhs_restarts = 5;
  c.overrides["ishigami"] = nlohmann::json{{"p_max", 4}, {"q_range", {0.75, 1.0}}};
  return c;
}

}  // namespace

TEST_CASE("aggregate matches the two-combo hand count") {
  std::vector<BenchmarkRecord> records = {
      rec("ishigami", 3, 50, 0, "sploo", "pq", 1e-3),
      rec("ishigami", 3, 50, 0, "bcs", "fn", 2e-3),
      rec("ishigami", 3, 50, 1, "sploo", "pq", 1e-2),
      rec("ishigami", 3, 50, 1, "bcs", "fn", 1e-4),
  };
  AggregateTables t = aggregate(records, {2.0, 5.0, 10.0});
  REQUIRE(t.by_class.count("lowdim_small") == 1);
  const auto& rows = t.by_class.at("lowdim_small");
  REQUIRE(rows.size() == 2);
  // Sorted by within-2 percentage: bcs&fn (100%) first.
  CHECK(rows[0].combo == "bcs&fn");
  CHECK(rows[0].best_pct == doctest::Approx(50.0));
  CHECK(rows[0].within_pct[0] == doctest::Approx(100.0));
  CHECK(rows[0].within_pct[1] == doctest::Approx(100.0));
  CHECK(rows[0].within_pct[2] == doctest::Approx(100.0));
  CHECK(rows[1].combo == "sploo&pq");
  CHECK(rows[1].best_pct == doctest::Approx(50.0));
  CHECK(rows[1].within_pct[0] == doctest::Approx(50.0));
  CHECK(rows[1].within_pct[1] == doctest::Approx(50.0));
  CHECK(rows[1].within_pct[2] == doctest::Approx(50.0));
}

TEST_CASE("aggregate: single combo and exact ties") {
  std::vector<BenchmarkRecord> one = {rec("ishigami", 3, 50, 0, "omp", "pq", 0.5),
                                      rec("ishigami", 3, 50, 1, "omp", "pq", 0.1)};
  AggregateTables t1 = aggregate(one);
  CHECK(t1.all[0].best_pct == doctest::Approx(100.0));
  for (double w : t1.all[0].within_pct) CHECK(w == doctest::Approx(100.0));

  std::vector<BenchmarkRecord> tie = {rec("ishigami", 3, 50, 0, "omp", "pq", 0.25),
                                      rec("ishigami", 3, 50, 0, "bcs", "fn", 0.25),
                                      rec("ishigami", 3, 50, 0, "sploo", "ad", 0.50)};
  AggregateTables t2 = aggregate(tie);
  int best_count = 0;
  for (const auto& row : t2.all)
    if (row.best_pct == doctest::Approx(100.0)) ++best_count;
  CHECK(best_count == 2);  // both tying combinations count as best
}

TEST_CASE("aggregate monotonicity in the factor") {
  std::vector<BenchmarkRecord> records;
  for (int repl = 0; repl < 6; ++repl)
    for (int c = 0; c < 3; ++c)
      records.push_back(rec("borehole", 8, 100, repl, solver_ids()[static_cast<std::size_t>(c)],
                            "pq", std::pow(10.0, -3 + 0.7 * c + 0.1 * repl)));
  AggregateTables t = aggregate(records);
  for (const auto& [cls, rows] : t.by_class)
    for (const auto& row : rows) {
      CHECK(row.within_pct[0] <= row.within_pct[1]);
      CHECK(row.within_pct[1] <= row.within_pct[2]);
      CHECK(row.within_pct[2] <= 100.0);
      CHECK(row.best_pct <= row.within_pct[0]);
    }
}

TEST_CASE("per-ED best coverage") {
  std::vector<BenchmarkRecord> records = {rec("ishigami", 3, 50, 0, "omp", "pq", 0.3),
                                          rec("ishigami", 3, 50, 0, "bcs", "fn", 0.7)};
  AggregateTables t = aggregate(records);
  double best_sum = 0.0;
  for (const auto& row : t.all) best_sum += row.best_pct;
  CHECK(best_sum >= 100.0 - 1e-12);
}

TEST_CASE("records CSV round trip") {
  auto dir = fresh_dir("csv");
  std::vector<BenchmarkRecord> records = {
      rec("ishigami", 3, 50, 0, "sploo", "pq", 1.2345678901234567e-05),
      rec("morris", 20, 350, 7, "bcs", "static", std::numeric_limits<double>::infinity()),
  };
  records[1].design_fingerprint = 0xdeadbeefcafef00dULL;
  const std::string path = (dir / "records.csv").string();
  write_records_csv(path, records);
  auto back = read_records_csv(path);
  REQUIRE(back.size() == 2);
  CHECK(back[0].rel_mse == records[0].rel_mse);  // bit-exact through the CSV
  CHECK(back[0].key() == records[0].key());
  CHECK(std::isinf(back[1].rel_mse));
  CHECK(back[1].design_fingerprint == records[1].design_fingerprint);
}

TEST_CASE("campaign determinism and resumability") {
  auto dir = fresh_dir("campaign");
  CampaignConfig config = small_campaign();

  const std::string csv1 = (dir / "r1.csv").string();
  const std::string csv2 = (dir / "r2.csv").string();
  auto run1 = run_campaign(config, csv1);
  auto run2 = run_campaign(config, csv2);
  REQUIRE(run1.size() == 8);  // 1 model x 1 N x 2 reps x 2 solvers x 2 schemes
  CHECK(slurp(csv1) == slurp(csv2));

  // Interrupt after 3 records: truncate and resume; bytes must match.
  std::string full = slurp(csv1);
  std::istringstream is(full);
  std::string line, partial;
  for (int i = 0; i < 4 && std::getline(is, line); ++i) partial += line + "\n";
  const std::string csv3 = (dir / "r3.csv").string();
  {
    std::ofstream out(csv3);
    out << partial;
  }
  auto resumed = run_campaign(config, csv3);
  CHECK(resumed.size() == run1.size());
  CHECK(slurp(csv3) == full);

  // All records of one replication share the design fingerprint.
  for (const auto& a : run1)
    for (const auto& b : run1)
      if (a.n == b.n && a.replication == b.replication)
        CHECK(a.design_fingerprint == b.design_fingerprint);
}

TEST_CASE("campaign record count example") {
  auto dir = fresh_dir("count");
  CampaignConfig c;
  c.models = {"ishigami"};
  c.explicit_n["ishigami"] = {50};
  c.replications = 2;
  c.solvers = {"omp"};
  c.schemes = {"static"};
  c.validation_n = 1000;
  c.seed = 9;
  c.lhs_restarts = 5;
  auto records = run_campaign(c, (dir / "records.csv").string());
  CHECK(records.size() == 2);
}

TEST_CASE("ad scheme is dropped for high-dimensional models") {
  CampaignConfig c;
  c.models = {"morris"};
  c.replications = 1;
  c.solvers = {"omp"};
  c.schemes = {"pq", "ad"};
  c.validate();
  CHECK(c.schemes_for(model_by_id("morris")) == std::vector<std::string>{"pq"});
  CHECK(c.schemes_for(model_by_id("ishigami")) == std::vector<std::string>{"pq", "ad"});
}

TEST_CASE("surrogate persistence: bit-exact predictions") {
  auto dir = fresh_dir("surrogate");
  const auto& model = model_by_id("ishigami");
  Design d = lhs_maximin(40, model.input, 7, 5);
  d.y = model.evaluate(d.X);
  d.has_y = true;
  AdaptivityConfig cfg;
  cfg.p_min = 1;
  cfg.p_max = 5;
  FitResult fit = pq_adaptive(solver_by_id("sploo"), "sploo", d, model.input, cfg);

  const std::string path = (dir / "s.json").string();
  fit.surrogate.save(path);
  SparseSurrogate loaded = SparseSurrogate::load(path);

  CHECK(loaded.coefficients == fit.surrogate.coefficients);  // 0 ULP
  CHECK(loaded.active == fit.surrogate.active);
  CHECK(loaded.basis == fit.surrogate.basis);

  Design probe = iid_sample(50, model.input, 123);
  Vec a = fit.surrogate.predict(probe.X);
  Vec b = loaded.predict(probe.X);
  CHECK(a == b);
}

TEST_CASE("predict matches the manual expansion") {
  InputModel model({Marginal::uniform(-1, 1), Marginal::uniform(-1, 1)});
  SparseSurrogate s;
  s.input_model = model;
  s.basis = MultiIndexSet::total_degree(2, 1);
  s.coefficients = Vec::Zero(3);
  s.coefficients[0] = 2.0;   // (0,0)
  s.coefficients[1] = -1.0;  // (1,0)
  s.active = {0, 1};

  Mat X(3, 2);
  X << 0.0, 0.0, 0.5, -0.5, -1.0, 1.0;
  Vec pred = s.predict(X);
  for (int i = 0; i < 3; ++i) {
    const double psi1 = std::sqrt(3.0) * X(i, 0);
    CHECK(pred[i] == doctest::Approx(2.0 - psi1).epsilon(1e-14));
  }

  SparseSurrogate constant = s;
  constant.active = {0};
  Vec cpred = constant.predict(X);
  for (int i = 0; i < 3; ++i) CHECK(cpred[i] == doctest::Approx(2.0));
}

TEST_CASE("selection evaluation") {
  // Synthetic records for two EDs with known outcomes.
  std::vector<BenchmarkRecord> records;
  for (int repl = 0; repl < 4; ++repl) {
    records.push_back(rec("ishigami", 3, 50, repl, "bcs", "fn", repl == 0 ? 1e-4 : 1e-2));
    records.push_back(rec("ishigami", 3, 50, repl, "sploo", "pq", 5e-3));
    records.push_back(rec("ishigami", 3, 50, repl, "spk5", "fn", 2e-2));
  }
  // Give hybrid scores that always prefer sploo&pq.
  for (auto& r : records) r.hyb_modloo = (r.solver == "sploo") ? 1e-6 : 1e-3;

  SelectionEvalTables t =
      selection_eval(records, {"oracle", "hyb_modloo", "fixed", "random"}, 77);

  const auto& rows = t.all;
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].criterion == "oracle");
  CHECK(rows[0].best_pct == doctest::Approx(100.0));  // oracle is best by construction

  // hyb_modloo always picks sploo&pq: best on 3 of 4 EDs.
  CHECK(rows[1].criterion == "hyb_modloo");
  CHECK(rows[1].best_pct == doctest::Approx(75.0));

  // The fixed rule (bcs & fn for low-d small) has the same row as that
  // combination in the aggregate tables.
  AggregateTables agg = aggregate(records);
  const AggregateRow* bcs_fn = nullptr;
  for (const auto& row : agg.all)
    if (row.combo == "bcs&fn") bcs_fn = &row;
  REQUIRE(bcs_fn != nullptr);
  CHECK(rows[2].criterion == "fixed");
  CHECK(rows[2].best_pct == doctest::Approx(bcs_fn->best_pct));
  for (std::size_t f = 0; f < rows[2].within_pct.size(); ++f)
    CHECK(rows[2].within_pct[f] == doctest::Approx(bcs_fn->within_pct[f]));

  // Random selection is reproducible.
  SelectionEvalTables t2 = selection_eval(records, {"random"}, 77);
  CHECK(t2.all[0].best_pct == doctest::Approx(rows[3].best_pct));
}

TEST_CASE("campaign config json round trip and validation") {
  CampaignConfig c = small_campaign();
  CampaignConfig back = CampaignConfig::from_json(c.to_json());
  CHECK(back.models == c.models);
  CHECK(back.replications == c.replications);
  CHECK(back.explicit_n == c.explicit_n);
  CHECK(back.seed == c.seed);
  CHECK(back.overrides.at("ishigami") == c.overrides.at("ishigami"));

  CampaignConfig bad = c;
  bad.solvers = {"nope"};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  CampaignConfig defaults_check;
  defaults_check.models = {"ishigami"};
  defaults_check.solvers = {"omp"};
  defaults_check.schemes = {"pq"};
  AdaptivityConfig acfg = defaults_check.adaptivity_for("ishigami", false);
  CHECK(acfg.p_max == 25);              // defaults table
  CHECK(acfg.q_range.size() == 6);
  CHECK(acfg.fn_initial_p == 12);       // small-ED column
  AdaptivityConfig lcfg = defaults_check.adaptivity_for("ishigami", true);
  CHECK(lcfg.fn_initial_p == 19);       // large-ED column
  AdaptivityConfig mcfg = defaults_check.adaptivity_for("morris", false);
  CHECK(mcfg.fn_q == doctest::Approx(0.6));
  CHECK(mcfg.q_range == std::vector<double>{0.4, 0.5, 0.6});
}

TEST_CASE("validation size default rule") {
  CampaignConfig c;
  c.models = {"ishigami", "hd100"};
  c.solvers = {"omp"};
  c.schemes = {"static"};
  CHECK(c.validation_n_for(model_by_id("ishigami")) == 100000);
  CHECK(c.validation_n_for(model_by_id("hd100")) == 10000);  // d >= 50
  c.validation_n = 777;
  CHECK(c.validation_n_for(model_by_id("ishigami")) == 777);
}
