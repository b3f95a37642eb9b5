#include <doctest.h>

#include <cmath>

#include "spce/adaptivity.hpp"
#include "spce/test_models.hpp"

using namespace spce;

namespace {

/// Synthetic design whose response is an exact expansion in given terms.
Design synthetic_design(const InputModel& model, int n, std::uint64_t seed,
                        const std::vector<std::pair<MultiIndex, double>>& terms) {
  Design d = lhs_maximin(n, model, seed, 10);
  const auto fams = families_for(model);
  d.y = Vec::Zero(n);
  for (const auto& [alpha, coef] : terms)
    for (int i = 0; i < n; ++i)
      d.y[i] += coef * eval_multivariate(fams, alpha, d.U.row(i).transpose());
  d.has_y = true;
  return d;
}

InputModel uniform_model(int d) {
  return InputModel(std::vector<Marginal>(static_cast<std::size_t>(d), Marginal::uniform(-1, 1)));
}

int count_selected(const AdaptivityTrace& trace) {
  int n = 0;
  for (const auto& e : trace.entries) n += e.selected ? 1 : 0;
  return n;
}

double min_finite_criterion(const AdaptivityTrace& trace) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : trace.entries) best = std::min(best, e.criterion);
  return best;
}

}  // namespace

TEST_CASE("static basis matches the benchmark settings table") {
  CHECK(static_basis(3, 50).size() == 165);    // total degree 8
  CHECK(static_basis(3, 150).size() == 455);   // total degree 12
  CHECK(static_basis(20, 150) == MultiIndexSet::hyperbolic(20, 6, 0.5));
  CHECK(static_basis(20, 350) == MultiIndexSet::hyperbolic(20, 8, 0.5));
}

TEST_CASE("static rule picks the cardinality closest to (10/3)N") {
  for (int d : {2, 3, 5, 8}) {
    for (int n : {20, 50, 120, 300}) {
      MultiIndexSet s = static_basis(d, n);
      const double target = 10.0 / 3.0 * n;
      const double dist = std::abs(s.size() - target);
      // No other degree does strictly better.
      for (int p = 0; p <= 40; ++p) {
        const double other = std::abs(MultiIndexSet::total_degree(d, p).size() - target);
        CHECK(dist <= other);
      }
    }
  }
}

TEST_CASE("pq adaptivity recovers an exact sparse expansion") {
  InputModel model = uniform_model(2);
  Design d = synthetic_design(model, 40, 11, {{{2, 0}, 1.0}, {{0, 1}, 1.0}});
  AdaptivityConfig cfg;
  cfg.p_min = 1;
  cfg.p_max = 4;
  cfg.q_range = {0.5, 1.0};
  FitResult fit = pq_adaptive(solver_by_id("sploo"), "sploo", d, model, cfg);
  CHECK(fit.surrogate.criterion_value <= 1e-10);
  bool has20 = false, has01 = false;
  for (int a : fit.surrogate.active) {
    if (fit.surrogate.basis[a] == MultiIndex{2, 0}) has20 = true;
    if (fit.surrogate.basis[a] == MultiIndex{0, 1}) has01 = true;
  }
  CHECK(has20);
  CHECK(has01);
  CHECK(count_selected(fit.trace) == 1);
}

TEST_CASE("pq with a single grid point selects it") {
  InputModel model = uniform_model(2);
  Design d = synthetic_design(model, 30, 5, {{{1, 0}, 2.0}});
  AdaptivityConfig cfg;
  cfg.p_min = 3;
  cfg.p_max = 3;
  cfg.q_range = {1.0};
  FitResult fit = pq_adaptive(solver_by_id("omp"), "omp", d, model, cfg);
  CHECK(fit.trace.entries.size() == 1);
  CHECK(fit.trace.entries[0].selected);
  CHECK(fit.surrogate.basis_size() == MultiIndexSet::total_degree(2, 3).size());
}

TEST_CASE("pq skips grid points above max_basis_size") {
  InputModel model = uniform_model(3);
  Design d = synthetic_design(model, 30, 5, {{{1, 0, 0}, 2.0}});
  AdaptivityConfig cfg;
  cfg.p_min = 1;
  cfg.p_max = 6;
  cfg.q_range = {1.0};
  cfg.max_basis_size = 35;  // p=4 has 35, p=5 has 56
  FitResult fit = pq_adaptive(solver_by_id("omp"), "omp", d, model, cfg);
  int skipped = 0;
  for (const auto& e : fit.trace.entries)
    if (e.descriptor.find("skipped") != std::string::npos) ++skipped;
  CHECK(skipped == 2);
  CHECK(fit.surrogate.basis_size() <= 35);
}

TEST_CASE("pq candidate sizes non-decreasing in p for fixed q") {
  InputModel model = uniform_model(2);
  Design d = synthetic_design(model, 25, 3, {{{1, 1}, 1.0}});
  AdaptivityConfig cfg;
  cfg.p_min = 1;
  cfg.p_max = 5;
  cfg.q_range = {0.5};
  FitResult fit = pq_adaptive(solver_by_id("omp"), "omp", d, model, cfg);
  int prev = 0;
  for (const auto& e : fit.trace.entries) {
    CHECK(e.basis_size >= prev);
    prev = e.basis_size;
  }
}

TEST_CASE("forward-neighbor expansion of a seed set") {
  MultiIndexSet active(2, {{0, 0}, {1, 0}});
  MultiIndexSet grown = active.unite(admissible_frontier(active));
  CHECK(grown.size() == 4);
  CHECK(grown.contains({2, 0}));
  CHECK(grown.contains({0, 1}));
  CHECK(!grown.contains({1, 1}));
}

TEST_CASE("forward-neighbor adaptivity on an exactly-linear model stops early") {
  InputModel model = uniform_model(2);
  Design d = synthetic_design(model, 30, 21, {{{1, 0}, 1.5}, {{0, 1}, -0.5}});
  AdaptivityConfig cfg;
  cfg.fn_initial_p = 1;
  FitResult fit = forward_neighbor_adaptive(solver_by_id("sploo"), "sploo", d, model, cfg);
  CHECK(fit.surrogate.criterion_value <= 1e-10);
  CHECK(count_selected(fit.trace) == 1);
  // Initial fit is already exact; the loop should terminate quickly.
  CHECK(fit.trace.entries.size() <= 1 + 2 * 3);
  CHECK(fit.surrogate.criterion_value == doctest::Approx(min_finite_criterion(fit.trace)));
}

TEST_CASE("forward-neighbor grows the basis when high-degree terms matter") {
  InputModel model = uniform_model(2);
  // Target has a degree-4 interaction not in the initial degree-2 basis.
  Design d = synthetic_design(model, 60, 33,
                              {{{1, 0}, 1.0}, {{2, 2}, 2.0}, {{0, 1}, -1.0}});
  AdaptivityConfig cfg;
  cfg.fn_initial_p = 2;
  FitResult fit = forward_neighbor_adaptive(solver_by_id("sploo"), "sploo", d, model, cfg);
  CHECK(fit.surrogate.criterion_value <= 1e-8);
  bool has22 = false;
  for (int a : fit.surrogate.active) has22 |= fit.surrogate.basis[a] == MultiIndex{2, 2};
  CHECK(has22);
}

TEST_CASE("fn initial degree defaults to the 10N rule") {
  InputModel model = uniform_model(3);
  Design d = synthetic_design(model, 50, 3, {{{1, 0, 0}, 1.0}});
  AdaptivityConfig cfg;  // fn_initial_p = -1
  FitResult fit = forward_neighbor_adaptive(solver_by_id("sploo"), "sploo", d, model, cfg);
  // |A^12| = 455 is closest to 10 * 50 = 500 in d = 3.
  CHECK(fit.trace.entries.front().basis_size == 455);
  CHECK(fit.trace.entries.front().descriptor.find("p=12") != std::string::npos);
}

TEST_CASE("anisotropic degree step from an active set") {
  MultiIndexSet active(2, {{0, 0}, {2, 0}, {0, 1}});
  std::vector<int> pmax = active.max_degrees();
  CHECK(pmax == std::vector<int>{2, 1});
  std::vector<int> pnew = {pmax[0] + 1, pmax[1] + 1};
  MultiIndexSet basis = MultiIndexSet::anisotropic(pnew);
  CHECK(basis.size() == 7);
  for (const auto& a :
       std::vector<MultiIndex>{{0, 0}, {1, 0}, {2, 0}, {3, 0}, {0, 1}, {1, 1}, {0, 2}})
    CHECK(basis.contains(a));
}

TEST_CASE("ad removal count uses the floor convention") {
  // |A^active| = 20, inner iteration i = 4: remove floor(0.3 * 20) = 6.
  CHECK(static_cast<int>(std::floor(3.0 / 10.0 * 20)) == 6);
}

TEST_CASE("isotropic active set gives a total-degree candidate") {
  MultiIndexSet active = MultiIndexSet::total_degree(3, 2);
  std::vector<int> pnew = active.max_degrees();
  for (int& v : pnew) v += 1;
  CHECK(MultiIndexSet::anisotropic(pnew) == MultiIndexSet::total_degree(3, 3));
}

TEST_CASE("anisotropic adaptivity runs and improves on a sparse target") {
  InputModel model = uniform_model(2);
  Design d = synthetic_design(model, 50, 13, {{{3, 0}, 1.0}, {{0, 1}, 0.5}});
  AdaptivityConfig cfg;
  cfg.p_max = 4;
  cfg.ad_initial_p = 1;
  FitResult fit = anisotropic_adaptive(solver_by_id("sploo"), "sploo", d, model, cfg);
  CHECK(fit.surrogate.criterion_value <= 1e-8);
  CHECK(count_selected(fit.trace) == 1);
  CHECK(fit.surrogate.scheme_id == "ad");
}

TEST_CASE("anisotropic adaptivity rejects high-dimensional inputs") {
  InputModel model = uniform_model(20);
  Design d = lhs_maximin(30, model, 1, 5);
  d.y = Vec::Ones(30);
  d.has_y = true;
  AdaptivityConfig cfg;
  CHECK_THROWS_AS(anisotropic_adaptive(solver_by_id("omp"), "omp", d, model, cfg),
                  std::invalid_argument);
}

TEST_CASE("every scheme's surrogate criterion equals the trace minimum") {
  const auto& model = model_by_id("ishigami");
  Design d = lhs_maximin(50, model.input, 2024, 10);
  d.y = model.evaluate(d.X);
  d.has_y = true;
  AdaptivityConfig cfg;
  cfg.p_min = 1;
  cfg.p_max = 6;
  cfg.q_range = {0.75, 1.0};
  cfg.fn_initial_p = 4;
  cfg.ad_initial_p = 3;
  for (const std::string scheme : {"static", "pq", "fn", "ad"}) {
    CAPTURE(scheme);
    FitResult fit = fit_with_scheme(solver_by_id("omp"), "omp", scheme, d, model.input, cfg);
    CHECK(count_selected(fit.trace) == 1);
    CHECK(fit.surrogate.criterion_value == doctest::Approx(min_finite_criterion(fit.trace)));
    for (const auto& e : fit.trace.entries)
      if (e.selected) CHECK(e.criterion == doctest::Approx(fit.surrogate.criterion_value));
  }
}
