#include <doctest.h>

#include <cmath>
#include <vector>

#include "spce/sampling.hpp"

using namespace spce;

TEST_CASE("lhs stratification holds for every column") {
  for (int n : {2, 3, 4, 7, 16, 100, 1000}) {
    Mat P = lhs_maximin_unit(n, 3, 99 + n, 1);
    for (int j = 0; j < 3; ++j) {
      std::vector<int> hits(static_cast<std::size_t>(n), 0);
      for (int i = 0; i < n; ++i) {
        const double v = P(i, j);
        REQUIRE(v >= 0.0);
        REQUIRE(v < 1.0);
        hits[static_cast<std::size_t>(v * n)] += 1;
      }
      for (int h : hits) CHECK(h == 1);
    }
  }
}

TEST_CASE("maximin improves on the unoptimized candidate") {
  double d1 = 0.0, d50 = 0.0;
  (void)lhs_maximin_unit(10, 2, 1, 1, &d1);
  (void)lhs_maximin_unit(10, 2, 1, 50, &d50);
  CHECK(d50 >= d1);
}

TEST_CASE("maximin distance non-decreasing in nested restarts") {
  double prev = 0.0;
  for (int restarts : {1, 2, 5, 10, 25, 50}) {
    double d = 0.0;
    (void)lhs_maximin_unit(12, 3, 7, restarts, &d);
    CHECK(d >= prev);
    prev = d;
  }
}

TEST_CASE("designs are byte-identical for identical parameters") {
  InputModel model({Marginal::uniform(0.0, 1.0), Marginal::gaussian(0.0, 2.0)});
  Design a = lhs_maximin(20, model, 1234, 50);
  Design b = lhs_maximin(20, model, 1234, 50);
  CHECK(a.U == b.U);
  CHECK(a.X == b.X);
  CHECK(a.fingerprint() == b.fingerprint());

  Design c = lhs_maximin(20, model, 1235, 50);
  CHECK(a.fingerprint() != c.fingerprint());

  Design i1 = iid_sample(500, model, 9);
  Design i2 = iid_sample(500, model, 9);
  CHECK(i1.U == i2.U);
}

TEST_CASE("iid sample mean near zero for symmetric marginal") {
  InputModel model({Marginal::uniform(-1.0, 1.0)});
  Design d = iid_sample(1000, model, 4242);
  CHECK(std::abs(d.X.col(0).mean()) <= 0.05);
}

TEST_CASE("U and X related by the transform") {
  InputModel model({Marginal::lognormal(0.0, 0.5), Marginal::uniform(2.0, 3.0)});
  Design d = lhs_maximin(25, model, 77, 10);
  for (int i = 0; i < d.n(); ++i)
    for (int j = 0; j < d.dim(); ++j)
      CHECK(model.from_standard(j, d.U(i, j)) == doctest::Approx(d.X(i, j)).epsilon(1e-12));
}

TEST_CASE("preconditions") {
  InputModel model({Marginal::uniform(0.0, 1.0)});
  CHECK_THROWS_AS(iid_sample(0, model, 1), std::invalid_argument);
  CHECK_THROWS_AS(lhs_maximin(1, model, 1, 10), std::invalid_argument);
  CHECK_THROWS_AS(lhs_maximin_unit(4, 1, 1, 0), std::invalid_argument);
}

TEST_CASE("derived seeds differ across streams") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(7, 3) == derive_seed(7, 3));
}
