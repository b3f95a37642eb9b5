#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "spce/poly_basis.hpp"
#include "spce/rng.hpp"
#include "spce/sampling.hpp"

using namespace spce;

namespace {

struct Quadrature {
  Vec nodes;
  Vec weights;  // normalized: sum to 1 (expectation weights)
};

// Golub-Welsch on the Jacobi matrix of the weight's orthogonal family.
// Legendre (uniform on [-1,1]): a_k = 0, b_k = k / sqrt(4k^2 - 1).
// Probabilists' Hermite (standard normal): a_k = 0, b_k = sqrt(k).
Quadrature gauss_rule(BasisFamily family, int n) {
  Mat J = Mat::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = family == BasisFamily::Legendre
                         ? k / std::sqrt(4.0 * k * k - 1.0)
                         : std::sqrt(static_cast<double>(k));
    J(k, k - 1) = b;
    J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(J);
  Quadrature q;
  q.nodes = es.eigenvalues();
  q.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    const double v = es.eigenvectors()(0, i);
    q.weights[i] = v * v;  // already normalized to the probability measure
  }
  return q;
}

}  // namespace

TEST_CASE("univariate analytic values") {
  CHECK(eval_univariate(BasisFamily::Legendre, 0, 0.37) == doctest::Approx(1.0));
  CHECK(eval_univariate(BasisFamily::Legendre, 1, 1.0) == doctest::Approx(std::sqrt(3.0)));
  CHECK(eval_univariate(BasisFamily::Hermite, 2, 0.0) == doctest::Approx(-1.0 / std::sqrt(2.0)));
}

TEST_CASE("orthonormality under 64-node Gauss quadrature up to degree 20") {
  for (BasisFamily family : {BasisFamily::Legendre, BasisFamily::Hermite}) {
    Quadrature q = gauss_rule(family, 64);
    std::vector<std::vector<double>> vals(static_cast<std::size_t>(q.nodes.size()),
                                          std::vector<double>(21));
    for (Eigen::Index i = 0; i < q.nodes.size(); ++i)
      eval_univariate_all(family, 20, q.nodes[i], vals[static_cast<std::size_t>(i)].data());
    for (int j = 0; j <= 20; ++j)
      for (int k = j; k <= 20; ++k) {
        double ip = 0.0;
        for (Eigen::Index i = 0; i < q.nodes.size(); ++i)
          ip += q.weights[i] * vals[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
                vals[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
        CHECK(std::abs(ip - (j == k ? 1.0 : 0.0)) <= 1e-10);
      }
  }
}

TEST_CASE("recurrence stays finite up to degree 40 and |u| = 10") {
  for (BasisFamily family : {BasisFamily::Legendre, BasisFamily::Hermite})
    for (double u : {-10.0, -3.0, 0.0, 0.5, 10.0}) {
      std::vector<double> buf(41);
      eval_univariate_all(family, 40, u, buf.data());
      for (double v : buf) CHECK(std::isfinite(v));
    }
}

TEST_CASE("multivariate products") {
  std::vector<BasisFamily> leg2 = {BasisFamily::Legendre, BasisFamily::Legendre};
  Vec u(2);
  u << 1.0, 1.0;
  CHECK(eval_multivariate(leg2, {0, 0}, u) == doctest::Approx(1.0));
  CHECK(eval_multivariate(leg2, {1, 1}, u) == doctest::Approx(3.0));

  std::vector<BasisFamily> her2 = {BasisFamily::Hermite, BasisFamily::Hermite};
  Vec v(2);
  v << 0.0, 1.7;
  CHECK(eval_multivariate(her2, {2, 0}, v) == doctest::Approx(-1.0 / std::sqrt(2.0)));
  CHECK_THROWS_AS(eval_multivariate(her2, {1, 1, 1}, v), std::invalid_argument);
}

TEST_CASE("regression matrix examples") {
  std::vector<BasisFamily> leg1 = {BasisFamily::Legendre};
  Mat U(3, 1);
  U << 0.1, -0.3, 0.9;
  Mat ones = build_regression_matrix(MultiIndexSet(1, {{0}}), leg1, U);
  CHECK(ones.rows() == 3);
  CHECK(ones.cols() == 1);
  CHECK(ones.minCoeff() == doctest::Approx(1.0));

  Mat U2(2, 1);
  U2 << 0.0, 1.0;
  Mat psi = build_regression_matrix(MultiIndexSet::total_degree(1, 1), leg1, U2);
  CHECK(psi(0, 0) == doctest::Approx(1.0));
  CHECK(psi(0, 1) == doctest::Approx(0.0));
  CHECK(psi(1, 1) == doctest::Approx(std::sqrt(3.0)));

  std::vector<BasisFamily> her2 = {BasisFamily::Hermite, BasisFamily::Hermite};
  Mat U3 = Mat::Zero(1, 2);
  Mat psi2 = build_regression_matrix(MultiIndexSet::total_degree(2, 1), her2, U3);
  CHECK(psi2(0, 0) == doctest::Approx(1.0));
  CHECK(psi2(0, 1) == doctest::Approx(0.0));
  CHECK(psi2(0, 2) == doctest::Approx(0.0));
}

TEST_CASE("empirical Gram converges to identity") {
  // N = 1e5 i.i.d. standardized samples, total-degree(2,3) basis, fixed seed.
  InputModel model({Marginal::uniform(-1.0, 1.0), Marginal::gaussian(0.0, 1.0)});
  Design design = iid_sample(100000, model, 42);
  MultiIndexSet set = MultiIndexSet::total_degree(2, 3);
  Mat Psi = build_regression_matrix(set, families_for(model), design.U);
  Mat gram = Psi.transpose() * Psi / static_cast<double>(Psi.rows());
  Mat err = gram - Mat::Identity(set.size(), set.size());
  CHECK(err.cwiseAbs().maxCoeff() <= 0.05);
}
