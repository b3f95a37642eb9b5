#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spce/cv_error.hpp"

namespace spce {

/// Sparse regression result on a fixed candidate basis. `coefficients` has
/// one entry per candidate column, zero exactly off `active`.
/// criterion_value is the solver's own model-selection score (relative,
/// variance-normalized; +inf when degenerate). `hyperparameter` and
/// `cv_seed` are enough to recompute the criterion from (Psi, y, active).
struct SparseSolution {
  Vec coefficients;
  std::vector<int> active;
  double criterion_value = 0.0;
  EstimatorKind criterion_kind = EstimatorKind::ModifiedLOO;
  int criterion_k = 0;
  std::string solver_id;
  double hyperparameter = 0.0;
  std::uint64_t cv_seed = 0;
};

/// Least-squares fit by Householder QR with column pivoting; falls back to a
/// minimum-norm SVD solution (relative singular value cutoff 1e-12) when the
/// matrix is rank deficient. Requires rows >= columns.
Vec ols(const Mat& Psi_active, const Vec& y);

/// Orthogonal matching pursuit: greedily adds the column most correlated
/// with the residual (columns normalized internally for the ranking), refits
/// by OLS, and returns the iterate with the smallest modified LOO error.
SparseSolution omp(const Mat& Psi, const Vec& y);

struct SpResult {
  Vec coefficients;  // full length, zero off active
  std::vector<int> active;
  double residual_norm = 0.0;
};

/// Subspace pursuit with fixed target sparsity K: starts from the top-K
/// correlations, then alternates candidate expansion (union with the top-K
/// residual correlations), least squares on the candidate set, and pruning
/// to the K largest-magnitude coefficients, until the residual norm stops
/// decreasing (at most 100 iterations).
SpResult subspace_pursuit(const Mat& Psi, const Vec& y, int K);

/// Sweeps K = 1..min(N/2, P) and picks the K minimizing the modified LOO of
/// the OLS refit.
SparseSolution sp_select_loo(const Mat& Psi, const Vec& y);

/// Same sweep, scored by k-fold cross-validation of end-to-end subspace
/// pursuit refits.
SparseSolution sp_select_kfold(const Mat& Psi, const Vec& y, int k = 5,
                               std::uint64_t seed = 0x5bd1e995u);

/// Bayesian compressive sensing: fast sequential sparse Bayesian learning
/// with a Laplace prior (greedy add/delete/re-estimate maximizing the
/// marginal likelihood). The noise level sigma^2 = eta * var(y) is swept
/// over a 7-point logarithmic grid in [1e-8, 1e-1]; eta is chosen by 10-fold
/// cross-validation of the end-to-end solver, and the winning active set is
/// refit by OLS.
SparseSolution bcs(const Mat& Psi, const Vec& y, std::uint64_t seed = 0x5bd1e995u);

/// Single FastLaplace run at fixed noise variance; exposed for testing.
std::vector<int> bcs_active_set(const Mat& Psi, const Vec& y, double sigma2);

/// Hybrid least angle regression: the LARS path (equiangular updates on
/// internally normalized columns) truncated at min(N-1, P) regressors; every
/// path prefix is refit by OLS and the prefix with the smallest modified LOO
/// is returned. Columns that would make the active Gram singular are dropped
/// from the path.
SparseSolution hybrid_lars(const Mat& Psi, const Vec& y);

using SolverFn = std::function<SparseSolution(const Mat&, const Vec&)>;

/// Solver ids: "lars", "omp", "spk5", "sploo", "bcs".
const std::vector<std::string>& solver_ids();
SolverFn solver_by_id(const std::string& id, std::uint64_t seed = 0x5bd1e995u);

}  // namespace spce
