#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spce/input_model.hpp"

namespace spce {

enum class EstimatorKind {
  RelMSE,
  LOO,
  ModifiedLOO,
  KFold,
  HybridLOO,
  HybridModifiedLOO,
  HybridKFold,
};

std::string estimator_name(EstimatorKind kind, int k = 0);

/// Relative, variance-normalized error estimate. Degenerate estimates carry
/// value = +inf so that argmin selection stays total.
struct ErrorEstimate {
  double value = 0.0;
  EstimatorKind kind = EstimatorKind::RelMSE;
  int k = 0;  // fold count for the k-fold kinds
  bool degenerate = false;

  static ErrorEstimate make(double v, EstimatorKind kind, int k = 0);
  static ErrorEstimate make_degenerate(EstimatorKind kind, int k = 0);
};

/// sum (truth - pred)^2 / sum (truth - mean(truth))^2.
ErrorEstimate rel_mse(const Vec& pred, const Vec& truth);

/// Fast OLS leave-one-out error on a fixed active set:
/// sum_i ((y_i - yhat_i)/(1 - h_i))^2 / sum_i (y_i - mean(y))^2 with h the
/// hat-matrix diagonal. Exactly equals N explicit refits when the active set
/// is held fixed. Degenerate when the fit interpolates (some h_i -> 1) or
/// Psi_active is rank deficient.
ErrorEstimate loo_fast(const Mat& Psi_active, const Vec& y);

/// Penalty factor T = N/(N - P_active) * (1 + tr((Psi'Psi)^{-1})) applied to
/// the LOO error to counter its optimism on small designs. Returns 1 for an
/// empty active set, +inf when P_active >= N or the Gram matrix is singular.
double modification_factor(int N, const Mat& Psi_active);

/// T * loo_fast, both variance-normalized.
ErrorEstimate modified_loo(const Mat& Psi_active, const Vec& y);

/// Fits on the training block and returns predictions for the test block.
using FitPredictFn = std::function<Vec(const Mat& Psi_train, const Vec& y_train, const Mat& Psi_test)>;

/// Seeded k-fold cross-validation. Fold sizes differ by at most one. The fold
/// map is built by canonically ordering the observations (row content, then
/// response) and applying a seeded shuffle, so the estimate does not depend
/// on the order in which observations are supplied. Held-out predictions are
/// pooled and scored with rel_mse against y.
ErrorEstimate kfold_cv(const FitPredictFn& fit, const Mat& Psi, const Vec& y, int k,
                       std::uint64_t seed);

/// Fold assignment used by kfold_cv: fold id per observation.
std::vector<int> kfold_assignment(const Mat& Psi, const Vec& y, int k, std::uint64_t seed);

/// Hybrid estimators: the active set is fixed from the full-data fit and only
/// the coefficients are recomputed by OLS per the chosen CV scheme.
/// kind must be HybridLOO, HybridModifiedLOO or HybridKFold (k = 10 unless N
/// is smaller).
ErrorEstimate hybrid_estimate(EstimatorKind kind, const Mat& Psi_active, const Vec& y,
                              std::uint64_t seed = 0x5bd1e995u, int k = 10);

}  // namespace spce
