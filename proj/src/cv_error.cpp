#include "spce/cv_error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "spce/rng.hpp"

namespace spce {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::string estimator_name(EstimatorKind kind, int k) {
  switch (kind) {
    case EstimatorKind::RelMSE: return "relmse";
    case EstimatorKind::LOO: return "loo";
    case EstimatorKind::ModifiedLOO: return "modloo";
    case EstimatorKind::KFold: return "kfold" + std::to_string(k);
    case EstimatorKind::HybridLOO: return "hyb_loo";
    case EstimatorKind::HybridModifiedLOO: return "hyb_modloo";
    case EstimatorKind::HybridKFold: return "hyb_kfold" + std::to_string(k);
  }
  return "?";
}

ErrorEstimate ErrorEstimate::make(double v, EstimatorKind kind, int k) {
  if (!std::isfinite(v) || v < 0.0) return make_degenerate(kind, k);
  return ErrorEstimate{v, kind, k, false};
}

ErrorEstimate ErrorEstimate::make_degenerate(EstimatorKind kind, int k) {
  return ErrorEstimate{kInf, kind, k, true};
}

ErrorEstimate rel_mse(const Vec& pred, const Vec& truth) {
  if (pred.size() != truth.size() || truth.size() < 2)
    throw std::invalid_argument("rel_mse: need equal lengths >= 2");
  const double mean = truth.mean();
  const double denom = (truth.array() - mean).square().sum();
  if (!(denom > 0.0)) return ErrorEstimate::make_degenerate(EstimatorKind::RelMSE);
  return ErrorEstimate::make((truth - pred).squaredNorm() / denom, EstimatorKind::RelMSE);
}

ErrorEstimate loo_fast(const Mat& Psi_active, const Vec& y) {
  const Eigen::Index n = Psi_active.rows();
  const Eigen::Index p = Psi_active.cols();
  if (y.size() != n) throw std::invalid_argument("loo_fast: size mismatch");
  if (p >= n) return ErrorEstimate::make_degenerate(EstimatorKind::LOO);
  const double mean0 = y.mean();
  const double denom0 = (y.array() - mean0).square().sum();
  if (!(denom0 > 0.0)) return ErrorEstimate::make_degenerate(EstimatorKind::LOO);
  if (p == 0) return ErrorEstimate::make(y.squaredNorm() / denom0, EstimatorKind::LOO);

  Eigen::HouseholderQR<Mat> qr(Psi_active);
  // Rank check via the R diagonal.
  const Mat& qrmat = qr.matrixQR();
  double dmax = 0.0, dmin = kInf;
  for (Eigen::Index j = 0; j < p; ++j) {
    const double dj = std::abs(qrmat(j, j));
    dmax = std::max(dmax, dj);
    dmin = std::min(dmin, dj);
  }
  if (!(dmin > dmax * 1e-12)) return ErrorEstimate::make_degenerate(EstimatorKind::LOO);

  Mat thinQ = qr.householderQ() * Mat::Identity(n, p);
  Vec h = thinQ.rowwise().squaredNorm();
  Vec residual = y - thinQ * (thinQ.transpose() * y);

  double num = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double omh = 1.0 - h[i];
    if (omh < 1e-10) return ErrorEstimate::make_degenerate(EstimatorKind::LOO);
    const double e = residual[i] / omh;
    num += e * e;
  }
  return ErrorEstimate::make(num / denom0, EstimatorKind::LOO);
}

double modification_factor(int N, const Mat& Psi_active) {
  const Eigen::Index p = Psi_active.cols();
  if (p == 0) return 1.0;
  if (p >= N) return kInf;
  Mat gram = Psi_active.transpose() * Psi_active;
  Eigen::LDLT<Mat> ldlt(gram);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return kInf;
  const Mat inv = ldlt.solve(Mat::Identity(p, p));
  const double tr = inv.trace();
  if (!std::isfinite(tr) || tr < 0.0) return kInf;
  return static_cast<double>(N) / static_cast<double>(N - p) * (1.0 + tr);
}

ErrorEstimate modified_loo(const Mat& Psi_active, const Vec& y) {
  ErrorEstimate loo = loo_fast(Psi_active, y);
  if (loo.degenerate) return ErrorEstimate::make_degenerate(EstimatorKind::ModifiedLOO);
  const double t = modification_factor(static_cast<int>(y.size()), Psi_active);
  if (!std::isfinite(t)) return ErrorEstimate::make_degenerate(EstimatorKind::ModifiedLOO);
  return ErrorEstimate::make(t * loo.value, EstimatorKind::ModifiedLOO);
}

std::vector<int> kfold_assignment(const Mat& Psi, const Vec& y, int k, std::uint64_t seed) {
  const int n = static_cast<int>(y.size());
  // Canonical order: sort observation ids by (response, row content) so the
  // fold map is a function of the data, not of the row order supplied.
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (y[a] != y[b]) return y[a] < y[b];
    for (Eigen::Index j = 0; j < Psi.cols(); ++j)
      if (Psi(a, j) != Psi(b, j)) return Psi(a, j) < Psi(b, j);
    return false;
  });
  Rng rng(seed);
  rng.shuffle(order.begin(), order.end());

  std::vector<int> fold(static_cast<std::size_t>(n));
  const int base = n / k, extra = n % k;
  int pos = 0;
  for (int f = 0; f < k; ++f) {
    const int sz = base + (f < extra ? 1 : 0);
    for (int i = 0; i < sz; ++i) fold[static_cast<std::size_t>(order[static_cast<std::size_t>(pos++)])] = f;
  }
  return fold;
}

ErrorEstimate kfold_cv(const FitPredictFn& fit, const Mat& Psi, const Vec& y, int k,
                       std::uint64_t seed) {
  const int n = static_cast<int>(y.size());
  if (k < 2 || k > n) throw std::invalid_argument("kfold_cv: need 2 <= k <= N");
  const std::vector<int> fold = kfold_assignment(Psi, y, k, seed);

  Vec pooled(n);
  for (int f = 0; f < k; ++f) {
    std::vector<int> train, test;
    for (int i = 0; i < n; ++i) (fold[static_cast<std::size_t>(i)] == f ? test : train).push_back(i);
    Mat Psi_train(train.size(), Psi.cols()), Psi_test(test.size(), Psi.cols());
    Vec y_train(train.size());
    for (std::size_t i = 0; i < train.size(); ++i) {
      Psi_train.row(static_cast<Eigen::Index>(i)) = Psi.row(train[i]);
      y_train[static_cast<Eigen::Index>(i)] = y[train[i]];
    }
    for (std::size_t i = 0; i < test.size(); ++i)
      Psi_test.row(static_cast<Eigen::Index>(i)) = Psi.row(test[i]);
    Vec pred;
    try {
      pred = fit(Psi_train, y_train, Psi_test);
    } catch (const std::exception&) {
      return ErrorEstimate::make_degenerate(EstimatorKind::KFold, k);
    }
    if (pred.size() != static_cast<Eigen::Index>(test.size()) || !pred.allFinite())
      return ErrorEstimate::make_degenerate(EstimatorKind::KFold, k);
    for (std::size_t i = 0; i < test.size(); ++i) pooled[test[i]] = pred[static_cast<Eigen::Index>(i)];
  }
  ErrorEstimate e = rel_mse(pooled, y);
  return e.degenerate ? ErrorEstimate::make_degenerate(EstimatorKind::KFold, k)
                      : ErrorEstimate::make(e.value, EstimatorKind::KFold, k);
}

ErrorEstimate hybrid_estimate(EstimatorKind kind, const Mat& Psi_active, const Vec& y,
                              std::uint64_t seed, int k) {
  switch (kind) {
    case EstimatorKind::HybridLOO: {
      ErrorEstimate e = loo_fast(Psi_active, y);
      return e.degenerate ? ErrorEstimate::make_degenerate(kind)
                          : ErrorEstimate::make(e.value, kind);
    }
    case EstimatorKind::HybridModifiedLOO: {
      ErrorEstimate e = modified_loo(Psi_active, y);
      return e.degenerate ? ErrorEstimate::make_degenerate(kind)
                          : ErrorEstimate::make(e.value, kind);
    }
    case EstimatorKind::HybridKFold: {
      const int n = static_cast<int>(y.size());
      const int kk = std::min(k, n);
      if (kk < 2 || Psi_active.cols() == 0)
        return ErrorEstimate::make_degenerate(kind, kk);
      auto ols_fit = [](const Mat& Pt, const Vec& yt, const Mat& Pv) -> Vec {
        if (Pt.cols() >= Pt.rows()) throw std::runtime_error("underdetermined fold fit");
        Vec c = Pt.colPivHouseholderQr().solve(yt);
        return Pv * c;
      };
      ErrorEstimate e = kfold_cv(ols_fit, Psi_active, y, kk, seed);
      return e.degenerate ? ErrorEstimate::make_degenerate(kind, kk)
                          : ErrorEstimate::make(e.value, kind, kk);
    }
    default:
      throw std::invalid_argument("hybrid_estimate: kind must be a hybrid estimator");
  }
}

}  // namespace spce
