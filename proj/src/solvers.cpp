#include "spce/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "spce/rng.hpp"

namespace spce {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Mat take_columns(const Mat& Psi, const std::vector<int>& cols) {
  Mat sub(Psi.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) sub.col(static_cast<Eigen::Index>(i)) = Psi.col(cols[i]);
  return sub;
}

Vec scatter(const Vec& dense, const std::vector<int>& active, Eigen::Index p) {
  Vec full = Vec::Zero(p);
  for (std::size_t i = 0; i < active.size(); ++i) full[active[i]] = dense[static_cast<Eigen::Index>(i)];
  return full;
}

/// One QR pass giving coefficients, residual, hat diagonal, and the modified
/// LOO score; shared by the greedy solvers' per-iterate bookkeeping.
struct LsFit {
  Vec coef;
  Vec residual;
  double loo = kInf;
  double modloo = kInf;
  bool ok = false;
};

LsFit ls_fit_scored(const Mat& sub, const Vec& y) {
  LsFit fit;
  const Eigen::Index n = sub.rows(), p = sub.cols();
  if (p == 0 || p >= n) return fit;

  Eigen::HouseholderQR<Mat> qr(sub);
  const Mat& qrmat = qr.matrixQR();
  double dmax = 0.0, dmin = kInf;
  for (Eigen::Index j = 0; j < p; ++j) {
    const double dj = std::abs(qrmat(j, j));
    dmax = std::max(dmax, dj);
    dmin = std::min(dmin, dj);
  }
  if (!(dmin > dmax * 1e-12) || dmax == 0.0) return fit;

  fit.coef = qr.solve(y);
  Mat thinQ = qr.householderQ() * Mat::Identity(n, p);
  fit.residual = y - thinQ * (thinQ.transpose() * y);
  Vec h = thinQ.rowwise().squaredNorm();

  const double mean = y.mean();
  const double denom = (y.array() - mean).square().sum();
  if (!(denom > 0.0)) return fit;

  double num = 0.0;
  bool loo_ok = true;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double omh = 1.0 - h[i];
    if (omh < 1e-10) {
      loo_ok = false;
      break;
    }
    const double e = fit.residual[i] / omh;
    num += e * e;
  }
  fit.ok = true;
  if (!loo_ok) return fit;
  fit.loo = num / denom;

  // tr((Psi'Psi)^{-1}) = ||R^{-1}||_F^2 from the QR factor.
  Mat R = qrmat.topLeftCorner(p, p).template triangularView<Eigen::Upper>();
  Mat Rinv = R.triangularView<Eigen::Upper>().solve(Mat::Identity(p, p));
  const double tr = Rinv.squaredNorm();
  const double t = static_cast<double>(n) / static_cast<double>(n - p) * (1.0 + tr);
  fit.modloo = t * fit.loo;
  return fit;
}

/// Least squares for the subspace-pursuit inner loop: normal equations with
/// an LLT factorization, falling back to the pivoted-QR/SVD path when the
/// Gram matrix is not numerically positive definite.
Vec ls_fast(const Mat& sub, const Vec& y) {
  Mat gram = sub.transpose() * sub;
  Eigen::LLT<Mat> llt(gram);
  if (llt.info() == Eigen::Success) {
    Vec c = llt.solve(sub.transpose() * y);
    if (c.allFinite()) return c;
  }
  return ols(sub, y);
}

std::vector<int> top_k_by_magnitude(const Vec& values, int k) {
  std::vector<int> idx(static_cast<std::size_t>(values.size()));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    const double va = std::abs(values[a]), vb = std::abs(values[b]);
    if (va != vb) return va > vb;
    return a < b;
  });
  idx.resize(static_cast<std::size_t>(std::min<int>(k, static_cast<int>(values.size()))));
  std::sort(idx.begin(), idx.end());
  return idx;
}

/// Column scales for correlation ranking; zero columns get scale 0 so they
/// never win the argmax.
Vec column_scales(const Mat& Psi) {
  Vec inv(Psi.cols());
  for (Eigen::Index j = 0; j < Psi.cols(); ++j) {
    const double nrm = Psi.col(j).norm();
    inv[j] = nrm > 0.0 ? 1.0 / nrm : 0.0;
  }
  return inv;
}

int first_constant_column(const Mat& Psi) {
  for (Eigen::Index j = 0; j < Psi.cols(); ++j) {
    const double v0 = Psi(0, j);
    if (v0 == 0.0) continue;
    bool constant = true;
    for (Eigen::Index i = 1; i < Psi.rows() && constant; ++i) constant = Psi(i, j) == v0;
    if (constant) return static_cast<int>(j);
  }
  return -1;
}

}  // namespace

Vec ols(const Mat& Psi_active, const Vec& y) {
  if (Psi_active.cols() > Psi_active.rows())
    throw std::invalid_argument("ols: more columns than rows");
  if (Psi_active.rows() != y.size()) throw std::invalid_argument("ols: size mismatch");
  Eigen::ColPivHouseholderQR<Mat> qr(Psi_active);
  qr.setThreshold(1e-12);
  if (qr.rank() == Psi_active.cols()) return qr.solve(y);
  // Rank deficient: minimum-norm solution via SVD with relative cutoff.
  Eigen::BDCSVD<Mat> svd(Psi_active, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-12);
  return svd.solve(y);
}

SparseSolution omp(const Mat& Psi, const Vec& y) {
  const Eigen::Index n = Psi.rows(), p = Psi.cols();
  if (n < 2 || p < 1) throw std::invalid_argument("omp: need N >= 2, P >= 1");
  if (y.size() != n) throw std::invalid_argument("omp: size mismatch");

  SparseSolution sol;
  sol.solver_id = "omp";
  sol.criterion_kind = EstimatorKind::ModifiedLOO;
  sol.coefficients = Vec::Zero(p);

  if (y.norm() == 0.0) {
    const int c0 = first_constant_column(Psi);
    if (c0 >= 0) sol.active = {c0};
    sol.criterion_value = 0.0;
    return sol;
  }

  const Vec scales = column_scales(Psi);
  const int k_max = static_cast<int>(std::min<Eigen::Index>(n - 1, p));
  std::vector<int> active;
  std::vector<char> in_active(static_cast<std::size_t>(p), 0);
  Vec residual = y;

  double best_score = kInf;
  std::vector<int> best_active;
  Vec best_coef;
  bool have_fit = false;

  for (int step = 0; step < k_max; ++step) {
    Vec corr = (Psi.transpose() * residual).cwiseProduct(scales);
    int j_best = -1;
    double c_best = -1.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (in_active[static_cast<std::size_t>(j)]) continue;
      const double c = std::abs(corr[j]);
      if (c > c_best) {
        c_best = c;
        j_best = static_cast<int>(j);
      }
    }
    if (j_best < 0 || c_best <= 1e-14 * y.norm()) break;
    active.push_back(j_best);
    in_active[static_cast<std::size_t>(j_best)] = 1;

    LsFit fit = ls_fit_scored(take_columns(Psi, active), y);
    if (!fit.ok) break;
    residual = fit.residual;
    if (!have_fit || fit.modloo < best_score) {
      best_score = fit.modloo;
      best_active = active;
      best_coef = fit.coef;
      have_fit = true;
    }
    if (residual.norm() <= 1e-14 * y.norm()) break;
  }

  if (!have_fit) {
    sol.criterion_value = kInf;
    return sol;
  }
  std::vector<std::size_t> order(best_active.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return best_active[a] < best_active[b]; });
  std::vector<int> sorted_active;
  Vec sorted_coef(static_cast<Eigen::Index>(order.size()));
  for (std::size_t i = 0; i < order.size(); ++i) {
    sorted_active.push_back(best_active[order[i]]);
    sorted_coef[static_cast<Eigen::Index>(i)] = best_coef[static_cast<Eigen::Index>(order[i])];
  }
  sol.active = std::move(sorted_active);
  sol.coefficients = scatter(sorted_coef, sol.active, p);
  sol.criterion_value = best_score;
  sol.hyperparameter = static_cast<double>(sol.active.size());
  return sol;
}

SpResult subspace_pursuit(const Mat& Psi, const Vec& y, int K) {
  const Eigen::Index n = Psi.rows(), p = Psi.cols();
  const int k_cap = static_cast<int>(std::min<Eigen::Index>(n / 2, p));
  if (K < 1 || K > k_cap) throw std::invalid_argument("subspace_pursuit: K out of range");

  const Vec scales = column_scales(Psi);
  auto top_corr = [&](const Vec& r) {
    Vec corr = (Psi.transpose() * r).cwiseProduct(scales);
    return top_k_by_magnitude(corr, K);
  };

  std::vector<int> active = top_corr(y);
  Vec coef_active = ls_fast(take_columns(Psi, active), y);
  Vec residual = y - take_columns(Psi, active) * coef_active;
  double rnorm = residual.norm();

  for (int iter = 0; iter < 100 && rnorm > 1e-14 * std::max(1.0, y.norm()); ++iter) {
    std::vector<int> cand = active;
    for (int j : top_corr(residual))
      if (!std::binary_search(active.begin(), active.end(), j)) cand.push_back(j);
    std::sort(cand.begin(), cand.end());

    Mat sub = take_columns(Psi, cand);
    Vec b = ls_fast(sub, y);
    std::vector<int> keep = top_k_by_magnitude(b, K);
    std::vector<int> next;
    for (int i : keep) next.push_back(cand[static_cast<std::size_t>(i)]);
    std::sort(next.begin(), next.end());

    Mat sub_next = take_columns(Psi, next);
    Vec coef_next = ls_fast(sub_next, y);
    Vec res_next = y - sub_next * coef_next;
    const double rnorm_next = res_next.norm();
    if (rnorm_next >= rnorm) break;
    active = std::move(next);
    coef_active = std::move(coef_next);
    residual = std::move(res_next);
    rnorm = rnorm_next;
  }

  SpResult out;
  out.active = active;
  // Final coefficients by the orthogonal-factorization path.
  Vec refit = ols(take_columns(Psi, active), y);
  out.coefficients = scatter(refit, active, p);
  out.residual_norm = (y - take_columns(Psi, active) * refit).norm();
  return out;
}

namespace {

SparseSolution sp_sweep(const Mat& Psi, const Vec& y, bool use_kfold, int k, std::uint64_t seed) {
  const Eigen::Index n = Psi.rows(), p = Psi.cols();
  if (n < 2 || p < 1) throw std::invalid_argument("subspace pursuit: need N >= 2, P >= 1");
  const int k_max = static_cast<int>(std::min<Eigen::Index>(n / 2, p));
  if (k_max < 1) throw std::invalid_argument("subspace pursuit: design too small");

  SparseSolution sol;
  sol.solver_id = use_kfold ? "spk5" : "sploo";
  sol.criterion_kind = use_kfold ? EstimatorKind::KFold : EstimatorKind::ModifiedLOO;
  sol.criterion_k = use_kfold ? k : 0;
  sol.cv_seed = use_kfold ? seed : 0;
  sol.coefficients = Vec::Zero(p);

  if (y.norm() == 0.0) {
    const int c0 = first_constant_column(Psi);
    if (c0 >= 0) sol.active = {c0};
    sol.criterion_value = 0.0;
    return sol;
  }

  double best_score = kInf;
  int best_k = -1;
  std::vector<int> best_active;
  Vec best_coef;

  for (int K = 1; K <= k_max; ++K) {
    SpResult sp = subspace_pursuit(Psi, y, K);
    double score = kInf;
    if (use_kfold) {
      auto fit = [K](const Mat& Pt, const Vec& yt, const Mat& Pv) -> Vec {
        // Clamp so the fold fit satisfies the SP precondition on its own N.
        const int kf = std::max(
            1, std::min<int>(K, static_cast<int>(std::min<Eigen::Index>(Pt.rows() / 2, Pt.cols()))));
        SpResult r = subspace_pursuit(Pt, yt, kf);
        return Pv * r.coefficients;
      };
      ErrorEstimate e = kfold_cv(fit, Psi, y, std::min<int>(k, static_cast<int>(n)), seed);
      score = e.value;
    } else {
      LsFit fit = ls_fit_scored(take_columns(Psi, sp.active), y);
      score = fit.modloo;
    }
    if (score < best_score) {
      best_score = score;
      best_k = K;
      best_active = sp.active;
      best_coef = Vec(sp.coefficients);
    }
  }

  if (best_k < 0) {
    // Every sweep entry degenerate; fall back to K = 1.
    SpResult sp = subspace_pursuit(Psi, y, 1);
    best_active = sp.active;
    best_coef = sp.coefficients;
    best_k = 1;
    best_score = kInf;
  }
  sol.active = std::move(best_active);
  sol.coefficients = best_coef.size() == p ? best_coef : scatter(best_coef, sol.active, p);
  sol.criterion_value = best_score;
  sol.hyperparameter = static_cast<double>(best_k);
  return sol;
}

}  // namespace

SparseSolution sp_select_loo(const Mat& Psi, const Vec& y) {
  return sp_sweep(Psi, y, false, 0, 0);
}

SparseSolution sp_select_kfold(const Mat& Psi, const Vec& y, int k, std::uint64_t seed) {
  return sp_sweep(Psi, y, true, k, seed);
}

// ---------------------------------------------------------------------------
// Fast sequential sparse Bayesian learning with a Laplace prior.
// ---------------------------------------------------------------------------

namespace {

struct BcsState {
  std::vector<int> active;
  Vec alpha;   // precisions of active weights
  Mat sigma;   // posterior covariance on the active set
  Vec mu;      // posterior mean on the active set
  Vec S, Q;    // sparsity / quality factors for every candidate column
};

void bcs_recompute(const Mat& Psi, const Vec& y, double beta, BcsState& st) {
  const Eigen::Index a = static_cast<Eigen::Index>(st.active.size());
  const Eigen::Index p = Psi.cols();
  if (a == 0) {
    st.sigma.resize(0, 0);
    st.mu.resize(0);
    st.S = beta * Psi.colwise().squaredNorm().transpose();
    st.Q = beta * (Psi.transpose() * y);
    return;
  }
  Mat Phi = take_columns(Psi, st.active);
  Mat B = beta * (Phi.transpose() * Phi);
  B.diagonal() += st.alpha;
  Eigen::LLT<Mat> llt(B);
  st.sigma = llt.solve(Mat::Identity(a, a));
  st.mu = beta * (st.sigma * (Phi.transpose() * y));
  Mat W = Psi.transpose() * Phi;               // P x a
  Mat L = llt.matrixL();
  Mat V = L.triangularView<Eigen::Lower>().solve(W.transpose());  // a x P
  st.S = beta * Psi.colwise().squaredNorm().transpose() -
         beta * beta * V.colwise().squaredNorm().transpose();
  st.Q = beta * (Psi.transpose() * (y - Phi * st.mu));
  (void)p;
}

double bcs_single_loglik(double s, double q, double gamma, double lambda) {
  if (gamma <= 0.0) return 0.0;
  const double den = 1.0 + gamma * s;
  return 0.5 * (-std::log(den) + q * q * gamma / den) - 0.5 * lambda * gamma;
}

/// Stationary point of the per-basis marginal likelihood with exponential
/// hyperprior rate lambda; 0 when the basis should be excluded.
double bcs_gamma_hat(double s, double q, double lambda) {
  if (!(s > 0.0)) return 0.0;
  const double theta = q * q - s;
  if (theta <= lambda) return 0.0;
  if (lambda <= 0.0) return theta / (s * s);
  const double u = (-s + std::sqrt(s * s + 4.0 * lambda * q * q)) / (2.0 * lambda);
  return (u - 1.0) / s;
}

std::vector<int> bcs_run(const Mat& Psi, const Vec& y, double sigma2) {
  const Eigen::Index n = Psi.rows(), p = Psi.cols();
  const double beta = 1.0 / sigma2;
  const int cap = static_cast<int>(std::min<Eigen::Index>(n - 1, p));

  BcsState st;
  bcs_recompute(Psi, y, beta, st);
  Vec phi2 = Psi.colwise().squaredNorm().transpose();

  double lambda = 0.0;
  double lcum = 0.0;
  const int max_iter = 1000;
  int since_recompute = 0;

  for (int iter = 0; iter < max_iter; ++iter) {
    // Position of each column inside the active set, -1 if excluded.
    std::vector<int> pos(static_cast<std::size_t>(p), -1);
    for (std::size_t i = 0; i < st.active.size(); ++i) pos[static_cast<std::size_t>(st.active[i])] = static_cast<int>(i);

    int best_j = -1;
    double best_dl = 0.0;
    double best_gamma = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (phi2[j] <= 0.0) continue;
      double s, q;
      const int aj = pos[static_cast<std::size_t>(j)];
      if (aj >= 0) {
        const double alpha_j = st.alpha[aj];
        const double den = alpha_j - st.S[j];
        if (std::abs(den) < 1e-300) continue;
        s = alpha_j * st.S[j] / den;
        q = alpha_j * st.Q[j] / den;
      } else {
        s = st.S[j];
        q = st.Q[j];
      }
      const double ghat = bcs_gamma_hat(s, q, lambda);
      double dl;
      if (aj < 0) {
        if (ghat <= 0.0 || static_cast<int>(st.active.size()) >= cap) continue;
        dl = bcs_single_loglik(s, q, ghat, lambda);
      } else {
        const double gcur = 1.0 / st.alpha[aj];
        if (ghat > 0.0)
          dl = bcs_single_loglik(s, q, ghat, lambda) - bcs_single_loglik(s, q, gcur, lambda);
        else
          dl = -bcs_single_loglik(s, q, gcur, lambda);
      }
      if (std::isfinite(dl) && dl > best_dl) {
        best_dl = dl;
        best_j = static_cast<int>(j);
        best_gamma = ghat;
      }
    }

    if (best_j < 0 || best_dl <= 1e-10 * std::max(1.0, std::abs(lcum))) break;
    lcum += best_dl;

    const int aj = pos[static_cast<std::size_t>(best_j)];
    const Eigen::Index a = static_cast<Eigen::Index>(st.active.size());

    if (aj < 0) {
      // Add best_j with precision 1/best_gamma.
      const double alpha_new = 1.0 / best_gamma;
      const double sjj = st.S[best_j], qjj = st.Q[best_j];
      const double sigma_ii = 1.0 / (alpha_new + sjj);
      const double mu_i = sigma_ii * qjj;

      Vec psi_j = Psi.col(best_j);
      Vec e_vec;
      if (a > 0) {
        Mat Phi = take_columns(Psi, st.active);
        Vec v = beta * (st.sigma * (Phi.transpose() * psi_j));
        Vec z = psi_j - Phi * v;
        e_vec = beta * (Psi.transpose() * z);
        Mat sigma_new(a + 1, a + 1);
        sigma_new.topLeftCorner(a, a) = st.sigma + sigma_ii * v * v.transpose();
        sigma_new.topRightCorner(a, 1) = -sigma_ii * v;
        sigma_new.bottomLeftCorner(1, a) = (-sigma_ii * v).transpose();
        sigma_new(a, a) = sigma_ii;
        Vec mu_new(a + 1);
        mu_new.head(a) = st.mu - mu_i * v;
        mu_new(a) = mu_i;
        st.sigma = std::move(sigma_new);
        st.mu = std::move(mu_new);
      } else {
        e_vec = beta * (Psi.transpose() * psi_j);
        st.sigma = Mat::Constant(1, 1, sigma_ii);
        st.mu = Vec::Constant(1, mu_i);
      }
      st.S -= sigma_ii * e_vec.cwiseProduct(e_vec);
      st.Q -= mu_i * e_vec;
      st.active.push_back(best_j);
      Vec alpha_grown(a + 1);
      alpha_grown.head(a) = st.alpha;
      alpha_grown(a) = alpha_new;
      st.alpha = std::move(alpha_grown);
    } else if (best_gamma > 0.0) {
      // Re-estimate the precision of an active basis.
      const double alpha_new = 1.0 / best_gamma;
      const double alpha_old = st.alpha[aj];
      const double delta = alpha_new - alpha_old;
      const double sjj = st.sigma(aj, aj);
      const double denom_k = 1.0 + delta * sjj;
      if (std::abs(denom_k) < 1e-12) {
        st.alpha[aj] = alpha_new;
        bcs_recompute(Psi, y, beta, st);
        since_recompute = 0;
        continue;
      }
      const double kappa = delta / denom_k;
      Vec sigma_col = st.sigma.col(aj);
      const double mu_j = st.mu[aj];
      Mat Phi = take_columns(Psi, st.active);
      Vec z = Phi * sigma_col;
      Vec e_vec = beta * (Psi.transpose() * z);
      st.sigma -= kappa * sigma_col * sigma_col.transpose();
      st.mu -= kappa * mu_j * sigma_col;
      st.S += kappa * e_vec.cwiseProduct(e_vec);
      st.Q += kappa * mu_j * e_vec;
      st.alpha[aj] = alpha_new;
    } else {
      // Delete an active basis.
      const double sjj = st.sigma(aj, aj);
      Vec sigma_col = st.sigma.col(aj);
      const double mu_j = st.mu[aj];
      Mat Phi = take_columns(Psi, st.active);
      Vec z = Phi * sigma_col;
      Vec e_vec = beta * (Psi.transpose() * z);
      st.S += e_vec.cwiseProduct(e_vec) / sjj;
      st.Q += (mu_j / sjj) * e_vec;
      st.sigma -= (sigma_col * sigma_col.transpose()) / sjj;
      st.mu -= (mu_j / sjj) * sigma_col;

      const Eigen::Index last = a - 1;
      std::vector<int> keep;
      for (Eigen::Index i = 0; i < a; ++i)
        if (i != aj) keep.push_back(static_cast<int>(i));
      Mat sigma_new(last, last);
      Vec mu_new(last), alpha_new_v(last);
      for (Eigen::Index r = 0; r < last; ++r) {
        mu_new[r] = st.mu[keep[static_cast<std::size_t>(r)]];
        alpha_new_v[r] = st.alpha[keep[static_cast<std::size_t>(r)]];
        for (Eigen::Index c = 0; c < last; ++c)
          sigma_new(r, c) = st.sigma(keep[static_cast<std::size_t>(r)], keep[static_cast<std::size_t>(c)]);
      }
      st.sigma = std::move(sigma_new);
      st.mu = std::move(mu_new);
      st.alpha = std::move(alpha_new_v);
      st.active.erase(st.active.begin() + aj);
    }

    // Exponential hyperprior rate, re-estimated from the current model.
    const double gamma_sum = (st.alpha.size() > 0) ? (1.0 / st.alpha.array()).sum() : 0.0;
    lambda = (st.active.size() > 1 && gamma_sum > 0.0)
                 ? 2.0 * (static_cast<double>(st.active.size()) - 1.0) / gamma_sum
                 : 0.0;

    // Periodic full recompute keeps the incremental S/Q factors from drifting.
    if (++since_recompute >= 50) {
      bcs_recompute(Psi, y, beta, st);
      since_recompute = 0;
    }
  }

  std::vector<int> a_sorted = st.active;
  std::sort(a_sorted.begin(), a_sorted.end());
  return a_sorted;
}

}  // namespace

std::vector<int> bcs_active_set(const Mat& Psi, const Vec& y, double sigma2) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("bcs_active_set: sigma2 must be positive");
  return bcs_run(Psi, y, sigma2);
}

SparseSolution bcs(const Mat& Psi, const Vec& y, std::uint64_t seed) {
  const Eigen::Index n = Psi.rows(), p = Psi.cols();
  if (n < 2 || p < 1) throw std::invalid_argument("bcs: need N >= 2, P >= 1");
  if (y.size() != n) throw std::invalid_argument("bcs: size mismatch");

  SparseSolution sol;
  sol.solver_id = "bcs";
  sol.criterion_kind = EstimatorKind::KFold;
  sol.cv_seed = seed;
  sol.coefficients = Vec::Zero(p);

  const double var_y = (y.array() - y.mean()).square().sum() / static_cast<double>(n);
  const int k = std::min<int>(10, static_cast<int>(n));
  sol.criterion_k = k;

  if (!(var_y > 0.0)) {
    const int c0 = first_constant_column(Psi);
    if (c0 >= 0) {
      sol.active = {c0};
      Vec refit = ols(take_columns(Psi, sol.active), y);
      sol.coefficients = scatter(refit, sol.active, p);
    }
    sol.criterion_value = 0.0;
    return sol;
  }

  std::vector<double> etas;
  for (int i = 0; i < 7; ++i) etas.push_back(std::pow(10.0, -8.0 + 7.0 * i / 6.0));

  auto fit_for_eta = [&](double eta) {
    return [eta](const Mat& Pt, const Vec& yt, const Mat& Pv) -> Vec {
      const double vt =
          (yt.array() - yt.mean()).square().sum() / static_cast<double>(yt.size());
      if (!(vt > 0.0)) return Vec::Constant(Pv.rows(), yt.mean());
      std::vector<int> act = bcs_run(Pt, yt, eta * vt);
      if (act.empty()) return Vec::Zero(Pv.rows());
      Vec c = ols(take_columns(Pt, act), yt);
      return take_columns(Pv, act) * c;
    };
  };

  double best_score = kInf;
  double best_eta = etas.front();
  for (double eta : etas) {
    ErrorEstimate e = kfold_cv(fit_for_eta(eta), Psi, y, k, seed);
    if (e.value < best_score) {
      best_score = e.value;
      best_eta = eta;
    }
  }

  std::vector<int> act = bcs_run(Psi, y, best_eta * var_y);
  if (!act.empty()) {
    Vec refit = ols(take_columns(Psi, act), y);
    sol.coefficients = scatter(refit, act, p);
  }
  sol.active = std::move(act);
  sol.criterion_value = best_score;
  sol.hyperparameter = best_eta;
  return sol;
}

// ---------------------------------------------------------------------------
// Hybrid least angle regression.
// ---------------------------------------------------------------------------

SparseSolution hybrid_lars(const Mat& Psi, const Vec& y) {
  const Eigen::Index n = Psi.rows(), p = Psi.cols();
  if (n < 2 || p < 1) throw std::invalid_argument("hybrid_lars: need N >= 2, P >= 1");
  if (y.size() != n) throw std::invalid_argument("hybrid_lars: size mismatch");

  SparseSolution sol;
  sol.solver_id = "lars";
  sol.criterion_kind = EstimatorKind::ModifiedLOO;
  sol.coefficients = Vec::Zero(p);

  if (y.norm() == 0.0) {
    const int c0 = first_constant_column(Psi);
    if (c0 >= 0) sol.active = {c0};
    sol.criterion_value = 0.0;
    return sol;
  }

  // Path runs on unit-norm columns; coefficients below always come from OLS
  // refits on the original columns.
  Mat Xn = Psi;
  std::vector<char> excluded(static_cast<std::size_t>(p), 0);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double nrm = Xn.col(j).norm();
    if (nrm > 0.0)
      Xn.col(j) /= nrm;
    else
      excluded[static_cast<std::size_t>(j)] = 1;
  }

  const int k_max = static_cast<int>(std::min<Eigen::Index>(n - 1, p));
  std::vector<int> active;
  Mat chol_l(k_max, k_max);  // lower Cholesky factor of the active Gram
  Vec mu = Vec::Zero(n);
  const double corr_tol = 1e-12 * y.norm();

  double best_score = kInf;
  std::vector<int> best_active;
  Vec best_coef;
  bool have_fit = false;

  while (static_cast<int>(active.size()) < k_max) {
    Vec c = Xn.transpose() * (y - mu);
    int j_next = -1;
    double c_max = -1.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (excluded[static_cast<std::size_t>(j)]) continue;
      if (std::find(active.begin(), active.end(), static_cast<int>(j)) != active.end()) continue;
      const double a = std::abs(c[j]);
      if (a > c_max) {
        c_max = a;
        j_next = static_cast<int>(j);
      }
    }
    if (j_next < 0 || c_max <= corr_tol) break;

    // Cholesky append; a column collinear with the active set is dropped
    // from the path and the next-best entrant is tried.
    const Eigen::Index a_sz = static_cast<Eigen::Index>(active.size());
    Vec g(a_sz);
    for (Eigen::Index i = 0; i < a_sz; ++i) g[i] = Xn.col(active[static_cast<std::size_t>(i)]).dot(Xn.col(j_next));
    Vec w = chol_l.topLeftCorner(a_sz, a_sz).triangularView<Eigen::Lower>().solve(g);
    const double d2 = 1.0 - w.squaredNorm();
    if (d2 <= 1e-10) {
      excluded[static_cast<std::size_t>(j_next)] = 1;
      continue;
    }
    chol_l.block(a_sz, 0, 1, a_sz) = w.transpose();
    chol_l(a_sz, a_sz) = std::sqrt(d2);
    active.push_back(j_next);
    const Eigen::Index m = a_sz + 1;

    // Equiangular direction.
    Vec s(m);
    for (Eigen::Index i = 0; i < m; ++i) s[i] = c[active[static_cast<std::size_t>(i)]] >= 0.0 ? 1.0 : -1.0;
    auto lview = chol_l.topLeftCorner(m, m).triangularView<Eigen::Lower>();
    Vec tmp = lview.solve(s);
    Vec wtilde = lview.transpose().solve(tmp);
    const double denom = s.dot(wtilde);
    if (!(denom > 0.0)) break;
    const double a_a = 1.0 / std::sqrt(denom);
    Vec w_eq = a_a * wtilde;
    Vec u = Vec::Zero(n);
    for (Eigen::Index i = 0; i < m; ++i) u += w_eq[i] * Xn.col(active[static_cast<std::size_t>(i)]);

    const double c_hat = std::abs(c[active.back()]);
    double gamma = c_hat / a_a;  // full step (only / last resort)
    if (static_cast<int>(active.size()) < k_max) {
      Vec a_corr = Xn.transpose() * u;
      for (Eigen::Index j = 0; j < p; ++j) {
        if (excluded[static_cast<std::size_t>(j)]) continue;
        if (std::find(active.begin(), active.end(), static_cast<int>(j)) != active.end()) continue;
        const double cj = c[j], aj = a_corr[j];
        const double cand1 = (c_hat - cj) / (a_a - aj);
        const double cand2 = (c_hat + cj) / (a_a + aj);
        if (cand1 > 1e-14 && cand1 < gamma) gamma = cand1;
        if (cand2 > 1e-14 && cand2 < gamma) gamma = cand2;
      }
    }
    mu += gamma * u;

    LsFit fit = ls_fit_scored(take_columns(Psi, active), y);
    if (fit.ok && fit.modloo < best_score) {
      best_score = fit.modloo;
      best_active = active;
      best_coef = fit.coef;
      have_fit = true;
    }
  }

  if (!have_fit) {
    sol.criterion_value = kInf;
    if (!active.empty()) {
      sol.active = active;
      std::sort(sol.active.begin(), sol.active.end());
    }
    return sol;
  }
  std::vector<std::size_t> order(best_active.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return best_active[a] < best_active[b]; });
  std::vector<int> sorted_active;
  Vec sorted_coef(static_cast<Eigen::Index>(order.size()));
  for (std::size_t i = 0; i < order.size(); ++i) {
    sorted_active.push_back(best_active[order[i]]);
    sorted_coef[static_cast<Eigen::Index>(i)] = best_coef[static_cast<Eigen::Index>(order[i])];
  }
  sol.active = std::move(sorted_active);
  sol.coefficients = scatter(sorted_coef, sol.active, p);
  sol.criterion_value = best_score;
  sol.hyperparameter = static_cast<double>(sol.active.size());
  return sol;
}

const std::vector<std::string>& solver_ids() {
  static const std::vector<std::string> ids = {"lars", "omp", "spk5", "sploo", "bcs"};
  return ids;
}

SolverFn solver_by_id(const std::string& id, std::uint64_t seed) {
  if (id == "lars") return [](const Mat& a, const Vec& b) { return hybrid_lars(a, b); };
  if (id == "omp") return [](const Mat& a, const Vec& b) { return omp(a, b); };
  if (id == "spk5")
    return [seed](const Mat& a, const Vec& b) { return sp_select_kfold(a, b, 5, seed); };
  if (id == "sploo") return [](const Mat& a, const Vec& b) { return sp_select_loo(a, b); };
  if (id == "bcs") return [seed](const Mat& a, const Vec& b) { return bcs(a, b, seed); };
  throw std::invalid_argument("unknown solver id: " + id);
}

}  // namespace spce
