#include "spce/poly_basis.hpp"

#include <cmath>
#include <stdexcept>

namespace spce {

std::vector<BasisFamily> families_for(const InputModel& model) {
  std::vector<BasisFamily> fams(static_cast<std::size_t>(model.dim()));
  for (int i = 0; i < model.dim(); ++i)
    fams[static_cast<std::size_t>(i)] = model.marginal(i).family == MarginalFamily::Uniform
                                            ? BasisFamily::Legendre
                                            : BasisFamily::Hermite;
  return fams;
}

void eval_univariate_all(BasisFamily family, int kmax, double u, double* out) {
  out[0] = 1.0;
  if (kmax == 0) return;
  if (family == BasisFamily::Legendre) {
    // psi_k = sqrt(2k+1) P_k with (k+1) P_{k+1} = (2k+1) u P_k - k P_{k-1}.
    out[1] = std::sqrt(3.0) * u;
    for (int k = 1; k < kmax; ++k) {
      const double dk = static_cast<double>(k);
      out[k + 1] = std::sqrt(2.0 * dk + 3.0) / (dk + 1.0) *
                   (std::sqrt(2.0 * dk + 1.0) * u * out[k] - dk / std::sqrt(2.0 * dk - 1.0) * out[k - 1]);
    }
  } else {
    // psi_k = He_k / sqrt(k!) with He_{k+1} = u He_k - k He_{k-1}.
    out[1] = u;
    for (int k = 1; k < kmax; ++k) {
      const double dk = static_cast<double>(k);
      out[k + 1] = (u * out[k] - std::sqrt(dk) * out[k - 1]) / std::sqrt(dk + 1.0);
    }
  }
}

double eval_univariate(BasisFamily family, int k, double u) {
  if (k < 0) throw std::invalid_argument("eval_univariate: negative degree");
  std::vector<double> buf(static_cast<std::size_t>(k) + 1);
  eval_univariate_all(family, k, u, buf.data());
  return buf[static_cast<std::size_t>(k)];
}

double eval_multivariate(const std::vector<BasisFamily>& families, const MultiIndex& alpha,
                         const Vec& u) {
  if (families.size() != alpha.size() || u.size() != static_cast<Eigen::Index>(alpha.size()))
    throw std::invalid_argument("eval_multivariate: dimension mismatch");
  double v = 1.0;
  for (std::size_t i = 0; i < alpha.size(); ++i)
    if (alpha[i] > 0) v *= eval_univariate(families[i], alpha[i], u[static_cast<Eigen::Index>(i)]);
  return v;
}

namespace {

Mat build_matrix_impl(const MultiIndexSet& set, const std::vector<BasisFamily>& families,
                      const Mat& U, const std::vector<MultiIndex>& cols_alpha) {
  const int d = set.dim();
  if (static_cast<int>(families.size()) != d || U.cols() != d)
    throw std::invalid_argument("build_regression_matrix: dimension mismatch");
  if (cols_alpha.empty()) throw std::invalid_argument("build_regression_matrix: empty basis");

  std::vector<int> maxdeg(static_cast<std::size_t>(d), 0);
  for (const auto& a : cols_alpha)
    for (int i = 0; i < d; ++i)
      maxdeg[static_cast<std::size_t>(i)] = std::max(maxdeg[static_cast<std::size_t>(i)], a[static_cast<std::size_t>(i)]);

  const Eigen::Index n = U.rows();
  const Eigen::Index p = static_cast<Eigen::Index>(cols_alpha.size());
  Mat Psi(n, p);

  std::vector<std::vector<double>> uni(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) uni[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(maxdeg[static_cast<std::size_t>(i)]) + 1);

  for (Eigen::Index r = 0; r < n; ++r) {
    for (int i = 0; i < d; ++i)
      eval_univariate_all(families[static_cast<std::size_t>(i)], maxdeg[static_cast<std::size_t>(i)],
                          U(r, i), uni[static_cast<std::size_t>(i)].data());
    for (Eigen::Index j = 0; j < p; ++j) {
      const MultiIndex& a = cols_alpha[static_cast<std::size_t>(j)];
      double v = 1.0;
      for (int i = 0; i < d; ++i) {
        const int deg = a[static_cast<std::size_t>(i)];
        if (deg > 0) v *= uni[static_cast<std::size_t>(i)][static_cast<std::size_t>(deg)];
      }
      Psi(r, j) = v;
      if (!std::isfinite(v))
        throw std::runtime_error("build_regression_matrix: non-finite value at row " +
                                 std::to_string(r) + ", column " + std::to_string(j));
    }
  }
  return Psi;
}

}  // namespace

Mat build_regression_matrix(const MultiIndexSet& set, const std::vector<BasisFamily>& families,
                            const Mat& U) {
  return build_matrix_impl(set, families, U, set.indices());
}

Mat build_regression_matrix_cols(const MultiIndexSet& set,
                                 const std::vector<BasisFamily>& families, const Mat& U,
                                 const std::vector<int>& cols) {
  std::vector<MultiIndex> alphas;
  alphas.reserve(cols.size());
  for (int c : cols) alphas.push_back(set[c]);
  return build_matrix_impl(set, families, U, alphas);
}

}  // namespace spce
