#include "spce/sampling.hpp"

#include <cstring>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace spce {

namespace {

std::uint64_t fnv1a(const void* data, std::size_t bytes, std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

double min_pairwise_distance(const Mat& P) {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < P.rows(); ++i)
    for (Eigen::Index j = i + 1; j < P.rows(); ++j)
      best = std::min(best, (P.row(i) - P.row(j)).squaredNorm());
  return std::sqrt(best);
}

Mat lhs_candidate(int n, int d, Rng& rng) {
  Mat P(n, d);
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int j = 0; j < d; ++j) {
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm.begin(), perm.end());
    for (int i = 0; i < n; ++i)
      P(i, j) = (static_cast<double>(perm[static_cast<std::size_t>(i)]) + rng.uniform01()) /
                static_cast<double>(n);
  }
  return P;
}

Design from_unit(const Mat& V, const InputModel& model, std::uint64_t seed, DesignKind kind) {
  const int n = static_cast<int>(V.rows());
  const int d = model.dim();
  Design des;
  des.seed = seed;
  des.kind = kind;
  des.U.resize(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) des.U(i, j) = model.standard_from_uniform01(j, V(i, j));
  des.X = model.from_standard(des.U);
  return des;
}

}  // namespace

std::uint64_t Design::fingerprint() const {
  std::uint64_t h = 1469598103934665603ULL;
  const std::int64_t shape[2] = {U.rows(), U.cols()};
  h = fnv1a(shape, sizeof(shape), h);
  h = fnv1a(U.data(), sizeof(double) * static_cast<std::size_t>(U.size()), h);
  if (has_y) h = fnv1a(y.data(), sizeof(double) * static_cast<std::size_t>(y.size()), h);
  return h;
}

Mat lhs_maximin_unit(int n, int d, std::uint64_t seed, int n_restarts, double* min_dist_out) {
  if (n < 2 || d < 1 || n_restarts < 1)
    throw std::invalid_argument("lhs_maximin: need n >= 2, d >= 1, n_restarts >= 1");
  Rng rng(seed);
  Mat best;
  double best_dist = -1.0;
  for (int r = 0; r < n_restarts; ++r) {
    Mat cand = lhs_candidate(n, d, rng);
    const double dist = min_pairwise_distance(cand);
    if (dist > best_dist) {
      best_dist = dist;
      best = std::move(cand);
    }
  }
  if (min_dist_out) *min_dist_out = best_dist;
  return best;
}

Design lhs_maximin(int n, const InputModel& model, std::uint64_t seed, int n_restarts) {
  Mat V = lhs_maximin_unit(n, model.dim(), seed, n_restarts);
  return from_unit(V, model, seed, DesignKind::LhsMaximin);
}

Design iid_sample(int n, const InputModel& model, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("iid_sample: need n >= 1");
  Rng rng(seed);
  Mat V(n, model.dim());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < model.dim(); ++j) V(i, j) = rng.uniform01();
  return from_unit(V, model, seed, DesignKind::Iid);
}

}  // namespace spce
