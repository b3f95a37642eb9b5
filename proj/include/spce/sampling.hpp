#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "spce/input_model.hpp"
#include "spce/rng.hpp"

namespace spce {

enum class DesignKind { LhsMaximin, Iid };

/// Experimental design: standardized points U, physical points X (related by
/// the input-model transform), and model responses y once evaluated.
struct Design {
  Mat U;
  Mat X;
  Vec y;
  bool has_y = false;
  std::uint64_t seed = 0;
  DesignKind kind = DesignKind::Iid;

  int n() const { return static_cast<int>(U.rows()); }
  int dim() const { return static_cast<int>(U.cols()); }

  /// FNV-1a over the standardized points (and responses when present);
  /// identifies "same ED" across surrogates and records.
  std::uint64_t fingerprint() const;
};

/// Latin hypercube sample in the unit hypercube: each column has exactly one
/// point per stratum [(k-1)/n, k/n), jittered uniformly within the stratum.
/// Among n_restarts independent candidates, returns the one with the largest
/// minimal pairwise distance. min_dist_out (optional) receives that distance.
Mat lhs_maximin_unit(int n, int d, std::uint64_t seed, int n_restarts, double* min_dist_out = nullptr);

/// LHS-maximin design transformed through the input model.
Design lhs_maximin(int n, const InputModel& model, std::uint64_t seed, int n_restarts = 50);

/// i.i.d. sample of the input model by inverse-CDF sampling.
Design iid_sample(int n, const InputModel& model, std::uint64_t seed);

}  // namespace spce
