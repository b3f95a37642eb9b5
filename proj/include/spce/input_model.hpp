#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace spce {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Standard normal CDF, accurate to machine precision via erfc.
double normal_cdf(double x);

/// Inverse standard normal CDF: rational approximation (Acklam) polished by
/// one Halley step against normal_cdf, so that inv_normal_cdf(normal_cdf(u))
/// round-trips to ~1e-15 over |u| <= 8.
double inv_normal_cdf(double p);

enum class MarginalFamily { Uniform, Gaussian, Lognormal, Gumbel };

std::string family_name(MarginalFamily f);

/// One input marginal in physical units. Parameter meaning by family:
///   Uniform:   p1 = a, p2 = b (support [a,b])
///   Gaussian:  p1 = mu, p2 = sigma
///   Lognormal: p1 = mu_ln, p2 = sigma_ln (of the underlying normal)
///   Gumbel:    p1 = mu_g (location), p2 = beta (scale)
struct Marginal {
  MarginalFamily family = MarginalFamily::Uniform;
  double p1 = 0.0;
  double p2 = 1.0;

  static Marginal uniform(double a, double b) { return {MarginalFamily::Uniform, a, b}; }
  static Marginal gaussian(double mu, double sigma) { return {MarginalFamily::Gaussian, mu, sigma}; }
  static Marginal lognormal(double mu_ln, double sigma_ln) {
    return {MarginalFamily::Lognormal, mu_ln, sigma_ln};
  }
  static Marginal gumbel(double mu_g, double beta) { return {MarginalFamily::Gumbel, mu_g, beta}; }

  /// Lognormal with given mean and coefficient of variation of the physical
  /// variable; convenience for benchmark model definitions.
  static Marginal lognormal_mean_cov(double mean, double cov);

  void validate() const;  // throws std::invalid_argument
  bool in_support(double x) const;

  nlohmann::json to_json() const;
  static Marginal from_json(const nlohmann::json& j);
};

/// Random input vector with mutually independent marginals and the bijection
/// between physical space and the standardized space where the orthonormal
/// polynomial families live. Uniform marginals standardize to [-1,1]
/// (Legendre); Gaussian, Lognormal and Gumbel standardize to the standard
/// normal (Hermite). Immutable after construction.
class InputModel {
 public:
  InputModel() = default;
  explicit InputModel(std::vector<Marginal> marginals);

  int dim() const { return static_cast<int>(marginals_.size()); }
  const Marginal& marginal(int i) const { return marginals_[static_cast<std::size_t>(i)]; }
  const std::vector<Marginal>& marginals() const { return marginals_; }

  double to_standard(int i, double x) const;
  double from_standard(int i, double u) const;

  Vec to_standard(const Vec& x) const;
  Vec from_standard(const Vec& u) const;

  /// Row-wise point transforms.
  Mat to_standard(const Mat& X) const;
  Mat from_standard(const Mat& U) const;

  /// Maps a uniform(0,1) variate directly to the standardized space of
  /// coordinate i (affine for uniform marginals, inverse normal CDF
  /// otherwise). This is the sampling path: it avoids the physical-space
  /// detour and its rounding.
  double standard_from_uniform01(int i, double v) const;

  nlohmann::json to_json() const;
  static InputModel from_json(const nlohmann::json& j);

 private:
  std::vector<Marginal> marginals_;
};

}  // namespace spce
