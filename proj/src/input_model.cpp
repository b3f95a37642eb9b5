#include "spce/input_model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace spce {

double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

namespace {

// Acklam's rational approximation, |error| < 1.15e-9 on (0,1).
double inv_normal_cdf_acklam(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  if (p < plow) {
    double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - plow) {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  double q = p - 0.5;
  double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }

}  // namespace

double inv_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw std::domain_error("inv_normal_cdf: p outside [0,1]");
  }
  double x = inv_normal_cdf_acklam(p);
  // One Halley step against the exact CDF.
  double e = normal_cdf(x) - p;
  double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
  x = x - u / (1.0 + 0.5 * x * u);
  return x;
}

std::string family_name(MarginalFamily f) {
  switch (f) {
    case MarginalFamily::Uniform: return "uniform";
    case MarginalFamily::Gaussian: return "gaussian";
    case MarginalFamily::Lognormal: return "lognormal";
    case MarginalFamily::Gumbel: return "gumbel";
  }
  return "?";
}

Marginal Marginal::lognormal_mean_cov(double mean, double cov) {
  if (!(mean > 0.0) || !(cov > 0.0))
    throw std::invalid_argument("lognormal_mean_cov: mean and cov must be positive");
  double s2 = std::log(1.0 + cov * cov);
  return lognormal(std::log(mean) - 0.5 * s2, std::sqrt(s2));
}

void Marginal::validate() const {
  switch (family) {
    case MarginalFamily::Uniform:
      if (!(p2 > p1)) throw std::invalid_argument("uniform marginal requires b > a");
      break;
    case MarginalFamily::Gaussian:
      if (!(p2 > 0.0)) throw std::invalid_argument("gaussian marginal requires sigma > 0");
      break;
    case MarginalFamily::Lognormal:
      if (!(p2 > 0.0)) throw std::invalid_argument("lognormal marginal requires sigma_ln > 0");
      break;
    case MarginalFamily::Gumbel:
      if (!(p2 > 0.0)) throw std::invalid_argument("gumbel marginal requires beta > 0");
      break;
  }
}

bool Marginal::in_support(double x) const {
  if (!std::isfinite(x)) return false;
  switch (family) {
    case MarginalFamily::Uniform: return x >= p1 && x <= p2;
    case MarginalFamily::Lognormal: return x > 0.0;
    default: return true;
  }
}

nlohmann::json Marginal::to_json() const {
  nlohmann::json j;
  j["family"] = family_name(family);
  switch (family) {
    case MarginalFamily::Uniform: j["a"] = p1; j["b"] = p2; break;
    case MarginalFamily::Gaussian: j["mu"] = p1; j["sigma"] = p2; break;
    case MarginalFamily::Lognormal: j["mu_ln"] = p1; j["sigma_ln"] = p2; break;
    case MarginalFamily::Gumbel: j["mu_g"] = p1; j["beta"] = p2; break;
  }
  return j;
}

Marginal Marginal::from_json(const nlohmann::json& j) {
  const std::string fam = j.at("family").get<std::string>();
  Marginal m;
  if (fam == "uniform") {
    m = uniform(j.at("a").get<double>(), j.at("b").get<double>());
  } else if (fam == "gaussian") {
    m = gaussian(j.at("mu").get<double>(), j.at("sigma").get<double>());
  } else if (fam == "lognormal") {
    m = lognormal(j.at("mu_ln").get<double>(), j.at("sigma_ln").get<double>());
  } else if (fam == "gumbel") {
    m = gumbel(j.at("mu_g").get<double>(), j.at("beta").get<double>());
  } else {
    throw std::invalid_argument("unknown marginal family: " + fam);
  }
  m.validate();
  return m;
}

InputModel::InputModel(std::vector<Marginal> marginals) : marginals_(std::move(marginals)) {
  if (marginals_.empty()) throw std::invalid_argument("InputModel needs at least one marginal");
  for (const auto& m : marginals_) m.validate();
}

double InputModel::to_standard(int i, double x) const {
  const Marginal& m = marginal(i);
  if (!m.in_support(x))
    throw std::domain_error("point outside support of marginal " + std::to_string(i) + " (" +
                            family_name(m.family) + "): x = " + std::to_string(x));
  switch (m.family) {
    case MarginalFamily::Uniform:
      return 2.0 * (x - m.p1) / (m.p2 - m.p1) - 1.0;
    case MarginalFamily::Gaussian:
      return (x - m.p1) / m.p2;
    case MarginalFamily::Lognormal:
      return (std::log(x) - m.p1) / m.p2;
    case MarginalFamily::Gumbel: {
      double cdf = std::exp(-std::exp(-(x - m.p1) / m.p2));
      cdf = std::min(std::max(cdf, 1e-300), 1.0 - 1e-16);
      return inv_normal_cdf(cdf);
    }
  }
  return 0.0;
}

double InputModel::from_standard(int i, double u) const {
  const Marginal& m = marginal(i);
  switch (m.family) {
    case MarginalFamily::Uniform:
      return m.p1 + 0.5 * (u + 1.0) * (m.p2 - m.p1);
    case MarginalFamily::Gaussian:
      return m.p1 + m.p2 * u;
    case MarginalFamily::Lognormal:
      return std::exp(m.p1 + m.p2 * u);
    case MarginalFamily::Gumbel: {
      double cdf = normal_cdf(u);
      cdf = std::min(std::max(cdf, 1e-300), 1.0 - 1e-16);
      return m.p1 - m.p2 * std::log(-std::log(cdf));
    }
  }
  return 0.0;
}

Vec InputModel::to_standard(const Vec& x) const {
  if (x.size() != dim()) throw std::invalid_argument("to_standard: dimension mismatch");
  Vec u(x.size());
  for (int i = 0; i < x.size(); ++i) u[i] = to_standard(i, x[i]);
  return u;
}

Vec InputModel::from_standard(const Vec& u) const {
  if (u.size() != dim()) throw std::invalid_argument("from_standard: dimension mismatch");
  Vec x(u.size());
  for (int i = 0; i < u.size(); ++i) x[i] = from_standard(i, u[i]);
  return x;
}

Mat InputModel::to_standard(const Mat& X) const {
  if (X.cols() != dim()) throw std::invalid_argument("to_standard: dimension mismatch");
  Mat U(X.rows(), X.cols());
  for (int i = 0; i < X.rows(); ++i)
    for (int j = 0; j < X.cols(); ++j) U(i, j) = to_standard(j, X(i, j));
  return U;
}

Mat InputModel::from_standard(const Mat& U) const {
  if (U.cols() != dim()) throw std::invalid_argument("from_standard: dimension mismatch");
  Mat X(U.rows(), U.cols());
  for (int i = 0; i < U.rows(); ++i)
    for (int j = 0; j < U.cols(); ++j) X(i, j) = from_standard(j, U(i, j));
  return X;
}

double InputModel::standard_from_uniform01(int i, double v) const {
  if (marginal(i).family == MarginalFamily::Uniform) return 2.0 * v - 1.0;
  return inv_normal_cdf(v);
}

nlohmann::json InputModel::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& m : marginals_) arr.push_back(m.to_json());
  return nlohmann::json{{"marginals", arr}};
}

InputModel InputModel::from_json(const nlohmann::json& j) {
  std::vector<Marginal> ms;
  for (const auto& mj : j.at("marginals")) ms.push_back(Marginal::from_json(mj));
  return InputModel(std::move(ms));
}

}  // namespace spce
