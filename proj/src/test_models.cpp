#include "spce/test_models.hpp"

#include <cmath>
#include <stdexcept>

namespace spce {

Vec BenchmarkModel::evaluate(const Mat& X) const {
  if (X.cols() != d) throw std::invalid_argument("evaluate: dimension mismatch");
  Vec y(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    Vec x = X.row(i).transpose();
    for (int j = 0; j < d; ++j)
      if (!input.marginal(j).in_support(x[j]))
        throw std::domain_error("evaluate: row " + std::to_string(i) +
                                " outside support of coordinate " + std::to_string(j));
    y[i] = evaluate_one(x);
  }
  return y;
}

namespace {

BenchmarkModel make_ishigami() {
  const double pi = M_PI;
  BenchmarkModel m;
  m.id = "ishigami";
  m.d = 3;
  m.input = InputModel({Marginal::uniform(-pi, pi), Marginal::uniform(-pi, pi),
                        Marginal::uniform(-pi, pi)});
  m.evaluate_one = [](const Vec& x) {
    const double a = 7.0, b = 0.1;
    const double s1 = std::sin(x[0]);
    const double s2 = std::sin(x[1]);
    return s1 + a * s2 * s2 + b * x[2] * x[2] * x[2] * x[2] * s1;
  };
  m.small_n = 50;
  m.large_n = 150;
  return m;
}

// Nonlinear undamped single-degree-of-freedom oscillator; inputs
// (m, c1, c2, r, F1, t1), all Gaussian.
BenchmarkModel make_oscillator6() {
  BenchmarkModel m;
  m.id = "oscillator6";
  m.d = 6;
  m.input = InputModel({Marginal::gaussian(1.0, 0.05), Marginal::gaussian(1.0, 0.1),
                        Marginal::gaussian(0.1, 0.01), Marginal::gaussian(0.5, 0.05),
                        Marginal::gaussian(1.0, 0.2), Marginal::gaussian(1.0, 0.2)});
  m.evaluate_one = [](const Vec& x) {
    const double mass = x[0], c1 = x[1], c2 = x[2], r = x[3], f1 = x[4], t1 = x[5];
    const double w0 = std::sqrt((c1 + c2) / mass);
    return 3.0 * r - std::abs(2.0 * f1 / (mass * w0 * w0) * std::sin(0.5 * w0 * t1));
  };
  m.small_n = 60;
  m.large_n = 120;
  return m;
}

// Water flow through a borehole; inputs (rw, r, Tu, Hu, Tl, Hl, L, Kw).
// rw is Gaussian with a far-left tail crossing zero; the log argument is
// floored at a tiny radius so a ~6-sigma draw cannot produce a NaN record
// (see docs/models.md).
BenchmarkModel make_borehole() {
  BenchmarkModel m;
  m.id = "borehole";
  m.d = 8;
  m.input = InputModel({Marginal::gaussian(0.10, 0.0161812), Marginal::lognormal(7.71, 1.0056),
                        Marginal::uniform(63070.0, 115600.0), Marginal::uniform(990.0, 1110.0),
                        Marginal::uniform(63.1, 116.0), Marginal::uniform(700.0, 820.0),
                        Marginal::uniform(1120.0, 1680.0), Marginal::uniform(9855.0, 12045.0)});
  m.evaluate_one = [](const Vec& x) {
    const double rw = std::max(x[0], 1e-4);
    const double r = x[1], tu = x[2], hu = x[3], tl = x[4], hl = x[5], el = x[6], kw = x[7];
    const double logr = std::log(r / rw);
    return 2.0 * M_PI * tu * (hu - hl) /
           (logr * (1.0 + 2.0 * el * tu / (logr * rw * rw * kw) + tu / tl));
  };
  m.small_n = 100;
  m.large_n = 250;
  return m;
}

// Two-degree-of-freedom primary/secondary damped oscillator; the response is
// the force-capacity limit state with peak factor 3 (see docs/models.md).
// Inputs (mp, ms, kp, ks, zp, zs, S0, Fs), all lognormal.
BenchmarkModel make_damped8() {
  BenchmarkModel m;
  m.id = "damped8";
  m.d = 8;
  m.input = InputModel({Marginal::lognormal_mean_cov(1.5, 0.10),
                        Marginal::lognormal_mean_cov(0.01, 0.10),
                        Marginal::lognormal_mean_cov(1.0, 0.20),
                        Marginal::lognormal_mean_cov(0.01, 0.20),
                        Marginal::lognormal_mean_cov(0.05, 0.40),
                        Marginal::lognormal_mean_cov(0.02, 0.50),
                        Marginal::lognormal_mean_cov(100.0, 0.10),
                        Marginal::lognormal_mean_cov(15.0, 0.10)});
  m.evaluate_one = [](const Vec& x) {
    const double mp = x[0], ms = x[1], kp = x[2], ks = x[3];
    const double zp = x[4], zs = x[5], s0 = x[6], fs = x[7];
    const double wp = std::sqrt(kp / mp), ws = std::sqrt(ks / ms);
    const double wa = 0.5 * (wp + ws), za = 0.5 * (zp + zs);
    const double gamma = ms / mp;
    const double theta = (wp - ws) / wa;
    const double msq = M_PI * s0 / (4.0 * zs * ws * ws * ws) * za * zs /
                       (zp * zs * (4.0 * za * za + theta * theta) + gamma * za * za) *
                       (zp * wp * wp * wp + zs * ws * ws * ws) * wp /
                       (4.0 * za * wa * wa * wa * wa);
    return fs - 3.0 * ks * std::sqrt(msq);
  };
  m.small_n = 150;
  m.large_n = 350;
  return m;
}

// Light-aircraft wing weight; 10 uniform inputs
// (Sw, Wfw, A, Lambda[deg], q, lambda, tc, Nz, Wdg, Wp).
BenchmarkModel make_wingweight() {
  BenchmarkModel m;
  m.id = "wingweight";
  m.d = 10;
  m.input = InputModel({Marginal::uniform(150.0, 200.0), Marginal::uniform(220.0, 300.0),
                        Marginal::uniform(6.0, 10.0), Marginal::uniform(-10.0, 10.0),
                        Marginal::uniform(16.0, 45.0), Marginal::uniform(0.5, 1.0),
                        Marginal::uniform(0.08, 0.18), Marginal::uniform(2.5, 6.0),
                        Marginal::uniform(1700.0, 2500.0), Marginal::uniform(0.025, 0.08)});
  m.evaluate_one = [](const Vec& x) {
    const double sw = x[0], wfw = x[1], a = x[2], lam_deg = x[3], q = x[4];
    const double lambda = x[5], tc = x[6], nz = x[7], wdg = x[8], wp = x[9];
    const double c = std::cos(lam_deg * M_PI / 180.0);
    return 0.036 * std::pow(sw, 0.758) * std::pow(wfw, 0.0035) * std::pow(a / (c * c), 0.6) *
               std::pow(q, 0.006) * std::pow(lambda, 0.04) * std::pow(100.0 * tc / c, -0.3) *
               std::pow(nz * wdg, 0.49) +
           sw * wp;
  };
  m.small_n = 100;
  m.large_n = 250;
  return m;
}

// Morris screening function with 20 uniform inputs on [0,1].
BenchmarkModel make_morris() {
  BenchmarkModel m;
  m.id = "morris";
  m.d = 20;
  std::vector<Marginal> marg(20, Marginal::uniform(0.0, 1.0));
  m.input = InputModel(marg);
  m.evaluate_one = [](const Vec& x) {
    double w[20];
    for (int i = 0; i < 20; ++i) {
      if (i == 2 || i == 4 || i == 6)
        w[i] = 2.0 * (1.1 * x[i] / (x[i] + 0.1) - 0.5);
      else
        w[i] = 2.0 * (x[i] - 0.5);
    }
    double y = 0.0;
    for (int i = 0; i < 20; ++i) {
      const double beta_i = i < 10 ? 20.0 : ((i + 1) % 2 == 0 ? 1.0 : -1.0);
      y += beta_i * w[i];
    }
    for (int i = 0; i < 20; ++i)
      for (int j = i + 1; j < 20; ++j) {
        double beta_ij;
        if (i < 6 && j < 6)
          beta_ij = -15.0;
        else
          beta_ij = ((i + 1) + (j + 1)) % 2 == 0 ? 1.0 : -1.0;
        y += beta_ij * w[i] * w[j];
      }
    for (int i = 0; i < 5; ++i)
      for (int j = i + 1; j < 5; ++j)
        for (int l = j + 1; l < 5; ++l) y += -10.0 * w[i] * w[j] * w[l];
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        for (int l = j + 1; l < 4; ++l)
          for (int s = l + 1; s < 4; ++s) y += 5.0 * w[i] * w[j] * w[l] * w[s];
    return y;
  };
  m.small_n = 150;
  m.large_n = 350;
  return m;
}

// Synthetic 100-dimensional stand-in: compressible (coefficients decay like
// i^-2), a few low-order interactions, one non-polynomial term. Not a
// reference model; results are not comparable to any published figures.
BenchmarkModel make_hd100() {
  BenchmarkModel m;
  m.id = "hd100";
  m.d = 100;
  m.synthetic = true;
  std::vector<Marginal> marg(100, Marginal::uniform(-1.0, 1.0));
  m.input = InputModel(marg);
  m.evaluate_one = [](const Vec& x) {
    double y = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double wi = 1.0 / ((i + 1.0) * (i + 1.0));
      y += wi * (x[i] + 0.4 * x[i] * x[i] * x[i]);
    }
    y += 0.8 * x[0] * x[1] + 0.4 * x[1] * x[2] + 0.2 * std::sin(0.5 * M_PI * x[0]);
    return y;
  };
  m.small_n = 400;
  m.large_n = 1200;
  return m;
}

}  // namespace

const std::vector<BenchmarkModel>& model_registry() {
  static const std::vector<BenchmarkModel> models = {
      make_ishigami(), make_oscillator6(), make_borehole(), make_damped8(),
      make_wingweight(), make_morris(),    make_hd100()};
  return models;
}

const BenchmarkModel& model_by_id(const std::string& id) {
  for (const auto& m : model_registry())
    if (m.id == id) return m;
  throw std::invalid_argument("unknown model id: " + id);
}

bool has_model(const std::string& id) {
  for (const auto& m : model_registry())
    if (m.id == id) return true;
  return false;
}

}  // namespace spce
