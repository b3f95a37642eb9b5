#include "spce/surrogate.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace spce {

std::string format_double_exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double_exact(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) throw std::invalid_argument("not a number: " + s);
  return v;
}

Vec SparseSurrogate::predict_standard(const Mat& U) const {
  if (U.cols() != basis.dim()) throw std::invalid_argument("predict: dimension mismatch");
  const auto families = families_for(input_model);
  if (active.empty()) return Vec::Zero(U.rows());
  Mat Psi = build_regression_matrix_cols(basis, families, U, active);
  Vec ca(static_cast<Eigen::Index>(active.size()));
  for (std::size_t i = 0; i < active.size(); ++i) ca[static_cast<Eigen::Index>(i)] = coefficients[active[i]];
  return Psi * ca;
}

Vec SparseSurrogate::predict(const Mat& X) const {
  return predict_standard(input_model.to_standard(X));
}

nlohmann::json SparseSurrogate::to_json() const {
  nlohmann::json j;
  j["schema"] = "spce-surrogate-v1";
  j["input_model"] = input_model.to_json();
  j["basis"] = basis.to_json();
  nlohmann::json coefs = nlohmann::json::array();
  for (Eigen::Index i = 0; i < coefficients.size(); ++i)
    coefs.push_back(format_double_exact(coefficients[i]));
  j["coefficients"] = coefs;
  j["active"] = active;
  j["solver"] = solver_id;
  j["scheme"] = scheme_id;
  j["criterion"] = {{"kind", estimator_name(criterion_kind, criterion_k)},
                    {"value", format_double_exact(criterion_value)}};
  j["hyperparameter"] = format_double_exact(hyperparameter);
  j["cv_seed"] = cv_seed;
  j["design_fingerprint"] = design_fingerprint;
  j["config_digest"] = config_digest;
  return j;
}

namespace {

EstimatorKind kind_from_name(const std::string& name, int& k_out) {
  k_out = 0;
  if (name == "relmse") return EstimatorKind::RelMSE;
  if (name == "loo") return EstimatorKind::LOO;
  if (name == "modloo") return EstimatorKind::ModifiedLOO;
  if (name == "hyb_loo") return EstimatorKind::HybridLOO;
  if (name == "hyb_modloo") return EstimatorKind::HybridModifiedLOO;
  if (name.rfind("hyb_kfold", 0) == 0) {
    k_out = std::stoi(name.substr(9));
    return EstimatorKind::HybridKFold;
  }
  if (name.rfind("kfold", 0) == 0) {
    k_out = std::stoi(name.substr(5));
    return EstimatorKind::KFold;
  }
  throw std::invalid_argument("unknown estimator kind: " + name);
}

}  // namespace

SparseSurrogate SparseSurrogate::from_json(const nlohmann::json& j) {
  if (j.at("schema").get<std::string>() != "spce-surrogate-v1")
    throw std::invalid_argument("unsupported surrogate schema");
  SparseSurrogate s;
  s.input_model = InputModel::from_json(j.at("input_model"));
  s.basis = MultiIndexSet::from_json(j.at("basis"));
  const auto& coefs = j.at("coefficients");
  if (static_cast<int>(coefs.size()) != s.basis.size())
    throw std::invalid_argument("surrogate: coefficient/basis size mismatch");
  s.coefficients.resize(static_cast<Eigen::Index>(coefs.size()));
  for (std::size_t i = 0; i < coefs.size(); ++i)
    s.coefficients[static_cast<Eigen::Index>(i)] = parse_double_exact(coefs[i].get<std::string>());
  s.active = j.at("active").get<std::vector<int>>();
  for (int a : s.active)
    if (a < 0 || a >= s.basis.size())
      throw std::invalid_argument("surrogate: active index out of range");
  s.solver_id = j.at("solver").get<std::string>();
  s.scheme_id = j.at("scheme").get<std::string>();
  s.criterion_kind = kind_from_name(j.at("criterion").at("kind").get<std::string>(), s.criterion_k);
  s.criterion_value = parse_double_exact(j.at("criterion").at("value").get<std::string>());
  s.hyperparameter = parse_double_exact(j.at("hyperparameter").get<std::string>());
  s.cv_seed = j.at("cv_seed").get<std::uint64_t>();
  s.design_fingerprint = j.at("design_fingerprint").get<std::uint64_t>();
  s.config_digest = j.value("config_digest", std::string{});
  if (s.basis.dim() != s.input_model.dim())
    throw std::invalid_argument("surrogate: basis/input dimension mismatch");
  return s;
}

void SparseSurrogate::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << to_json().dump(2) << "\n";
}

SparseSurrogate SparseSurrogate::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  nlohmann::json j;
  in >> j;
  return from_json(j);
}

}  // namespace spce
