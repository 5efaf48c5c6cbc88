#include "kinc/kappa_model.hpp"

#include <cmath>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "kinc/error.hpp"

namespace kinc {
namespace {

void check_kappa(double kappa) {
  if (!(kappa > 0.0 && kappa < 1.0))
    throw DomainError(fmt::format("kappa must lie in (0,1), got {}", kappa));
}

}  // namespace

// sqrt(1 + t^2) + t == exp(asinh(t)) for every real t, and asinh is odd, so
// this form never subtracts nearly equal quantities.
double kappa_exp(double x, double kappa) {
  check_kappa(kappa);
  if (std::isnan(x)) throw DomainError("kappa_exp: argument is NaN");
  return std::exp(std::asinh(kappa * x) / kappa);
}

// (x^k - x^-k) / (2k) == sinh(k ln x) / k.
double kappa_log(double x, double kappa) {
  check_kappa(kappa);
  if (!(x > 0.0)) throw DomainError(fmt::format("kappa_log: argument must be > 0, got {}", x));
  return std::sinh(kappa * std::log(x)) / kappa;
}

double threshold_xm(double delta, double kappa, double alpha, double beta) {
  // -log_kappa(1/delta) = sinh(kappa ln delta) / kappa.
  const double neg_log = std::sinh(kappa * std::log(delta)) / kappa;
  return std::exp((std::log(neg_log) - std::log(beta)) / alpha);
}

ModelParams::ModelParams(double delta, double kappa, double alpha, double beta)
    : delta_(delta), kappa_(kappa), alpha_(alpha), beta_(beta), x_m_(0.0) {
  if (!(delta > 1.0) || !std::isfinite(delta))
    throw DomainError(fmt::format("delta must be > 1, got {}", delta));
  check_kappa(kappa);
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw DomainError(fmt::format("alpha must be > 0, got {}", alpha));
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw DomainError(fmt::format("beta must be > 0, got {}", beta));
  x_m_ = threshold_xm(delta, kappa, alpha, beta);
  if (!(x_m_ > 0.0) || !std::isfinite(x_m_))
    throw DomainError(fmt::format("threshold x_m = {} is not finite and positive", x_m_));
}

double survival_standard(double x, double kappa, double alpha, double beta) {
  if (!(x > 0.0)) throw DomainError(fmt::format("survival_standard: x must be > 0, got {}", x));
  if (!(alpha > 0.0) || !(beta > 0.0))
    throw DomainError("survival_standard: alpha and beta must be > 0");
  return kappa_exp(-beta * std::pow(x, alpha), kappa);
}

double survival_modified_extended(double x, const ModelParams& params) {
  if (!(x > 0.0)) return 1.0;
  const double s = params.delta() *
                   kappa_exp(-params.beta() * std::pow(x, params.alpha()), params.kappa());
  return s < 1.0 ? s : 1.0;
}

double survival_modified(double x, const ModelParams& params) {
  if (!(x > params.x_m()))
    throw DomainError(fmt::format(
        "modified survival is defined only above x_m = {}, got x = {}", params.x_m(), x));
  const double s = params.delta() *
                   kappa_exp(-params.beta() * std::pow(x, params.alpha()), params.kappa());
  // Rounding just above x_m can land on 1; the open interval is the contract.
  return s < 1.0 ? s : std::nextafter(1.0, 0.0);
}

double quantile(double u, const ModelParams& params) {
  if (!(u > 0.0 && u < 1.0))
    throw DomainError(fmt::format("quantile: survival probability must lie in (0,1), got {}", u));
  // -log_kappa(u/delta) = sinh(kappa ln(delta/u)) / kappa.
  const double log_ratio = std::log(params.delta()) - std::log(u);
  const double neg_log = std::sinh(params.kappa() * log_ratio) / params.kappa();
  return std::exp((std::log(neg_log) - std::log(params.beta())) / params.alpha());
}

double power_law_coefficient(const ModelParams& params) {
  return params.alpha() / params.kappa();
}

std::string params_to_json(const ModelParams& params) {
  nlohmann::ordered_json j;
  j["delta"] = params.delta();
  j["kappa"] = params.kappa();
  j["alpha"] = params.alpha();
  j["beta"] = params.beta();
  j["x_m"] = params.x_m();
  return j.dump(2);
}

ModelParams params_from_json(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
    // A population sidecar nests the parameters.
    if (j.contains("params")) j = j.at("params");
    return ModelParams(j.at("delta").get<double>(), j.at("kappa").get<double>(),
                       j.at("alpha").get<double>(), j.at("beta").get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(fmt::format("model parameters JSON: {}", e.what()));
  }
}

}  // namespace kinc
