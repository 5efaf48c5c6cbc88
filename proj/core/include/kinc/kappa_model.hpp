#pragma once

#include <string>
#include <string_view>

namespace kinc {

// exp_kappa(x) = (sqrt(1 + kappa^2 x^2) + kappa x)^(1/kappa), kappa in (0,1).
// Negative arguments go through the reciprocal form so the deep tail keeps
// full relative precision.
double kappa_exp(double x, double kappa);

// log_kappa(x) = (x^kappa - x^-kappa) / (2 kappa), x > 0, kappa in (0,1).
double kappa_log(double x, double kappa);

// Parameters of the prefactor-adjusted kappa-generalised tail
//   P(X > x) = delta * exp_kappa(-beta * x^alpha),  x > x_m.
// The threshold x_m, where the tail equals one, is computed once on
// construction.
class ModelParams {
 public:
  // Throws DomainError unless delta > 1, 0 < kappa < 1, alpha > 0, beta > 0
  // and the resulting threshold is finite and positive.
  ModelParams(double delta, double kappa, double alpha, double beta);

  double delta() const noexcept { return delta_; }
  double kappa() const noexcept { return kappa_; }
  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  double x_m() const noexcept { return x_m_; }

  bool operator==(const ModelParams& other) const noexcept {
    return delta_ == other.delta_ && kappa_ == other.kappa_ && alpha_ == other.alpha_ &&
           beta_ == other.beta_;
  }

 private:
  double delta_;
  double kappa_;
  double alpha_;
  double beta_;
  double x_m_;
};

// x_m = (-(1/beta) log_kappa(1/delta))^(1/alpha).
double threshold_xm(double delta, double kappa, double alpha, double beta);
inline double threshold_xm(const ModelParams& params) { return params.x_m(); }

// Standard kappa-generalised survival exp_kappa(-beta x^alpha), x > 0.
double survival_standard(double x, double kappa, double alpha, double beta);

// delta * exp_kappa(-beta x^alpha); DomainError for x <= x_m.
double survival_modified(double x, const ModelParams& params);

// Same expression without the domain check, capped at 1 below x_m. Used where
// a total function is needed (fitting objective, empirical comparisons).
double survival_modified_extended(double x, const ModelParams& params);

// Inverse of survival_modified: u is a survival probability in the open
// interval (0,1). Returns (-(1/beta) log_kappa(u/delta))^(1/alpha) > x_m.
double quantile(double u, const ModelParams& params);

// Asymptotic tail exponent alpha / kappa.
double power_law_coefficient(const ModelParams& params);

// JSON object {"delta","kappa","alpha","beta","x_m"}; x_m is informational
// and ignored when reading.
std::string params_to_json(const ModelParams& params);
ModelParams params_from_json(std::string_view json_text);

}  // namespace kinc
