#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kinc/kappa_model.hpp"
#include "kinc/percentiles.hpp"

namespace kinc {

struct FitConfig {
  double gamma = 1.3;
  int max_iterations = 200;
  double cost_tolerance = 1e-12;
  double param_tolerance = 1e-10;
  std::optional<ModelParams> initial;
  // Additional perturbed starts beyond the default one; the lowest objective
  // wins.
  int multistart = 0;
  std::uint64_t multistart_seed = 0x6b617070612d6669ULL;

  // Throws DomainError on a negative gamma, non-positive tolerances or
  // iteration count.
  void validate() const;
};

struct FitResult {
  ModelParams params;
  double weighted_sse = 0.0;
  int iterations = 0;
  bool converged = false;
  // Observed minus fitted survival, one per percentile.
  std::vector<double> residuals;
  // Objective after every accepted step, starting with the initial point.
  std::vector<double> cost_history;
};

// w_i = (1 - i/100)^-gamma for i = 1..99.
std::vector<double> fit_weights(double gamma);

// Weighted sum of squared survival residuals. Percentiles at or below the
// threshold use a fitted survival of exactly one.
double objective(const ModelParams& params, const PercentileSeries& series, double gamma);
double objective(const ModelParams& params, const std::vector<double>& incomes,
                 const std::vector<double>& weights);

// Fitted survival minus observed survival is the negative of these.
std::vector<double> survival_residuals(const ModelParams& params,
                                       const std::vector<double>& incomes);

// Median-anchored starting point: kappa 0.8, alpha 1.8, delta 1.2, beta
// chosen so the model median equals the observed 50th percentile.
ModelParams default_initial_params(const PercentileSeries& series);

// Weighted nonlinear least squares by Levenberg-Marquardt on an unconstrained
// reparameterisation. Does not throw on non-convergence; check `converged`.
FitResult fit(const PercentileSeries& series, const FitConfig& config = {});

std::string fit_result_to_json(const FitResult& result);

}  // namespace kinc
