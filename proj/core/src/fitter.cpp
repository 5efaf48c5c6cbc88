#include "kinc/fitter.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>

#include <Eigen/Dense>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "kinc/error.hpp"
#include "kinc/rng.hpp"

namespace kinc {

void FitConfig::validate() const {
  if (!(gamma >= 0.0)) throw DomainError(fmt::format("gamma must be >= 0, got {}", gamma));
  if (max_iterations <= 0) throw DomainError("max_iterations must be positive");
  if (!(cost_tolerance > 0.0) || !(param_tolerance > 0.0))
    throw DomainError("tolerances must be positive");
  if (multistart < 0) throw DomainError("multistart must be >= 0");
}

std::vector<double> fit_weights(double gamma) {
  if (!(gamma >= 0.0)) throw DomainError(fmt::format("gamma must be >= 0, got {}", gamma));
  std::vector<double> w(kPercentileCount);
  for (int i = 1; i <= kPercentileCount; ++i)
    w[static_cast<std::size_t>(i - 1)] = std::pow(percentile_survival(i), -gamma);
  return w;
}

std::vector<double> survival_residuals(const ModelParams& params,
                                       const std::vector<double>& incomes) {
  std::vector<double> r(incomes.size());
  for (std::size_t i = 0; i < incomes.size(); ++i)
    r[i] = percentile_survival(static_cast<int>(i) + 1) -
           survival_modified_extended(incomes[i], params);
  return r;
}

double objective(const ModelParams& params, const std::vector<double>& incomes,
                 const std::vector<double>& weights) {
  if (incomes.size() != weights.size())
    throw DomainError("objective: incomes and weights differ in length");
  const auto r = survival_residuals(params, incomes);
  double sum = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) sum += weights[i] * r[i] * r[i];
  return sum;
}

double objective(const ModelParams& params, const PercentileSeries& series, double gamma) {
  return objective(params, series.values(), fit_weights(gamma));
}

ModelParams default_initial_params(const PercentileSeries& series) {
  constexpr double kappa0 = 0.8;
  constexpr double alpha0 = 1.8;
  constexpr double delta0 = 1.2;
  const double median = series.percentile(50);
  const double beta0 = -kappa_log(0.5 / delta0, kappa0) / std::pow(median, alpha0);
  return ModelParams(delta0, kappa0, alpha0, beta0);
}

namespace {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

// Unconstrained coordinates:
//   delta = 1 + e^d,  kappa = 1/(1 + e^-k),  alpha = e^a,
//   beta x^alpha = e^b (x / x_ref)^alpha.
// Measuring beta against the median income x_ref removes the near-collinearity
// between alpha and ln(beta) that raw incomes (ln x ~ 10) would create.
struct Reparam {
  double log_ref;

  Vec4 to_internal(const ModelParams& p) const {
    return {std::log(p.delta() - 1.0), std::log(p.kappa() / (1.0 - p.kappa())),
            std::log(p.alpha()), std::log(p.beta()) + p.alpha() * log_ref};
  }

  struct Raw {
    double delta, kappa, alpha, log_beta;
  };

  Raw raw(const Vec4& t) const {
    const double alpha = std::exp(t[2]);
    return {1.0 + std::exp(t[0]), 1.0 / (1.0 + std::exp(-t[1])), alpha, t[3] - alpha * log_ref};
  }

  ModelParams to_params(const Vec4& t) const {
    const Raw r = raw(t);
    return ModelParams(r.delta, r.kappa, r.alpha, std::exp(r.log_beta));
  }
};

class Problem {
 public:
  Problem(const PercentileSeries& series, double gamma)
      : incomes_(series.values()), sqrt_w_(kPercentileCount) {
    const auto w = fit_weights(gamma);
    for (std::size_t i = 0; i < w.size(); ++i) sqrt_w_[i] = std::sqrt(w[i]);
    log_x_.reserve(incomes_.size());
    for (double x : incomes_) log_x_.push_back(std::log(x));
    reparam_.log_ref = std::log(series.percentile(50));
  }

  const Reparam& reparam() const { return reparam_; }
  std::size_t size() const { return incomes_.size(); }

  // Weighted residuals sqrt(w_i) (observed - fitted), fitted capped at 1.
  Eigen::VectorXd residuals(const Vec4& t) const {
    const auto r = reparam_.raw(t);
    Eigen::VectorXd out(static_cast<Eigen::Index>(incomes_.size()));
    for (std::size_t i = 0; i < incomes_.size(); ++i) {
      const double arg = -std::exp(r.log_beta + r.alpha * log_x_[i]);
      double fitted = r.delta * std::exp(std::asinh(r.kappa * arg) / r.kappa);
      if (!(fitted < 1.0)) fitted = 1.0;
      out[static_cast<Eigen::Index>(i)] =
          sqrt_w_[i] * (percentile_survival(static_cast<int>(i) + 1) - fitted);
    }
    return out;
  }

  Eigen::MatrixXd jacobian(const Vec4& t) const {
    Eigen::MatrixXd jac(static_cast<Eigen::Index>(incomes_.size()), 4);
    for (int j = 0; j < 4; ++j) {
      const double h = 1e-6 * std::max(std::abs(t[j]), 1.0);
      Vec4 up = t, down = t;
      up[j] += h;
      down[j] -= h;
      jac.col(j) = (residuals(up) - residuals(down)) / (2.0 * h);
    }
    return jac;
  }

 private:
  const std::vector<double>& incomes_;
  std::vector<double> sqrt_w_;
  std::vector<double> log_x_;
  Reparam reparam_;
};

struct LmOutcome {
  Vec4 theta;
  double cost;
  int iterations;
  bool converged;
  std::vector<double> history;
};

bool finite_cost(double c) { return std::isfinite(c); }

// Levenberg-Marquardt with Marquardt's diagonal scaling and Nielsen's damping
// update. Each proposal (accepted or not) counts as one iteration.
LmOutcome levenberg_marquardt(const Problem& problem, Vec4 theta, const FitConfig& cfg) {
  Eigen::VectorXd r = problem.residuals(theta);
  double cost = r.squaredNorm();
  LmOutcome out{theta, cost, 0, false, {cost}};
  if (!finite_cost(cost)) return out;
  if (cost == 0.0) {
    out.converged = true;
    return out;
  }

  Eigen::MatrixXd jac = problem.jacobian(theta);
  Mat4 jtj = jac.transpose() * jac;
  Vec4 grad = jac.transpose() * r;
  double mu = 1e-3 * jtj.diagonal().maxCoeff();
  double nu = 2.0;

  for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
    out.iterations = iter;
    Vec4 scale = jtj.diagonal().cwiseMax(1e-300);
    Mat4 lhs = jtj;
    lhs.diagonal() += mu * scale;
    const Vec4 step = lhs.ldlt().solve(-grad);

    double max_rel_step = 0.0;
    for (int j = 0; j < 4; ++j)
      max_rel_step = std::max(max_rel_step, std::abs(step[j]) / std::max(std::abs(theta[j]), 1.0));

    const Vec4 candidate = theta + step;
    const Eigen::VectorXd r_new = problem.residuals(candidate);
    const double cost_new = r_new.squaredNorm();
    // Gain predicted by the linear model: 0.5 * step' (mu D step - grad),
    // doubled because cost is the plain sum of squares.
    const double predicted = step.dot(mu * scale.cwiseProduct(step) - grad);

    if (finite_cost(cost_new) && cost_new < cost && step.allFinite()) {
      const double rho = predicted > 0.0 ? (cost - cost_new) / predicted : 0.0;
      const double rel_decrease = (cost - cost_new) / cost;
      theta = candidate;
      r = r_new;
      cost = cost_new;
      out.history.push_back(cost);
      if (cost == 0.0 || rel_decrease < cfg.cost_tolerance ||
          max_rel_step < cfg.param_tolerance) {
        out.converged = true;
        break;
      }
      jac = problem.jacobian(theta);
      jtj = jac.transpose() * jac;
      grad = jac.transpose() * r;
      mu *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * rho - 1.0, 3));
      nu = 2.0;
    } else {
      // No improvement available at a step this small: the current point is
      // a minimiser to working precision.
      if (max_rel_step < cfg.param_tolerance) {
        out.converged = true;
        break;
      }
      mu *= nu;
      nu *= 2.0;
      if (!std::isfinite(mu)) break;
    }
  }
  out.theta = theta;
  out.cost = cost;
  return out;
}

}  // namespace

FitResult fit(const PercentileSeries& series, const FitConfig& config) {
  config.validate();
  const auto& v = series.values();
  if (v.size() != kPercentileCount || !std::is_sorted(v.begin(), v.end()) || !(v.front() > 0.0))
    throw DegenerateInput("fit: percentile series violates its invariants");

  const Problem problem(series, config.gamma);
  const ModelParams start = config.initial ? *config.initial : default_initial_params(series);
  const Vec4 theta0 = problem.reparam().to_internal(start);

  const auto weights = fit_weights(config.gamma);
  struct Candidate {
    LmOutcome outcome;
    std::optional<ModelParams> params;
    double sse = std::numeric_limits<double>::infinity();
  };
  auto evaluate = [&](LmOutcome outcome) {
    Candidate c{std::move(outcome), std::nullopt};
    try {
      c.params = problem.reparam().to_params(c.outcome.theta);
      c.sse = objective(*c.params, v, weights);
    } catch (const DomainError&) {
    }
    return c;
  };

  Candidate best = evaluate(levenberg_marquardt(problem, theta0, config));
  const CounterRng rng(config.multistart_seed);
  for (int s = 0; s < config.multistart; ++s) {
    Vec4 perturbed = theta0;
    for (int j = 0; j < 4; ++j) {
      const double u = rng.uniform_open(static_cast<std::uint64_t>(4 * s + j));
      perturbed[j] *= 1.0 + 0.2 * (2.0 * u - 1.0);
    }
    Candidate trial = evaluate(levenberg_marquardt(problem, perturbed, config));
    if (trial.sse < best.sse) best = std::move(trial);
  }
  if (!best.params)
    throw DegenerateInput("fit left the admissible parameter region");

  FitResult result{*best.params, best.sse, best.outcome.iterations, best.outcome.converged, {},
                   std::move(best.outcome.history)};
  result.residuals = survival_residuals(result.params, v);
  return result;
}

std::string fit_result_to_json(const FitResult& result) {
  nlohmann::ordered_json j;
  j["params"] = nlohmann::json::parse(params_to_json(result.params));
  j["weighted_sse"] = result.weighted_sse;
  j["iterations"] = result.iterations;
  j["converged"] = result.converged;
  j["residuals"] = result.residuals;
  return j.dump(2);
}

}  // namespace kinc
