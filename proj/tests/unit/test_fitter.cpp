#include <doctest.h>

#include <cmath>

#include "kinc/error.hpp"
#include "kinc/fitter.hpp"
#include "support/fixtures.hpp"

using namespace kinc;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

void check_recovery(const ModelParams& truth, const FitResult& r, double tol) {
  CHECK(rel(r.params.delta(), truth.delta()) < tol);
  CHECK(rel(r.params.kappa(), truth.kappa()) < tol);
  CHECK(rel(r.params.alpha(), truth.alpha()) < tol);
  CHECK(rel(r.params.beta(), truth.beta()) < tol);
}

}  // namespace

TEST_CASE("weights") {
  const auto w0 = fit_weights(0.0);
  REQUIRE(w0.size() == 99);
  for (double w : w0) CHECK(w == 1.0);
  CHECK(fit_weights(1.0)[98] == doctest::Approx(100.0).epsilon(1e-12));
  const auto w = fit_weights(1.3);
  CHECK(w[49] == doctest::Approx(2.462289).epsilon(1e-6));
  for (std::size_t i = 1; i < w.size(); ++i) CHECK(w[i] > w[i - 1]);
  CHECK_THROWS_AS(fit_weights(-0.1), DomainError);
}

TEST_CASE("objective") {
  const auto truth = test::params_2023_pre();
  const auto series = test::synthetic_series(truth);
  CHECK(objective(truth, series, 1.3) < 1e-20);

  const ModelParams off(1.25, 0.8, 1.8, 1.1e-8);
  const double base = objective(off, series, 1.3);
  CHECK(base > 0.0);
  auto doubled = fit_weights(1.3);
  for (auto& w : doubled) w *= 2;
  CHECK(objective(off, series.values(), doubled) == doctest::Approx(2 * base).epsilon(1e-14));

  // Explicit sum as an independent reference.
  double expected = 0.0;
  for (int i = 1; i <= 99; ++i) {
    const double x = series.percentile(i);
    double fitted = off.delta() * kappa_exp(-off.beta() * std::pow(x, off.alpha()), off.kappa());
    fitted = std::min(fitted, 1.0);
    expected += std::pow(1 - i / 100.0, -1.3) * std::pow((1 - i / 100.0) - fitted, 2);
  }
  CHECK(base == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("objective stays finite when percentiles fall below x_m") {
  const auto series = test::synthetic_series(test::params_2023_pre());
  // Threshold far above the lowest percentiles.
  const ModelParams high(3.0, 0.8, 1.8, 1e-8);
  REQUIRE(high.x_m() > series.percentile(10));
  const auto res = survival_residuals(high, series.values());
  CHECK(res[0] == doctest::Approx(0.99 - 1.0));
  CHECK(std::isfinite(objective(high, series, 1.3)));
}

TEST_CASE("default initial point is median anchored") {
  const auto series = test::synthetic_series(test::params_2023_pre());
  const auto init = default_initial_params(series);
  CHECK(init.delta() == 1.2);
  CHECK(init.kappa() == 0.8);
  CHECK(init.alpha() == 1.8);
  CHECK(survival_modified(series.percentile(50), init) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("noiseless round trip recovers parameters") {
  const ModelParams truth(1.25, 0.8, 1.8, 1e-8);
  const auto r = fit(test::synthetic_series(truth));
  CHECK(r.converged);
  check_recovery(truth, r, 1e-3);
  CHECK(r.residuals.size() == 99);
  CHECK(r.weighted_sse >= 0.0);
  CHECK(r.weighted_sse < 1e-16);
}

TEST_CASE("round trip across the reference parameter ranges") {
  for (const auto& row : test::reference_tables()) {
    CAPTURE(row.year);
    CAPTURE(to_string(row.basis));
    const auto r = fit(test::synthetic_series(row.params));
    CHECK(r.converged);
    check_recovery(row.params, r, 1e-3);
  }
}

TEST_CASE("gamma = 0 and other gammas also recover noiseless data") {
  const ModelParams truth(1.3391, 0.6767, 1.8388, 8.34e-9);
  for (double g : {0.0, 0.7, 2.0}) {
    FitConfig cfg;
    cfg.gamma = g;
    const auto r = fit(test::synthetic_series(truth), cfg);
    CHECK(r.converged);
    check_recovery(truth, r, 1e-3);
  }
}

TEST_CASE("accepted iterations never increase the objective") {
  // Perturbed data so the minimum is not zero.
  const auto truth = test::params_2023_pre();
  auto v = test::synthetic_series(truth).values();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= 1.0 + 0.01 * std::sin(0.7 * i);
  std::sort(v.begin(), v.end());
  const PercentileSeries noisy(2023, Basis::PreTax, v);
  const auto r = fit(noisy);
  REQUIRE(r.cost_history.size() >= 2);
  for (std::size_t i = 1; i < r.cost_history.size(); ++i)
    CHECK(r.cost_history[i] <= r.cost_history[i - 1]);
  CHECK(r.weighted_sse == doctest::Approx(r.cost_history.back()).epsilon(1e-12));
  // Constraints hold by construction.
  CHECK(r.params.delta() > 1.0);
  CHECK(r.params.kappa() > 0.0);
  CHECK(r.params.kappa() < 1.0);
  CHECK(r.params.alpha() > 0.0);
  CHECK(r.params.beta() > 0.0);
}

TEST_CASE("iteration cap reports non-convergence with best-so-far") {
  FitConfig cfg;
  cfg.max_iterations = 2;
  const auto series = test::synthetic_series(ModelParams(1.25, 0.8, 1.8, 1e-8));
  const auto r = fit(series, cfg);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 2);
  CHECK(r.weighted_sse <= objective(default_initial_params(series), series, 1.3));
}

TEST_CASE("multistart is deterministic and never worse than a single start") {
  const auto truth = test::params_2023_pre();
  auto v = test::synthetic_series(truth).values();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= 1.0 + 0.02 * std::cos(1.3 * i);
  std::sort(v.begin(), v.end());
  const PercentileSeries noisy(2023, Basis::PreTax, v);
  FitConfig single;
  FitConfig multi;
  multi.multistart = 4;
  const auto a = fit(noisy, single);
  const auto b = fit(noisy, multi);
  const auto c = fit(noisy, multi);
  CHECK(b.weighted_sse <= a.weighted_sse);
  CHECK(b.params == c.params);
}

TEST_CASE("explicit initial point and config validation") {
  const ModelParams truth(1.25, 0.8, 1.8, 1e-8);
  FitConfig cfg;
  cfg.initial = ModelParams(1.1, 0.7, 1.6, 5e-8);
  const auto r = fit(test::synthetic_series(truth), cfg);
  check_recovery(truth, r, 1e-3);

  FitConfig bad;
  bad.gamma = -1;
  CHECK_THROWS_AS(fit(test::synthetic_series(truth), bad), DomainError);
  bad = {};
  bad.cost_tolerance = 0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("fit result JSON carries params and residuals") {
  const auto r = fit(test::synthetic_series(ModelParams(1.25, 0.8, 1.8, 1e-8)));
  const auto j = fit_result_to_json(r);
  CHECK(j.find("\"residuals\"") != std::string::npos);
  CHECK(j.find("\"converged\": true") != std::string::npos);
}
