#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kinc/percentiles.hpp"
#include "kinc/sampler.hpp"

namespace kinc {

// Functions taking a span expect incomes sorted ascending.

// G = 2 sum(i s_i) / (n sum s_i) - (n+1)/n with 1-based ranks.
double gini(std::span<const double> sorted);
inline double gini(const Population& pop) { return gini(pop.incomes); }

// T = (1/n) sum (s_i/mu) ln(s_i/mu). DegenerateInput if any income <= 0.
double theil(std::span<const double> incomes);
inline double theil(const Population& pop) { return theil(pop.incomes); }

// floor(n q), snapped to the nearest integer when n q is within rounding
// noise of it (so 0.99 * 10^6 is 990000, not 989999).
std::size_t rank_boundary(std::size_t n, double q);

// Share of total income held by ranks (floor(n lower), floor(n upper)].
double income_share(std::span<const double> sorted, double lower_quantile,
                    double upper_quantile);
inline double income_share(const Population& pop, double lower, double upper) {
  return income_share(pop.incomes, lower, upper);
}

// Top groups reported: 5%, 1%, 0.1%, 0.01%.
inline constexpr std::array<double, 4> kTopFractions{0.05, 0.01, 0.001, 0.0001};
// CSV group labels matching kTopFractions.
inline constexpr std::array<std::string_view, 4> kTopGroupNames{"top5", "top1", "top01",
                                                               "top001"};

struct InequalityReport {
  int year = 0;
  Basis basis = Basis::PreTax;
  double gini = 0.0;
  double theil = 0.0;
  std::array<double, 10> decile_shares{};
  // Ordered as kTopFractions.
  std::array<double, 4> top_shares{};
  double power_law_coef = 0.0;
  // The simulated population starts at x_m, so lower-tail statistics
  // (bottom deciles, Gini, Theil) omit incomes below it.
  bool lower_tail_truncated = true;
};

inline constexpr std::string_view kLowerTailCaveat =
    "simulated populations exclude incomes below the fitted threshold x_m; "
    "lower-tail shares, Gini and Theil are conditional on income > x_m";

InequalityReport report(const Population& pop, int year, Basis basis);

// Rows `year,basis,metric,group,value`. Each figure family gets its own file.
std::string gini_theil_csv(std::span<const InequalityReport> reports);
std::string decile_shares_csv(std::span<const InequalityReport> reports);
std::string top_shares_csv(std::span<const InequalityReport> reports);
std::string power_law_csv(std::span<const InequalityReport> reports);

}  // namespace kinc
