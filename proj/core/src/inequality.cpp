#include "kinc/inequality.hpp"

#include <cmath>

#include <fmt/format.h>

#include "kinc/error.hpp"
#include "kinc/io.hpp"
#include "summation.hpp"

namespace kinc {

using detail::KahanSum;

double gini(std::span<const double> sorted) {
  if (sorted.empty()) throw DegenerateInput("gini: empty population");
  KahanSum total, ranked;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    total.add(sorted[i]);
    ranked.add(static_cast<double>(i + 1) * sorted[i]);
  }
  if (total.value() == 0.0) throw DegenerateInput("gini: total income is zero");
  const double n = static_cast<double>(sorted.size());
  return 2.0 * ranked.value() / (n * total.value()) - (n + 1.0) / n;
}

double theil(std::span<const double> incomes) {
  if (incomes.empty()) throw DegenerateInput("theil: empty population");
  KahanSum total;
  for (double s : incomes) {
    if (!(s > 0.0)) throw DegenerateInput(fmt::format("theil: income {} is not positive", s));
    total.add(s);
  }
  const double n = static_cast<double>(incomes.size());
  const double mean = total.value() / n;
  KahanSum acc;
  for (double s : incomes) {
    const double ratio = s / mean;
    acc.add(ratio * std::log(ratio));
  }
  return acc.value() / n;
}

std::size_t rank_boundary(std::size_t n, double q) {
  const double v = static_cast<double>(n) * q;
  const double nearest = std::round(v);
  if (std::abs(v - nearest) <= 1e-9 * std::max(1.0, v)) return static_cast<std::size_t>(nearest);
  return static_cast<std::size_t>(std::floor(v));
}

double income_share(std::span<const double> sorted, double lower, double upper) {
  if (!(lower >= 0.0 && upper <= 1.0 && lower < upper))
    throw DomainError(fmt::format("income_share: need 0 <= lower < upper <= 1, got ({}, {})",
                                  lower, upper));
  const std::size_t n = sorted.size();
  const std::size_t lo = rank_boundary(n, lower);
  const std::size_t hi = rank_boundary(n, upper);
  if (hi <= lo)
    throw DegenerateInput(fmt::format(
        "income_share: rank range ({}, {}] is empty for n = {}", lower, upper, n));
  KahanSum total, part;
  for (std::size_t i = 0; i < n; ++i) {
    total.add(sorted[i]);
    // 1-based rank r = i + 1 belongs when lo < r <= hi.
    if (i >= lo && i < hi) part.add(sorted[i]);
  }
  if (total.value() == 0.0) throw DegenerateInput("income_share: total income is zero");
  return part.value() / total.value();
}

InequalityReport report(const Population& pop, int year, Basis basis) {
  InequalityReport r;
  r.year = year;
  r.basis = basis;
  r.gini = gini(pop.incomes);
  r.theil = theil(pop.incomes);
  for (std::size_t d = 0; d < 10; ++d)
    r.decile_shares[d] = income_share(pop.incomes, d / 10.0, (d + 1) / 10.0);
  for (std::size_t t = 0; t < kTopFractions.size(); ++t)
    r.top_shares[t] = income_share(pop.incomes, 1.0 - kTopFractions[t], 1.0);
  r.power_law_coef = power_law_coefficient(pop.params);
  return r;
}

namespace {

constexpr std::string_view kMetricsHeader = "year,basis,metric,group,value\n";

void row(std::string& out, const InequalityReport& r, std::string_view metric,
         std::string_view group, double value) {
  out += fmt::format("{},{},{},{},{}\n", r.year, to_string(r.basis), metric, group,
                     io::fmt9(value));
}

}  // namespace

std::string gini_theil_csv(std::span<const InequalityReport> reports) {
  std::string out(kMetricsHeader);
  for (const auto& r : reports) {
    row(out, r, "inequality_index", "gini", r.gini);
    row(out, r, "inequality_index", "theil", r.theil);
  }
  return out;
}

std::string decile_shares_csv(std::span<const InequalityReport> reports) {
  std::string out(kMetricsHeader);
  for (const auto& r : reports)
    for (std::size_t d = 0; d < 10; ++d)
      row(out, r, "decile_share", fmt::format("decile{}", d + 1), r.decile_shares[d]);
  return out;
}

std::string top_shares_csv(std::span<const InequalityReport> reports) {
  std::string out(kMetricsHeader);
  for (const auto& r : reports)
    for (std::size_t t = 0; t < kTopFractions.size(); ++t)
      row(out, r, "top_share", kTopGroupNames[t], r.top_shares[t]);
  return out;
}

std::string power_law_csv(std::span<const InequalityReport> reports) {
  std::string out(kMetricsHeader);
  for (const auto& r : reports) row(out, r, "power_law_coefficient", "plc", r.power_law_coef);
  return out;
}

}  // namespace kinc
