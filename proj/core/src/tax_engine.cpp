#include "kinc/tax_engine.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "kinc/error.hpp"
#include "kinc/io.hpp"
#include "kinc/parallel.hpp"
#include "summation.hpp"

namespace kinc {

using detail::KahanSum;

Band parse_band(int index) {
  if (index < 1 || index > 3) throw DomainError(fmt::format("band index must be 1, 2 or 3, got {}", index));
  return static_cast<Band>(index);
}

double Rates::operator[](Band band) const {
  switch (band) {
    case Band::First: return p1;
    case Band::Second: return p2;
    case Band::Third: return p3;
  }
  throw DomainError("invalid band");
}

double& Rates::operator[](Band band) {
  switch (band) {
    case Band::First: return p1;
    case Band::Second: return p2;
    case Band::Third: return p3;
  }
  throw DomainError("invalid band");
}

double KCoefficients::operator[](Band band) const {
  switch (band) {
    case Band::First: return k1;
    case Band::Second: return k2;
    case Band::Third: return k3;
  }
  throw DomainError("invalid band");
}

void TaxSchedule::validate() const {
  const auto& c = cutoffs;
  if (!(0.0 < c.a1 && c.a1 < c.a2 && c.a2 < c.a3))
    throw ValidationError(
        fmt::format("cut-offs must satisfy 0 < a1 < a2 < a3, got ({}, {}, {})", c.a1, c.a2, c.a3));
  for (double p : {rates.p1, rates.p2, rates.p3})
    if (!(p >= 0.0 && p <= 1.0))
      throw ValidationError(fmt::format("tax rate {} outside [0,1]", p));
}

TaxSchedule schedule_2023() { return {{12'800.0, 53'700.0, 90'500.0}, {0.2, 0.4, 0.45}}; }

Cutoffs cutoffs_from_series(const PercentileSeries& series) {
  return {series.percentile(1), series.percentile(85), series.percentile(95)};
}

double tax_due(double income, const TaxSchedule& sched) {
  const auto& [a1, a2, a3] = sched.cutoffs;
  const auto& [p1, p2, p3] = sched.rates;
  if (income <= a1) return 0.0;
  if (income <= a2) return p1 * (income - a1);
  if (income <= a3) return p2 * (income - a2) + p1 * (a2 - a1);
  return p3 * (income - a3) + p2 * (a3 - a2) + p1 * (a2 - a1);
}

double tax_share_direct(std::span<const double> incomes, const TaxSchedule& sched) {
  KahanSum tax, total;
  for (double s : incomes) {
    tax.add(tax_due(s, sched));
    total.add(s);
  }
  if (total.value() == 0.0) throw DegenerateInput("tax share: total income is zero");
  return tax.value() / total.value();
}

KCoefficients k_coefficients(std::span<const double> incomes, const Cutoffs& cutoffs) {
  const auto& [a1, a2, a3] = cutoffs;
  if (!(0.0 < a1 && a1 < a2 && a2 < a3))
    throw ValidationError("k_coefficients: cut-offs must satisfy 0 < a1 < a2 < a3");
  KahanSum total, s1, s2, s3;
  KCoefficients k;
  for (double s : incomes) {
    total.add(s);
    if (s > a3) {
      s3.add(s);
      ++k.n3;
    } else if (s > a2) {
      s2.add(s);
      ++k.n2;
    } else if (s > a1) {
      s1.add(s);
      ++k.n1;
    }
  }
  k.total_income = total.value();
  if (k.total_income == 0.0) throw DegenerateInput("k_coefficients: total income is zero");
  const double big_n = k.total_income;
  const auto n1 = static_cast<double>(k.n1);
  const auto n2 = static_cast<double>(k.n2);
  const auto n3 = static_cast<double>(k.n3);
  k.k1 = s1.value() / big_n - (n1 * a1 - (n2 + n3) * (a2 - a1)) / big_n;
  k.k2 = s2.value() / big_n - (n2 * a2 - n3 * (a3 - a2)) / big_n;
  k.k3 = s3.value() / big_n - n3 * a3 / big_n;
  return k;
}

double linear_tax_share(const KCoefficients& k, const Rates& rates) {
  return k.k1 * rates.p1 + k.k2 * rates.p2 + k.k3 * rates.p3;
}

double equivalent_rate_case1(const KCoefficients& k, const Rates& base, double delta_pk,
                             Band band_j, Band band_k) {
  if (band_j == band_k) throw DomainError("case 1: bands j and k must differ");
  if (k[band_j] == 0.0)
    throw DegenerateInput(fmt::format("case 1: K{} is zero", static_cast<int>(band_j)));
  return base[band_j] + k[band_k] / k[band_j] * delta_pk;
}

double equivalent_rate_case2(const KCoefficients& k, const Rates& base, double x, double y) {
  const double denom = k.k2 + k.k3;
  if (denom == 0.0) throw DegenerateInput("case 2: K2 + K3 is zero");
  return (k.k1 * x + k.k2 * base.p2 + k.k3 * (base.p3 - y)) / denom;
}

std::vector<SweepPoint> tax_share_sweep(std::span<const double> incomes,
                                        const TaxSchedule& base, const SweepSpec& spec,
                                        unsigned threads) {
  if (spec.steps < 1) throw DomainError("sweep: steps must be >= 1");
  if (!(spec.lo >= 0.0 && spec.hi <= 1.0 && spec.lo <= spec.hi))
    throw DomainError(fmt::format("sweep: range [{}, {}] must lie within [0,1]", spec.lo, spec.hi));
  if (spec.coupled_offset && spec.band != Band::Second)
    throw DomainError("sweep: a coupled offset requires band 2");

  std::vector<SweepPoint> points(static_cast<std::size_t>(spec.steps));
  parallel_for(
      points.size(),
      [&](std::size_t i) {
        const double rate =
            spec.steps == 1 || i + 1 == points.size()
                ? (spec.steps == 1 ? spec.lo : spec.hi)
                : spec.lo + (spec.hi - spec.lo) * static_cast<double>(i) / (spec.steps - 1);
        TaxSchedule sched = base;
        sched.rates[spec.band] = rate;
        if (spec.coupled_offset) sched.rates.p3 = rate + *spec.coupled_offset;
        points[i] = {rate, tax_share_direct(incomes, sched)};
      },
      threads);
  return points;
}

std::string sweep_to_csv(std::span<const SweepPoint> points) {
  std::string out = "rate,share\n";
  for (const auto& p : points) out += fmt::format("{},{}\n", io::fmt9(p.rate), io::fmt9(p.share));
  return out;
}

std::string schedule_to_json(const TaxSchedule& sched) {
  nlohmann::ordered_json j;
  j["cutoffs"] = {{"a1", sched.cutoffs.a1}, {"a2", sched.cutoffs.a2}, {"a3", sched.cutoffs.a3}};
  j["rates"] = {{"p1", sched.rates.p1}, {"p2", sched.rates.p2}, {"p3", sched.rates.p3}};
  return j.dump(2);
}

TaxSchedule schedule_from_json(std::string_view json_text) {
  TaxSchedule sched;
  try {
    const auto j = nlohmann::json::parse(json_text);
    const auto& c = j.at("cutoffs");
    const auto& r = j.at("rates");
    sched = {{c.at("a1").get<double>(), c.at("a2").get<double>(), c.at("a3").get<double>()},
             {r.at("p1").get<double>(), r.at("p2").get<double>(), r.at("p3").get<double>()}};
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(fmt::format("scenario JSON: {}", e.what()));
  }
  sched.validate();
  return sched;
}

}  // namespace kinc
