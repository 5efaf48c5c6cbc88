#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kinc/percentiles.hpp"

namespace kinc {

// Taxed bands: (a1,a2] at p1, (a2,a3] at p2, (a3,inf) at p3. Income up to a1
// is untaxed.
enum class Band : int { First = 1, Second = 2, Third = 3 };

Band parse_band(int index);

struct Cutoffs {
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 0.0;
};

struct Rates {
  double p1 = 0.0;
  double p2 = 0.0;
  double p3 = 0.0;

  double operator[](Band band) const;
  double& operator[](Band band);
};

struct TaxSchedule {
  Cutoffs cutoffs;
  Rates rates;

  // ValidationError unless 0 < a1 < a2 < a3 and every rate is in [0,1].
  void validate() const;
};

// Bracket cut-offs at the 1st, 85th and 95th percentiles with rates
// 0.2 / 0.4 / 0.45: the 2023 pre-tax approximation of the UK schedule.
TaxSchedule schedule_2023();

// The same 1st/85th/95th percentile rule applied to any year.
Cutoffs cutoffs_from_series(const PercentileSeries& series);

// Piecewise-linear bracket tax. Continuous, non-decreasing, zero up to a1.
double tax_due(double income, const TaxSchedule& sched);

// Total tax over total income. DegenerateInput on zero total income.
double tax_share_direct(std::span<const double> incomes, const TaxSchedule& sched);

// Exact linear decomposition of the tax share, R = k1 p1 + k2 p2 + k3 p3.
struct KCoefficients {
  double k1 = 0.0;
  double k2 = 0.0;
  double k3 = 0.0;
  std::size_t n1 = 0;  // headcount in (a1,a2]
  std::size_t n2 = 0;  // (a2,a3]
  std::size_t n3 = 0;  // (a3,inf)
  double total_income = 0.0;

  double operator[](Band band) const;
};

KCoefficients k_coefficients(std::span<const double> incomes, const Cutoffs& cutoffs);

double linear_tax_share(const KCoefficients& k, const Rates& rates);

// Case 1: rate `band_i` is shared by both schedules. Given the difference
// delta = p_k - p~_k on band `band_k`, returns p~_j = p_j + (K_k/K_j) delta
// so that {p} and {p~} raise the same tax share. DegenerateInput if K_j = 0.
double equivalent_rate_case1(const KCoefficients& k, const Rates& base, double delta_pk,
                             Band band_j, Band band_k);

// Case 2 with i = 1, j = 2, k = 3: the comparison schedule keeps p~1 = p1 - x
// and ties p~3 = p~2 + y. Returns
//   p~2 = (K1 x + K2 p2 + K3 (p3 - y)) / (K2 + K3).
// DegenerateInput if K2 + K3 = 0.
double equivalent_rate_case2(const KCoefficients& k, const Rates& base, double x, double y);

struct SweepSpec {
  Band band = Band::First;
  double lo = 0.0;
  double hi = 0.8;
  int steps = 81;  // grid points, endpoints included
  // When set, p3 follows p2 + offset (band must be Second).
  std::optional<double> coupled_offset;
};

struct SweepPoint {
  double rate;
  double share;
};

// Direct tax share on an even rate grid, other rates held at `base`.
std::vector<SweepPoint> tax_share_sweep(std::span<const double> incomes,
                                        const TaxSchedule& base, const SweepSpec& spec,
                                        unsigned threads = 0);

std::string sweep_to_csv(std::span<const SweepPoint> points);

// {"cutoffs":{"a1","a2","a3"},"rates":{"p1","p2","p3"}}
std::string schedule_to_json(const TaxSchedule& sched);
TaxSchedule schedule_from_json(std::string_view json_text);

}  // namespace kinc
