#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace kinc {

inline constexpr int kPercentileCount = 99;

enum class Basis { PreTax, PostTax };

// "pre" / "post", the spelling used in every file format.
std::string_view to_string(Basis basis);
Basis parse_basis(std::string_view text);

// One year's 99 ordered income percentiles for a single income basis.
// values()[i] is the (i+1)-th percentile. Construction validates that there
// are exactly 99 strictly increasing positive values.
class PercentileSeries {
 public:
  PercentileSeries(int year, Basis basis, std::vector<double> values);

  int year() const noexcept { return year_; }
  Basis basis() const noexcept { return basis_; }
  const std::vector<double>& values() const noexcept { return values_; }

  // x_i for i in 1..99.
  double percentile(int i) const;

 private:
  int year_;
  Basis basis_;
  std::vector<double> values_;
};

struct SurvivalPoint {
  double income;
  double survival;  // P(X > income) = 1 - i/100
};

// The 99 (x_i, 1 - i/100) pairs, ascending in income.
std::vector<SurvivalPoint> survival_points(const PercentileSeries& series);

// Survival probability attached to the i-th percentile, i in 1..99.
double percentile_survival(int i);

struct SeriesKey {
  int year;
  Basis basis;
  auto operator<=>(const SeriesKey&) const = default;
};

// Collection of percentile series keyed by (year, basis).
class Dataset {
 public:
  // Throws ValidationError on a duplicate key.
  void add(PercentileSeries series);

  const PercentileSeries* find(int year, Basis basis) const;
  const std::map<SeriesKey, PercentileSeries>& series() const noexcept { return series_; }
  std::size_t size() const noexcept { return series_.size(); }
  bool empty() const noexcept { return series_.empty(); }

  // Distinct years present, ascending.
  std::vector<int> years() const;

  // Years strictly between the first and last present year for which no
  // series exists under any basis.
  std::vector<int> missing_years() const;

  bool operator==(const Dataset&) const = default;

 private:
  std::map<SeriesKey, PercentileSeries> series_;
};

bool operator==(const PercentileSeries& a, const PercentileSeries& b);

// Canonical long-format CSV: header `year,basis,percentile,income`.
Dataset parse_dataset(std::string_view csv_text);
Dataset load_dataset(const std::filesystem::path& path);

// Serialises with round-trip exact numbers, rows ordered by (year, basis,
// percentile).
std::string serialize_dataset(const Dataset& dataset);

}  // namespace kinc
