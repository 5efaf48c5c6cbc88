#include "kinc/percentiles.hpp"

#include <optional>

#include <fmt/format.h>

#include "kinc/error.hpp"
#include "kinc/io.hpp"

namespace kinc {

std::string_view to_string(Basis basis) { return basis == Basis::PreTax ? "pre" : "post"; }

Basis parse_basis(std::string_view text) {
  if (text == "pre") return Basis::PreTax;
  if (text == "post") return Basis::PostTax;
  throw ParseError(fmt::format("basis must be 'pre' or 'post', got '{}'", text));
}

PercentileSeries::PercentileSeries(int year, Basis basis, std::vector<double> values)
    : year_(year), basis_(basis), values_(std::move(values)) {
  if (values_.size() != kPercentileCount)
    throw ValidationError(fmt::format("{} {}: expected {} percentiles, got {}", year_,
                                      to_string(basis_), kPercentileCount, values_.size()));
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] > 0.0))
      throw ValidationError(fmt::format("{} {}: percentile {} has non-positive income {}",
                                        year_, to_string(basis_), i + 1, values_[i]));
    if (i > 0 && !(values_[i - 1] < values_[i]))
      throw ValidationError(fmt::format(
          "{} {}: percentiles not strictly increasing at index {} ({} >= {})", year_,
          to_string(basis_), i, values_[i - 1], values_[i]));
  }
}

double PercentileSeries::percentile(int i) const {
  if (i < 1 || i > kPercentileCount)
    throw DomainError(fmt::format("percentile index {} outside 1..99", i));
  return values_[static_cast<std::size_t>(i - 1)];
}

bool operator==(const PercentileSeries& a, const PercentileSeries& b) {
  return a.year() == b.year() && a.basis() == b.basis() && a.values() == b.values();
}

double percentile_survival(int i) { return 1.0 - i / 100.0; }

std::vector<SurvivalPoint> survival_points(const PercentileSeries& series) {
  std::vector<SurvivalPoint> points;
  points.reserve(kPercentileCount);
  for (int i = 1; i <= kPercentileCount; ++i)
    points.push_back({series.percentile(i), percentile_survival(i)});
  return points;
}

void Dataset::add(PercentileSeries series) {
  const SeriesKey key{series.year(), series.basis()};
  if (series_.contains(key))
    throw ValidationError(
        fmt::format("duplicate series for {} {}", key.year, to_string(key.basis)));
  series_.emplace(key, std::move(series));
}

const PercentileSeries* Dataset::find(int year, Basis basis) const {
  const auto it = series_.find({year, basis});
  return it == series_.end() ? nullptr : &it->second;
}

std::vector<int> Dataset::years() const {
  std::vector<int> out;
  for (const auto& [key, _] : series_)
    if (out.empty() || out.back() != key.year) out.push_back(key.year);
  return out;
}

std::vector<int> Dataset::missing_years() const {
  const auto present = years();
  std::vector<int> missing;
  for (std::size_t i = 1; i < present.size(); ++i)
    for (int y = present[i - 1] + 1; y < present[i]; ++y) missing.push_back(y);
  return missing;
}

Dataset parse_dataset(std::string_view text) {
  using Slots = std::array<std::optional<double>, kPercentileCount>;
  std::map<SeriesKey, Slots> staged;

  std::size_t line_no = 0;
  bool seen_header = false;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    const auto fields = io::split_csv_line(line);
    if (!seen_header) {
      if (fields.size() != 4 || fields[0] != "year" || fields[1] != "basis" ||
          fields[2] != "percentile" || fields[3] != "income")
        throw ParseError(fmt::format(
            "line {}: expected header 'year,basis,percentile,income'", line_no));
      seen_header = true;
      continue;
    }
    if (fields.size() != 4)
      throw ParseError(
          fmt::format("line {}: expected 4 columns, got {}", line_no, fields.size()));

    int year = 0;
    long long pct = 0;
    double income = 0.0;
    Basis basis{};
    try {
      year = static_cast<int>(io::parse_int(fields[0]));
      basis = parse_basis(fields[1]);
      pct = io::parse_int(fields[2]);
      income = io::parse_double(fields[3]);
    } catch (const ParseError& e) {
      throw ParseError(fmt::format("line {}: {}", line_no, e.what()));
    }
    if (pct < 1 || pct > kPercentileCount)
      throw ParseError(fmt::format("line {}: percentile {} outside 1..99", line_no, pct));

    auto& slot = staged[{year, basis}][static_cast<std::size_t>(pct - 1)];
    if (slot)
      throw ValidationError(fmt::format("line {}: duplicate row for {} {} percentile {}",
                                        line_no, year, to_string(basis), pct));
    slot = income;
  }
  if (!seen_header) throw ParseError("empty file: missing header");

  Dataset dataset;
  for (const auto& [key, slots] : staged) {
    std::vector<double> values;
    values.reserve(kPercentileCount);
    for (std::size_t i = 0; i < slots.size(); ++i) {
      if (!slots[i])
        throw ValidationError(fmt::format("{} {}: missing percentile {}", key.year,
                                          to_string(key.basis), i + 1));
      values.push_back(*slots[i]);
    }
    dataset.add(PercentileSeries(key.year, key.basis, std::move(values)));
  }
  return dataset;
}

Dataset load_dataset(const std::filesystem::path& path) {
  return parse_dataset(io::read_file(path));
}

std::string serialize_dataset(const Dataset& dataset) {
  std::string out = "year,basis,percentile,income\n";
  for (const auto& [key, series] : dataset.series()) {
    for (int i = 1; i <= kPercentileCount; ++i)
      out += fmt::format("{},{},{},{}\n", key.year, to_string(key.basis), i,
                         io::fmt_exact(series.percentile(i)));
  }
  return out;
}

}  // namespace kinc
