#include "support/fixtures.hpp"

#include <atomic>
#include <stdexcept>
#include <string>
#include <unistd.h>

namespace kinc::test {

std::filesystem::path data_dir() { return KINC_TEST_DATA_DIR; }

const std::vector<ParamRow>& reference_tables() {
  static const auto rows = load_param_table(data_dir() / "reference_params.csv");
  return rows;
}

const ParamRow& reference_row(int year, Basis basis) {
  for (const auto& r : reference_tables())
    if (r.year == year && r.basis == basis) return r;
  throw std::out_of_range("no table row for " + std::to_string(year));
}

PercentileSeries synthetic_series(const ModelParams& params, int year, Basis basis) {
  std::vector<double> v;
  for (int i = 1; i <= kPercentileCount; ++i) v.push_back(quantile(percentile_survival(i), params));
  return PercentileSeries(year, basis, std::move(v));
}

std::filesystem::path scratch_dir(const char* tag) {
  static std::atomic<int> counter{0};
  auto dir = std::filesystem::temp_directory_path() /
             ("kinc_" + std::string(tag) + "_" + std::to_string(::getpid()) + "_" +
              std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace kinc::test
