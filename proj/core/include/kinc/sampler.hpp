#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "kinc/kappa_model.hpp"

namespace kinc {

inline constexpr std::size_t kDefaultPopulationSize = 1'000'000;

// Simulated incomes, sorted ascending, every value above params.x_m().
struct Population {
  std::vector<double> incomes;
  ModelParams params;
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return incomes.size(); }
};

// Survival probability used for draw `index` of stream `seed`.
double draw_uniform(std::uint64_t seed, std::uint64_t index);

// Income produced by draw `index`: quantile(draw_uniform(seed, index)).
double draw_income(const ModelParams& params, std::uint64_t seed, std::uint64_t index);

// Inverse transform sampling of n incomes. `threads` = 0 uses the
// process-wide cap (see parallel.hpp); the result never depends on it.
Population sample_population(const ModelParams& params, std::size_t n, std::uint64_t seed,
                             unsigned threads = 0);

// `income` header then one value per line, ascending, 9 significant digits.
std::string population_to_csv(const Population& pop);
// {"params":{...},"n":...,"seed":...}
std::string population_sidecar_json(const Population& pop);

}  // namespace kinc
