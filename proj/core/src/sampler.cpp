#include "kinc/sampler.hpp"

#include <algorithm>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "kinc/io.hpp"
#include "kinc/parallel.hpp"
#include "kinc/rng.hpp"

namespace kinc {

double draw_uniform(std::uint64_t seed, std::uint64_t index) {
  return CounterRng(seed).uniform_open(index);
}

double draw_income(const ModelParams& params, std::uint64_t seed, std::uint64_t index) {
  return quantile(draw_uniform(seed, index), params);
}

Population sample_population(const ModelParams& params, std::size_t n, std::uint64_t seed,
                             unsigned threads) {
  constexpr std::size_t kChunk = 1 << 16;
  Population pop{std::vector<double>(n), params, seed};
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  parallel_for(
      chunks,
      [&](std::size_t c) {
        const std::size_t end = std::min(n, (c + 1) * kChunk);
        for (std::size_t i = c * kChunk; i < end; ++i)
          pop.incomes[i] = draw_income(params, seed, i);
      },
      threads);
  std::sort(pop.incomes.begin(), pop.incomes.end());
  return pop;
}

std::string population_to_csv(const Population& pop) {
  std::string out = "income\n";
  out.reserve(out.size() + pop.incomes.size() * 12);
  for (double s : pop.incomes) {
    out += io::fmt9(s);
    out += '\n';
  }
  return out;
}

std::string population_sidecar_json(const Population& pop) {
  nlohmann::ordered_json j;
  j["params"] = nlohmann::ordered_json::parse(params_to_json(pop.params));
  j["n"] = pop.incomes.size();
  j["seed"] = pop.seed;
  j["generator"] = "splitmix64-counter";
  return j.dump(2);
}

}  // namespace kinc
