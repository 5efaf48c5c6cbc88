#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "kinc/rng.hpp"
#include "kinc/sampler.hpp"
#include "support/fixtures.hpp"

using namespace kinc;

TEST_CASE("counter generator matches the SplitMix64 reference stream") {
  // First outputs of the reference splitmix64 with state 0.
  const CounterRng rng(0);
  CHECK(rng.word(0) == 0xE220A8397B1DCDAFULL);
  CHECK(rng.word(1) == 0x6E789E6AA1B965F4ULL);
  CHECK(rng.word(2) == 0x06C45D188009454FULL);
}

TEST_CASE("uniform draws lie in the open unit interval") {
  const CounterRng rng(42);
  for (std::uint64_t i = 0; i < 100'000; ++i) {
    const double u = rng.uniform_open(i);
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("single draw lies above the threshold") {
  const auto p = test::params_2023_pre();
  for (std::uint64_t seed : {0ULL, 1ULL, 42ULL, 0xFFFFFFFFFFFFFFFFULL}) {
    const auto pop = sample_population(p, 1, seed);
    REQUIRE(pop.size() == 1);
    CHECK(pop.incomes[0] > p.x_m());
  }
}

TEST_CASE("determinism and independence from thread count") {
  const auto p = test::params_2023_pre();
  const auto a = sample_population(p, 200'000, 42, 1);
  const auto b = sample_population(p, 200'000, 42, 4);
  CHECK(a.incomes == b.incomes);
  CHECK(std::is_sorted(a.incomes.begin(), a.incomes.end()));
  CHECK(a.incomes.front() > p.x_m());
  CHECK(population_to_csv(a) == population_to_csv(b));
}

TEST_CASE("different seeds give different values but stable medians") {
  const auto p = test::params_2023_pre();
  const auto a = sample_population(p, 1'000'000, 1);
  const auto b = sample_population(p, 1'000'000, 2);
  CHECK(a.incomes != b.incomes);
  const double ma = a.incomes[a.size() / 2], mb = b.incomes[b.size() / 2];
  CHECK(std::abs(ma - mb) / mb < 0.01);
}

TEST_CASE("each draw inverts the survival function exactly") {
  const auto p = test::params_2023_pre();
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const std::uint64_t index = i * 997;
    const double u = draw_uniform(42, index);
    const double s = draw_income(p, 42, index);
    worst = std::max(worst, std::abs(survival_modified(s, p) - u) / u);
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("empirical survival converges to the model") {
  const auto p = test::params_2023_pre();
  const auto pop = sample_population(p, 1'000'000, 42);
  const double n = static_cast<double>(pop.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    const double model = survival_modified(pop.incomes[i], p);
    // Empirical survival just below and at the i-th order statistic.
    const double above = (n - static_cast<double>(i)) / n;
    const double at = (n - static_cast<double>(i) - 1) / n;
    sup = std::max({sup, std::abs(above - model), std::abs(at - model)});
  }
  CHECK(sup < 0.005);
}

TEST_CASE("population dump and sidecar") {
  const auto p = test::params_2023_pre();
  const auto pop = sample_population(p, 5, 9);
  const auto csv = population_to_csv(pop);
  CHECK(csv.rfind("income\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
  const auto side = population_sidecar_json(pop);
  CHECK(side.find("\"seed\": 9") != std::string::npos);
  CHECK(side.find("\"n\": 5") != std::string::npos);
  CHECK(params_from_json(side) == p);
}
