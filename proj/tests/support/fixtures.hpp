#pragma once

#include <filesystem>
#include <vector>

#include "kinc/kappa_model.hpp"
#include "kinc/param_table.hpp"
#include "kinc/percentiles.hpp"

namespace kinc::test {

std::filesystem::path data_dir();

// Published reference parameters (23 pre-tax rows then 23 post-tax rows).
const std::vector<ParamRow>& reference_tables();
const ParamRow& reference_row(int year, Basis basis);

inline ModelParams params_2023_pre() { return ModelParams(1.2698, 0.8209, 1.7979, 1.02e-8); }

// Percentiles x_i = quantile(1 - i/100): what the model itself implies.
PercentileSeries synthetic_series(const ModelParams& params, int year = 2023,
                                  Basis basis = Basis::PreTax);

// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const char* tag);

}  // namespace kinc::test
