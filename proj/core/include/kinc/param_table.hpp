#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kinc/kappa_model.hpp"
#include "kinc/percentiles.hpp"

namespace kinc {

// One row of the batch-fit table
//   year,basis,x_m,delta,kappa,alpha,beta,weighted_sse,converged
struct ParamRow {
  int year;
  Basis basis;
  ModelParams params;
  std::optional<double> weighted_sse;
  std::optional<bool> converged;
  // x_m as written in the file; informational only.
  std::optional<double> listed_x_m;
};

std::string serialize_param_table(const std::vector<ParamRow>& rows);

// weighted_sse, converged and x_m may be empty. Rows come back in file order.
std::vector<ParamRow> parse_param_table(std::string_view csv_text);
std::vector<ParamRow> load_param_table(const std::filesystem::path& path);

}  // namespace kinc
