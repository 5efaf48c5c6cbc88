#include "kinc/param_table.hpp"

#include <fmt/format.h>

#include "kinc/error.hpp"
#include "kinc/io.hpp"

namespace kinc {

namespace {
constexpr std::string_view kHeader = "year,basis,x_m,delta,kappa,alpha,beta,weighted_sse,converged";
}

std::string serialize_param_table(const std::vector<ParamRow>& rows) {
  std::string out(kHeader);
  out += '\n';
  for (const auto& row : rows) {
    const auto& p = row.params;
    out += fmt::format("{},{},{},{},{},{},{},{},{}\n", row.year, to_string(row.basis),
                       io::fmt9(p.x_m()), io::fmt9(p.delta()), io::fmt9(p.kappa()),
                       io::fmt9(p.alpha()), io::fmt9(p.beta()),
                       row.weighted_sse ? io::fmt9(*row.weighted_sse) : std::string{},
                       row.converged ? (*row.converged ? "true" : "false") : "");
  }
  return out;
}

std::vector<ParamRow> parse_param_table(std::string_view text) {
  std::vector<ParamRow> rows;
  std::size_t line_no = 0;
  bool seen_header = false;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    const auto f = io::split_csv_line(line);
    if (!seen_header) {
      std::string joined;
      for (std::size_t i = 0; i < f.size(); ++i) {
        if (i) joined += ',';
        joined += f[i];
      }
      if (joined != kHeader)
        throw ParseError(fmt::format("line {}: expected header '{}'", line_no, kHeader));
      seen_header = true;
      continue;
    }
    if (f.size() != 9)
      throw ParseError(fmt::format("line {}: expected 9 columns, got {}", line_no, f.size()));
    try {
      std::optional<double> sse;
      if (!f[7].empty()) sse = io::parse_double(f[7]);
      std::optional<bool> converged;
      if (f[8] == "true") converged = true;
      else if (f[8] == "false") converged = false;
      else if (!f[8].empty()) throw ParseError(fmt::format("converged must be true/false, got '{}'", f[8]));
      std::optional<double> listed;
      if (!f[2].empty()) listed = io::parse_double(f[2]);
      rows.push_back(ParamRow{static_cast<int>(io::parse_int(f[0])), parse_basis(f[1]),
                              ModelParams(io::parse_double(f[3]), io::parse_double(f[4]),
                                          io::parse_double(f[5]), io::parse_double(f[6])),
                              sse, converged, listed});
    } catch (const ParseError& e) {
      throw ParseError(fmt::format("line {}: {}", line_no, e.what()));
    } catch (const DomainError& e) {
      throw ValidationError(fmt::format("line {}: {}", line_no, e.what()));
    }
  }
  if (!seen_header) throw ParseError("empty parameter table");
  return rows;
}

std::vector<ParamRow> load_param_table(const std::filesystem::path& path) {
  return parse_param_table(io::read_file(path));
}

}  // namespace kinc
