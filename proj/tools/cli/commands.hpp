#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "kinc/percentiles.hpp"

namespace kinc::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kInputError = 2,
  kEmptySelection = 3,
  kNumericalFailure = 4,
};

struct RunConfig {
  std::filesystem::path input;   // percentile CSV
  std::filesystem::path params;  // parameter table CSV or params JSON
  std::filesystem::path out = ".";
  double gamma = 1.3;
  std::size_t n = 1'000'000;
  std::uint64_t seed = 42;
  std::vector<int> years;
  std::optional<Basis> basis;
  bool strict = false;
  int multistart = 0;

  // tax
  std::filesystem::path scenario;
  bool cutoffs_from_percentiles = false;
  double case1_x = 0.05;
  double case2_x = 0.05;
  double case2_y = 0.1;
  std::optional<int> sweep_band;
  double sweep_lo = 0.0;
  double sweep_hi = 0.8;
  int sweep_steps = 81;
};

struct Artifact {
  std::filesystem::path path;  // relative to RunConfig::out
  std::string kind;
};

// Each command writes into cfg.out and appends what it wrote to `written`.
// They throw kinc::Error subclasses or CommandError on failure.
void cmd_fit(const RunConfig& cfg, std::ostream& log, std::vector<Artifact>& written);
void cmd_sample(const RunConfig& cfg, std::ostream& log, std::vector<Artifact>& written);
void cmd_inequality(const RunConfig& cfg, std::ostream& log, std::vector<Artifact>& written);
void cmd_tax(const RunConfig& cfg, std::ostream& log, std::vector<Artifact>& written);
void cmd_report(const RunConfig& cfg, std::ostream& log, std::vector<Artifact>& written);

// Error that carries its process exit code.
class CommandError : public std::runtime_error {
 public:
  CommandError(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

// Full command-line entry point; argv[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string sha256_hex(std::string_view bytes);

}  // namespace kinc::cli
