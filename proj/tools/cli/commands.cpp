#include "cli/commands.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <set>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "kinc/error.hpp"
#include "kinc/fitter.hpp"
#include "kinc/inequality.hpp"
#include "kinc/io.hpp"
#include "kinc/parallel.hpp"
#include "kinc/param_table.hpp"
#include "kinc/sampler.hpp"
#include "kinc/tax_engine.hpp"

namespace kinc::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kDefaultTaxYear = 2023;

// JSON numbers follow the same 9-significant-digit rule as the CSV outputs.
double round9(double v) { return io::parse_double(io::fmt9(v)); }

void emit(const RunConfig& cfg, const fs::path& rel, std::string_view contents,
          std::string kind, std::vector<Artifact>& written) {
  io::write_file_atomic(cfg.out / rel, contents);
  written.push_back({rel, std::move(kind)});
}

std::string unit_label(const SeriesKey& key) {
  return fmt::format("{}_{}", key.year, to_string(key.basis));
}

bool selected(const RunConfig& cfg, const SeriesKey& key) {
  if (cfg.basis && *cfg.basis != key.basis) return false;
  return cfg.years.empty() ||
         std::find(cfg.years.begin(), cfg.years.end(), key.year) != cfg.years.end();
}

// Keys matching the year/basis filters, or CommandError(kEmptySelection)
// naming the available years.
std::vector<SeriesKey> select_units(const RunConfig& cfg, const std::vector<SeriesKey>& available,
                                    std::ostream& log) {
  std::vector<SeriesKey> units;
  for (const auto& key : available)
    if (selected(cfg, key)) units.push_back(key);

  std::set<int> years;
  for (const auto& key : available) years.insert(key.year);
  for (int y : cfg.years)
    if (!years.contains(y)) log << fmt::format("warning: year {} not present in input\n", y);

  if (units.empty()) {
    std::vector<std::string> names;
    for (int y : years) names.push_back(std::to_string(y));
    throw CommandError(kEmptySelection,
                       fmt::format("no series match the year/basis filter; available years: {}",
                                   fmt::join(names, ", ")));
  }
  return units;
}

Dataset load_input(const RunConfig& cfg) {
  if (cfg.input.empty()) throw CommandError(kInputError, "--input <percentiles.csv> is required");
  return load_dataset(cfg.input);
}

fs::path params_path(const RunConfig& cfg) {
  return cfg.params.empty() ? cfg.out / "params.csv" : cfg.params;
}

std::vector<ParamRow> load_params(const RunConfig& cfg) {
  const fs::path path = params_path(cfg);
  if (!fs::exists(path))
    throw CommandError(kInputError,
                       fmt::format("missing parameters: '{}' not found (run `fit` or pass --params)",
                                   path.string()));
  if (path.extension() == ".json") {
    const int year = cfg.years.empty() ? 0 : cfg.years.front();
    return {ParamRow{year, cfg.basis.value_or(Basis::PreTax),
                     params_from_json(io::read_file(path)), std::nullopt, std::nullopt,
                     std::nullopt}};
  }
  return load_param_table(path);
}

std::vector<SeriesKey> keys_of(const std::vector<ParamRow>& rows) {
  std::vector<SeriesKey> keys;
  for (const auto& r : rows) keys.push_back({r.year, r.basis});
  return keys;
}

const ParamRow& row_for(const std::vector<ParamRow>& rows, const SeriesKey& key) {
  for (const auto& r : rows)
    if (r.year == key.year && r.basis == key.basis) return r;
  throw CommandError(kEmptySelection,
                     fmt::format("no parameters for {} {}", key.year, to_string(key.basis)));
}

json rates_json(const Rates& r) {
  return {{"p1", round9(r.p1)}, {"p2", round9(r.p2)}, {"p3", round9(r.p3)}};
}

json schedule_json(const TaxSchedule& s) {
  return {{"cutoffs", {{"a1", round9(s.cutoffs.a1)}, {"a2", round9(s.cutoffs.a2)}, {"a3", round9(s.cutoffs.a3)}}},
          {"rates", rates_json(s.rates)}};
}

}  // namespace

void cmd_fit(const RunConfig& cfg, std::ostream& log, std::vector<Artifact>& written) {
  const Dataset dataset = load_input(cfg);
  for (int y : dataset.missing_years())
    log << fmt::format("warning: no data for {} (skipped)\n", y);

  std::vector<SeriesKey> available;
  for (const auto& [key, _] : dataset.series()) available.push_back(key);
  const auto units = select_units(cfg, available, log);

  FitConfig fit_cfg;
  fit_cfg.gamma = cfg.gamma;
  fit_cfg.multistart = cfg.multistart;
  std::vector<std::optional<FitResult>> results(units.size());
  parallel_for(units.size(), [&](std::size_t i) {
    results[i] = fit(*dataset.find(units[i].year, units[i].basis), fit_cfg);
  });

  std::vector<ParamRow> rows;
  json fits = json::array();
  std::string curves = "year,basis,percentile,income,observed_survival,fitted_survival\n";
  int failed = 0;
  for (std::size_t i = 0; i < units.size(); ++i) {
    const auto& r = *results[i];
    const auto& key = units[i];
    rows.push_back({key.year, key.basis, r.params, r.weighted_sse, r.converged, std::nullopt});
    if (!r.converged) {
      ++failed;
      log << fmt::format("warning: fit {} did not converge in {} iterations\n", unit_label(key),
                         r.iterations);
    }
    json entry = json::parse(fit_result_to_json(r));
    entry["year"] = key.year;
    entry["basis"] = std::string(to_string(key.basis));
    fits.push_back(std::move(entry));

    const auto& series = *dataset.find(key.year, key.basis);
    for (int p = 1; p <= kPercentileCount; ++p) {
      const double x = series.percentile(p);
      curves += fmt::format("{},{},{},{},{},{}\n", key.year, to_string(key.basis), p, io::fmt9(x),
                            io::fmt9(percentile_survival(p)),
                            io::fmt9(survival_modified_extended(x, r.params)));
    }
  }

  emit(cfg, "params.csv", serialize_param_table(rows), "param_table", written);
  emit(cfg, "fits.json", fits.dump(2) + "\n", "fit_results", written);
  emit(cfg, "fit_curves.csv", curves, "fit_curves", written);
  log << fmt::format("fitted {} series; {} did not converge\n", units.size(), failed);
  if (failed > 0 && cfg.strict)
    throw CommandError(kNumericalFailure, fmt::format("{} fit(s) did not converge", failed));
}

void cmd_sample(const RunConfig& cfg, std::ostream& log, std::vector<Artifact>& written) {
  const auto rows = load_params(cfg);
  const bool from_json = params_path(cfg).extension() == ".json";
  const auto units = from_json ? keys_of(rows) : select_units(cfg, keys_of(rows), log);
  for (const auto& key : units) {
    const auto pop = sample_population(row_for(rows, key).params, cfg.n, cfg.seed);
    const std::string stem = from_json ? "population" : "population_" + unit_label(key);
    emit(cfg, stem + ".csv", population_to_csv(pop), "population", written);
    emit(cfg, stem + ".json", population_sidecar_json(pop) + "\n", "population_sidecar", written);
    log << fmt::format("sampled {} incomes for {}\n", pop.size(), stem);
  }
}

void cmd_inequality(const RunConfig& cfg, std::ostream& log, std::vector<Artifact>& written) {
  const auto rows = load_params(cfg);
  const auto units = select_units(cfg, keys_of(rows), log);
  std::vector<InequalityReport> reports(units.size());
  // Parallel across units; each population is generated single-threaded.
  parallel_for(units.size(), [&](std::size_t i) {
    const auto pop = sample_population(row_for(rows, units[i]).params, cfg.n, cfg.seed, 1);
    reports[i] = report(pop, units[i].year, units[i].basis);
  });
  emit(cfg, "gini_theil.csv", gini_theil_csv(reports), "gini_theil", written);
  emit(cfg, "decile_shares.csv", decile_shares_csv(reports), "decile_shares", written);
  emit(cfg, "top_shares.csv", top_shares_csv(reports), "top_shares", written);
  emit(cfg, "power_law.csv", power_law_csv(reports), "power_law", written);
  log << fmt::format("inequality metrics for {} series (note: {})\n", units.size(), kLowerTailCaveat);
}

void cmd_tax(const RunConfig& cfg, std::ostream& log, std::vector<Artifact>& written) {
  const auto rows = load_params(cfg);
  const SeriesKey key{cfg.years.empty() ? kDefaultTaxYear : cfg.years.front(),
                      cfg.basis.value_or(Basis::PreTax)};
  const bool from_json = params_path(cfg).extension() == ".json";
  const ParamRow& row = from_json ? rows.front() : row_for(rows, key);

  TaxSchedule sched = schedule_2023();
  if (!cfg.scenario.empty()) {
    sched = schedule_from_json(io::read_file(cfg.scenario));
  } else if (cfg.cutoffs_from_percentiles) {
    const Dataset dataset = load_input(cfg);
    const auto* series = dataset.find(key.year, key.basis);
    if (!series)
      throw CommandError(kEmptySelection, fmt::format("no percentile series for {} {}", key.year,
                                                      to_string(key.basis)));
    sched.cutoffs = cutoffs_from_series(*series);
  }
  sched.validate();

  const auto pop = sample_population(row.params, cfg.n, cfg.seed);
  const auto k = k_coefficients(pop.incomes, sched.cutoffs);
  const double baseline = tax_share_direct(pop.incomes, sched);

  json kj;
  kj["year"] = key.year;
  kj["basis"] = std::string(to_string(key.basis));
  kj["n"] = cfg.n;
  kj["seed"] = cfg.seed;
  kj["schedule"] = schedule_json(sched);
  kj["k"] = {{"k1", round9(k.k1)}, {"k2", round9(k.k2)}, {"k3", round9(k.k3)},
             {"n1", k.n1}, {"n2", k.n2}, {"n3", k.n3}, {"total_income", round9(k.total_income)}};
  kj["k1_over_k3"] = round9(k.k1 / k.k3);
  kj["baseline_share_direct"] = round9(baseline);
  kj["baseline_share_linear"] = round9(linear_tax_share(k, sched.rates));
  emit(cfg, "tax_k.json", kj.dump(2) + "\n", "tax_k", written);

  auto both = [&](const Rates& a, const Rates& b) {
    TaxSchedule sa = sched, sb = sched;
    sa.rates = a;
    sb.rates = b;
    return json{{"schedule_a", schedule_json(sa)},
                {"schedule_b", schedule_json(sb)},
                {"share_a_direct", round9(tax_share_direct(pop.incomes, sa))},
                {"share_b_direct", round9(tax_share_direct(pop.incomes, sb))},
                {"common_share", round9(linear_tax_share(k, a))}};
  };

  const Rates& base = sched.rates;
  const Rates raised{base.p1 + cfg.case1_x, base.p2, base.p3};
  const double p3 = equivalent_rate_case1(k, raised, cfg.case1_x, Band::Third, Band::First);
  json eq;
  eq["case1"] = both(raised, {base.p1, base.p2, p3});
  eq["case1"]["x"] = cfg.case1_x;
  eq["case1"]["p3_equivalent"] = round9(p3);
  eq["case1"]["slope_k1_over_k3"] = round9(k.k1 / k.k3);

  const double p2 = equivalent_rate_case2(k, base, cfg.case2_x, cfg.case2_y);
  eq["case2"] = both({base.p1 + cfg.case2_x, base.p2, base.p3}, {base.p1, p2, p2 + cfg.case2_y});
  eq["case2"]["x"] = cfg.case2_x;
  eq["case2"]["y"] = cfg.case2_y;
  eq["case2"]["p2_equivalent"] = round9(p2);
  emit(cfg, "tax_equivalence.json", eq.dump(2) + "\n", "tax_equivalence", written);

  const auto sweep = [&](const SweepSpec& spec, const char* name) {
    emit(cfg, name, sweep_to_csv(tax_share_sweep(pop.incomes, sched, spec)), "tax_sweep", written);
  };
  sweep({Band::First, 0.0, 0.8, 81, {}}, "tax_sweep_p1.csv");
  sweep({Band::Third, 0.0, 1.0, 101, {}}, "tax_sweep_p3.csv");
  if (cfg.case2_y >= 0.0 && cfg.case2_y < 1.0)
    sweep({Band::Second, 0.0, 1.0 - cfg.case2_y, 91, cfg.case2_y}, "tax_sweep_p2_coupled.csv");
  if (cfg.sweep_band)
    sweep({parse_band(*cfg.sweep_band), cfg.sweep_lo, cfg.sweep_hi, cfg.sweep_steps, {}},
          "tax_sweep_custom.csv");

  log << fmt::format("tax {} {}: K = ({:.4f}, {:.4f}, {:.4f}), share {:.4f}; case1 p3 = {:.4f}; case2 p2 = {:.4f}\n",
                     key.year, to_string(key.basis), k.k1, k.k2, k.k3, baseline, p3, p2);
}

namespace {

struct FigureFamily {
  const char* id;
  std::vector<const char*> kinds;
};

// One entry per rendered figure; families whose datasets were not produced
// are left out of the manifest.
const std::vector<FigureFamily>& figure_families() {
  static const std::vector<FigureFamily> families{
      {"percentile_curves", {"percentiles"}},
      {"fit_2023", {"fit_curves"}},
      {"fit_2023_intervals", {"fit_curves"}},
      {"gini_theil", {"gini_theil"}},
      {"decile_shares", {"decile_shares"}},
      {"decile_shares_separate", {"decile_shares"}},
      {"top_shares", {"top_shares"}},
      {"top_shares_separate", {"top_shares"}},
      {"power_law_coefficient", {"power_law"}},
      {"tax_comparisons", {"tax_sweep", "tax_equivalence"}},
  };
  return families;
}

}  // namespace

void cmd_report(const RunConfig& cfg, std::ostream& log, std::vector<Artifact>& written) {
  RunConfig staged = cfg;
  if (!cfg.input.empty()) {
    const Dataset dataset = load_input(cfg);
    emit(cfg, "percentiles.csv", serialize_dataset(dataset), "percentiles", written);
    cmd_fit(cfg, log, written);
    staged.params.clear();
  }
  cmd_inequality(staged, log, written);

  const auto rows = load_params(staged);
  const SeriesKey tax_key{cfg.years.empty() ? kDefaultTaxYear : cfg.years.front(),
                          cfg.basis.value_or(Basis::PreTax)};
  const bool have_tax_unit = std::any_of(rows.begin(), rows.end(), [&](const ParamRow& r) {
    return r.year == tax_key.year && r.basis == tax_key.basis;
  });
  if (have_tax_unit) {
    RunConfig tax_cfg = staged;
    tax_cfg.years = {tax_key.year};
    tax_cfg.basis = tax_key.basis;
    cmd_tax(tax_cfg, log, written);
  } else {
    log << fmt::format("warning: no parameters for {} {}; tax analysis skipped\n", tax_key.year,
                       to_string(tax_key.basis));
  }

  json manifest;
  manifest["generator"] = "kappa-income";
  manifest["config"] = {{"gamma", cfg.gamma}, {"n", cfg.n}, {"seed", cfg.seed}};
  manifest["caveats"] = json::array({std::string(kLowerTailCaveat)});
  json artifacts = json::array();
  std::map<std::string, std::vector<std::string>> by_kind;
  for (const auto& a : written) {
    const auto bytes = io::read_file(cfg.out / a.path);
    artifacts.push_back({{"path", a.path.generic_string()}, {"kind", a.kind}, {"sha256", sha256_hex(bytes)}});
    by_kind[a.kind].push_back(a.path.generic_string());
  }
  manifest["artifacts"] = std::move(artifacts);
  json figures = json::array();
  for (const auto& fam : figure_families()) {
    json datasets = json::array();
    bool complete = true;
    for (const char* kind : fam.kinds) {
      const auto it = by_kind.find(kind);
      if (it == by_kind.end()) {
        complete = false;
        break;
      }
      for (const auto& p : it->second) datasets.push_back(p);
    }
    if (complete) figures.push_back({{"id", fam.id}, {"datasets", std::move(datasets)}});
  }
  manifest["figures"] = std::move(figures);
  io::write_file_atomic(cfg.out / "manifest.json", manifest.dump(2) + "\n");
  log << fmt::format("wrote manifest with {} artifacts\n", written.size());
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fit, simulate and analyse kappa-generalised income distributions", "kappa-income"};
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  std::string basis;
  std::vector<double> sweep_range;
  app.add_option("--input", cfg.input, "Percentile CSV (year,basis,percentile,income)");
  app.add_option("--out", cfg.out, "Output directory")->capture_default_str();
  app.add_option("--gamma", cfg.gamma, "Weight exponent")->capture_default_str()->check(CLI::NonNegativeNumber);
  app.add_option("--n", cfg.n, "Simulated population size")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed, "Generator seed")->capture_default_str();
  app.add_option("--year", cfg.years, "Year filter (repeatable or comma separated)")->delimiter(',');
  app.add_option("--basis", basis, "Basis filter")->check(CLI::IsMember({"pre", "post"}));
  app.add_flag("--strict", cfg.strict, "Exit 4 if any fit fails to converge");

  auto* fit_cmd = app.add_subcommand("fit", "Fit every selected series; writes params.csv");
  auto* sample_cmd = app.add_subcommand("sample", "Dump simulated populations");
  auto* ineq_cmd = app.add_subcommand("inequality", "Inequality metric time series");
  auto* tax_cmd = app.add_subcommand("tax", "K coefficients, equivalences and sweeps");
  auto* report_cmd = app.add_subcommand("report", "Full pipeline plus manifest.json");

  for (auto* sub : {fit_cmd, report_cmd})
    sub->add_option("--multistart", cfg.multistart, "Extra perturbed starts per fit")->check(CLI::NonNegativeNumber);
  for (auto* sub : {sample_cmd, ineq_cmd, tax_cmd, report_cmd})
    sub->add_option("--params", cfg.params, "Parameter table CSV or params JSON");
  for (auto* sub : {tax_cmd, report_cmd}) {
    sub->add_option("--scenario", cfg.scenario, "Scenario JSON with cutoffs and rates");
    sub->add_flag("--cutoffs-from-percentiles", cfg.cutoffs_from_percentiles,
                  "Use the 1st/85th/95th percentiles of --input as cut-offs");
    sub->add_option("--case1-x", cfg.case1_x, "Case 1 increase in p1")->capture_default_str();
    sub->add_option("--case2-x", cfg.case2_x, "Case 2 increase in p1")->capture_default_str();
    sub->add_option("--case2-y", cfg.case2_y, "Case 2 offset p3 - p2")->capture_default_str();
    sub->add_option("--sweep-band", cfg.sweep_band, "Band (1-3) for an extra sweep")->check(CLI::Range(1, 3));
    sub->add_option("--sweep-range", sweep_range, "Extra sweep range lo,hi")->delimiter(',')->expected(2);
    sub->add_option("--sweep-steps", cfg.sweep_steps, "Extra sweep grid points")->capture_default_str();
  }

  std::vector<std::string> argv_tail(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  std::reverse(argv_tail.begin(), argv_tail.end());
  try {
    app.parse(argv_tail);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }
  if (!basis.empty()) cfg.basis = parse_basis(basis);
  if (sweep_range.size() == 2) {
    cfg.sweep_lo = sweep_range[0];
    cfg.sweep_hi = sweep_range[1];
  }

  try {
    fs::create_directories(cfg.out);
    std::vector<Artifact> written;
    if (fit_cmd->parsed()) cmd_fit(cfg, err, written);
    else if (sample_cmd->parsed()) cmd_sample(cfg, err, written);
    else if (ineq_cmd->parsed()) cmd_inequality(cfg, err, written);
    else if (tax_cmd->parsed()) cmd_tax(cfg, err, written);
    else if (report_cmd->parsed()) cmd_report(cfg, err, written);
    for (const auto& a : written) out << (cfg.out / a.path).string() << '\n';
    return kOk;
  } catch (const CommandError& e) {
    err << "error: " << e.what() << '\n';
    return e.code();
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const DegenerateInput& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace kinc::cli
