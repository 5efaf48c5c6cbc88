#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cli/commands.hpp"
#include "kinc/io.hpp"
#include "kinc/param_table.hpp"
#include "support/fixtures.hpp"

using namespace kinc;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "kappa-income");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

// Percentile file generated from the reference parameters for a few years.
fs::path write_synthetic_input(const fs::path& dir) {
  Dataset ds;
  for (int year : {2021, 2022, 2023})
    for (Basis b : {Basis::PreTax, Basis::PostTax})
      ds.add(test::synthetic_series(test::reference_row(year, b).params, year, b));
  const fs::path path = dir / "percentiles.csv";
  io::write_file_atomic(path, serialize_dataset(ds));
  return path;
}

fs::path reference_params() { return test::data_dir() / "reference_params.csv"; }

std::vector<std::vector<std::string>> csv_rows(const fs::path& path) {
  std::istringstream in(io::read_file(path));
  std::vector<std::vector<std::string>> rows;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line))
    if (!line.empty()) {
      const auto fields = io::split_csv_line(line);
      rows.emplace_back(fields.begin(), fields.end());
    }
  return rows;
}

}  // namespace

TEST_CASE("fit writes a parameter table that recovers the generating parameters") {
  const auto dir = test::scratch_dir("cli_fit");
  const auto input = write_synthetic_input(dir);
  const auto r = invoke({"fit", "--input", input.string(), "--out", (dir / "o").string()});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto rows = load_param_table(dir / "o" / "params.csv");
  REQUIRE(rows.size() == 6);
  for (const auto& row : rows) {
    const auto& ref = test::reference_row(row.year, row.basis).params;
    CHECK(row.converged.value());
    CHECK(std::abs(row.params.kappa() / ref.kappa() - 1.0) < 1e-3);
    CHECK(std::abs(row.params.alpha() / ref.alpha() - 1.0) < 1e-3);
  }
  CHECK(fs::exists(dir / "o" / "fits.json"));
  CHECK(csv_rows(dir / "o" / "fit_curves.csv").size() == 6 * 99);
}

TEST_CASE("year and basis filters restrict the fitted units") {
  const auto dir = test::scratch_dir("cli_filter");
  const auto input = write_synthetic_input(dir);
  const auto r = invoke({"fit", "--input", input.string(), "--out", dir.string(), "--year",
                         "2022", "--basis", "post"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto rows = load_param_table(dir / "params.csv");
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].year == 2022);
  CHECK(rows[0].basis == Basis::PostTax);
}

TEST_CASE("exit codes") {
  const auto dir = test::scratch_dir("cli_exit");
  const auto input = write_synthetic_input(dir);

  SUBCASE("empty selection lists the available years") {
    const auto r = invoke({"fit", "--input", input.string(), "--out", dir.string(), "--year", "1990"});
    CHECK(r.code == 3);
    CHECK(r.err.find("2021, 2022, 2023") != std::string::npos);
  }
  SUBCASE("malformed input") {
    io::write_file_atomic(dir / "bad.csv", "year,basis,percentile,income\n2023,pre,1,abc\n");
    CHECK(invoke({"fit", "--input", (dir / "bad.csv").string(), "--out", dir.string()}).code == 2);
  }
  SUBCASE("missing parameters") {
    CHECK(invoke({"inequality", "--out", (dir / "nothing").string()}).code == 2);
  }
  SUBCASE("unknown flag and missing subcommand") {
    CHECK(invoke({"fit", "--bogus"}).code == 2);
    CHECK(invoke({}).code == 2);
  }
  SUBCASE("invalid basis") {
    CHECK(invoke({"fit", "--input", input.string(), "--basis", "gross"}).code == 2);
  }
}

TEST_CASE("sample dumps are byte-identical across runs and carry a sidecar") {
  const auto a = test::scratch_dir("cli_sample_a");
  const auto b = test::scratch_dir("cli_sample_b");
  for (const auto& dir : {a, b}) {
    const auto r = invoke({"sample", "--params", reference_params().string(), "--out", dir.string(),
                           "--year", "2023", "--basis", "pre", "--n", "5000", "--seed", "7"});
    REQUIRE_MESSAGE(r.code == 0, r.err);
  }
  const auto csv = io::read_file(a / "population_2023_pre.csv");
  CHECK(csv == io::read_file(b / "population_2023_pre.csv"));
  CHECK(csv_rows(a / "population_2023_pre.csv").size() == 5000);
  const auto side = nlohmann::json::parse(io::read_file(a / "population_2023_pre.json"));
  CHECK(side["n"] == 5000);
  CHECK(side["seed"] == 7);
}

TEST_CASE("sample accepts a single params JSON") {
  const auto dir = test::scratch_dir("cli_sample_json");
  io::write_file_atomic(dir / "p.json", params_to_json(test::params_2023_pre()));
  const auto r = invoke({"sample", "--params", (dir / "p.json").string(), "--out", dir.string(),
                         "--n", "100"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(csv_rows(dir / "population.csv").size() == 100);
}

TEST_CASE("inequality datasets") {
  const auto dir = test::scratch_dir("cli_ineq");
  const auto r = invoke({"inequality", "--params", reference_params().string(), "--out", dir.string(),
                         "--n", "20000"});
  REQUIRE_MESSAGE(r.code == 0, r.err);

  std::map<std::pair<std::string, std::string>, double> decile_sum;
  for (const auto& row : csv_rows(dir / "decile_shares.csv"))
    decile_sum[{row[0], row[1]}] += io::parse_double(row[4]);
  CHECK(decile_sum.size() == 46);
  for (const auto& [key, sum] : decile_sum) CHECK(sum == doctest::Approx(1.0).epsilon(1e-7));

  const auto plc = csv_rows(dir / "power_law.csv");
  REQUIRE(plc.size() == 46);
  for (const auto& row : plc) {
    const auto& p = test::reference_row(io::parse_int(row[0]), parse_basis(row[1])).params;
    CHECK(row[2] == "power_law_coefficient");
    CHECK(io::parse_double(row[4]) == doctest::Approx(p.alpha() / p.kappa()).epsilon(1e-8));
  }
  CHECK(csv_rows(dir / "gini_theil.csv").size() == 92);
  CHECK(csv_rows(dir / "top_shares.csv").size() == 46 * 4);
  CHECK(r.err.find("lower") != std::string::npos);
}

TEST_CASE("tax command writes K, equivalences and sweeps") {
  const auto dir = test::scratch_dir("cli_tax");
  const auto r = invoke({"tax", "--params", reference_params().string(), "--out", dir.string(), "--n",
                         "200000", "--sweep-band", "2", "--sweep-range", "0.1,0.5", "--sweep-steps", "5"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto eq = nlohmann::json::parse(io::read_file(dir / "tax_equivalence.json"));
  CHECK(eq["case1"]["p3_equivalent"].get<double>() == doctest::Approx(0.686).epsilon(0.01));
  CHECK(eq["case2"]["p2_equivalent"].get<double>() == doctest::Approx(0.50).epsilon(0.02));
  CHECK(eq["case1"]["share_a_direct"].get<double>() ==
        doctest::Approx(eq["case1"]["share_b_direct"].get<double>()).epsilon(1e-6));
  CHECK(csv_rows(dir / "tax_sweep_p1.csv").size() == 81);
  CHECK(csv_rows(dir / "tax_sweep_custom.csv").size() == 5);
  CHECK(fs::exists(dir / "tax_k.json"));
}

TEST_CASE("tax scenario file overrides the default schedule") {
  const auto dir = test::scratch_dir("cli_tax_scenario");
  io::write_file_atomic(dir / "s.json",
                        R"({"cutoffs":{"a1":10000,"a2":50000,"a3":150000},"rates":{"p1":0.1,"p2":0.3,"p3":0.5}})");
  const auto r = invoke({"tax", "--params", reference_params().string(), "--out", dir.string(), "--n",
                         "10000", "--scenario", (dir / "s.json").string()});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto k = nlohmann::json::parse(io::read_file(dir / "tax_k.json"));
  CHECK(k["schedule"]["cutoffs"]["a3"] == 150000);
}

TEST_CASE("report is deterministic and its manifest hashes match") {
  const auto a = test::scratch_dir("cli_report_a");
  const auto b = test::scratch_dir("cli_report_b");
  const auto input = write_synthetic_input(a);
  for (const auto& dir : {a, b}) {
    const auto r = invoke({"report", "--input", input.string(), "--out", (dir / "out").string(),
                           "--n", "20000"});
    REQUIRE_MESSAGE(r.code == 0, r.err);
  }
  const auto text = io::read_file(a / "out" / "manifest.json");
  CHECK(text == io::read_file(b / "out" / "manifest.json"));
  const auto manifest = nlohmann::json::parse(text);
  for (const auto& art : manifest["artifacts"]) {
    const auto rel = art["path"].get<std::string>();
    const auto bytes = io::read_file(a / "out" / rel);
    CHECK(art["sha256"] == cli::sha256_hex(bytes));
    CHECK(bytes == io::read_file(b / "out" / rel));
  }
  CHECK(manifest["figures"].size() == 10);
}

TEST_CASE("sha256 reference digest") {
  CHECK(cli::sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
