#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sramdp/io.hpp"
#include "sramdp/privacy.hpp"
#include "testutil.hpp"

using testutil::CliResult;
using testutil::run_cli;

namespace {

const std::string kCli = SRAMDP_CLI_PATH;

const char* kBaseConfig = R"({
  "width": 8,
  "pattern": "F1",
  "epsilon": "ln3",
  "dataset": {"kind": "gaussian", "mu": 125, "sigma": 20, "count": 150},
  "recovery": {"algorithms": ["em"]},
  "seed": 7
})";

}  // namespace

TEST_CASE("dataset generation writes headers and follows the seed") {
  const CliResult a = run_cli(kCli, "gen-data --count 50 --seed 9");
  REQUIRE(a.exit_code == 0);
  const std::vector<std::string> lines = testutil::split_lines(a.out);
  REQUIRE(lines.size() == 51);
  CHECK(lines[0] == "value");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    CHECK(std::stoul(lines[i]) <= 255);
  }

  const CliResult b = run_cli(kCli, "gen-data --count 50 --seed 9");
  CHECK(a.out == b.out);
  const CliResult c = run_cli(kCli, "gen-data --count 50 --seed 10");
  CHECK(a.out != c.out);

  testutil::TempDir dir;
  const std::string grid_path = dir.file("grid.csv");
  const CliResult grid =
      run_cli(kCli, "gen-data --kind grid --count 20 --seed 3 --out '" +
                        grid_path + "'");
  REQUIRE(grid.exit_code == 0);
  CHECK(grid.out.empty());
  const std::vector<std::string> grid_lines =
      testutil::split_lines(testutil::read_file(grid_path));
  REQUIRE(grid_lines.size() == 21);
  CHECK(grid_lines[0] == "x,y");

  CHECK(run_cli(kCli, "gen-data --kind bogus").exit_code == 2);
  CHECK(run_cli(kCli, "gen-data --count 0").exit_code == 2);
  CHECK(run_cli(kCli, "gen-data --clip 200:100").exit_code == 2);
}

TEST_CASE("generate, perturb and recover chain through files") {
  testutil::TempDir dir;
  const std::string config_path = dir.file("config.json");
  testutil::write_file(config_path, kBaseConfig);

  const std::string data_path = dir.file("data.csv");
  REQUIRE(run_cli(kCli, "gen-data --count 400 --seed 7 --out '" + data_path +
                            "'").exit_code == 0);

  const std::string perturbed_path = dir.file("perturbed.csv");
  const CliResult perturbed =
      run_cli(kCli, "perturb --config '" + config_path + "' --input '" +
                        data_path + "' --out '" + perturbed_path + "'");
  REQUIRE(perturbed.exit_code == 0);

  const std::vector<std::string> rows =
      testutil::split_lines(testutil::read_file(perturbed_path));
  REQUIRE(rows.size() == 401);
  CHECK(rows[0] == "input,output,pattern_index");
  int flipped_rows = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto fields = sramdp::io::split_csv_line(rows[i]);
    REQUIRE(fields.size() == 3);
    const std::uint32_t in = std::stoul(fields[0]);
    const std::uint32_t out = std::stoul(fields[1]);
    // The profile only touches the three least significant bits; named
    // profiles run with the identity shuffle, so exactly one pattern.
    CHECK((in >> 3) == (out >> 3));
    CHECK(fields[2] == "0");
    if (in != out) ++flipped_rows;
  }
  CHECK(flipped_rows > 100);  // the channel is far from silent

  const std::string profile_path = dir.file("profile.json");
  const double rate = sramdp::f_for_epsilon(std::log(3.0), 3);
  testutil::write_file(
      profile_path,
      std::string(R"({"f": [0, 0, 0, 0, 0, )") +
          sramdp::io::format_double(rate) + ", " +
          sramdp::io::format_double(rate) + ", " +
          sramdp::io::format_double(rate) + "]}");

  const std::string estimate_path = dir.file("estimate.csv");
  const CliResult recovered = run_cli(
      kCli, "recover --algo em --f-profile '" + profile_path + "' --obs '" +
                perturbed_path + "' --out '" + estimate_path + "'");
  REQUIRE(recovered.exit_code == 0);

  const std::vector<std::string> est_rows =
      testutil::split_lines(testutil::read_file(estimate_path));
  REQUIRE(est_rows.size() == 257);
  CHECK(est_rows[0] == "value,probability");
  double total = 0.0;
  for (std::size_t i = 1; i < est_rows.size(); ++i) {
    const auto fields = sramdp::io::split_csv_line(est_rows[i]);
    REQUIRE(fields.size() == 2);
    CHECK(std::stoul(fields[0]) == i - 1);
    const double p = std::stod(fields[1]);
    CHECK(p >= 0.0);
    total += p;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));

  // A candidate range restricts the estimate's support.  The range must
  // cover every observation's intact bits, so this leg uses inputs
  // clipped inside the range (outputs keep the intact top bits).
  const std::string clipped_path = dir.file("clipped.csv");
  REQUIRE(run_cli(kCli, "gen-data --mu 120 --sigma 6 --clip 104:135 "
                        "--count 300 --seed 8 --out '" +
                            clipped_path + "'").exit_code == 0);
  const std::string clipped_perturbed_path = dir.file("clipped_perturbed.csv");
  REQUIRE(run_cli(kCli, "perturb --config '" + config_path + "' --input '" +
                            clipped_path + "' --out '" +
                            clipped_perturbed_path + "'").exit_code == 0);
  const CliResult ranged = run_cli(
      kCli, "recover --algo em --f-profile '" + profile_path + "' --obs '" +
                clipped_perturbed_path + "' --omega 100:140");
  REQUIRE(ranged.exit_code == 0);
  CHECK(testutil::split_lines(ranged.out).size() == 42);
}

TEST_CASE("the error-distribution table is exact") {
  const CliResult result = run_cli(kCli, "pmf --f 0.5");
  REQUIRE(result.exit_code == 0);
  CHECK(result.out == "a,probability\n-1,0.125\n0,0.75\n1,0.125\n");

  const CliResult zero = run_cli(kCli, "pmf --f 0,0");
  REQUIRE(zero.exit_code == 0);
  CHECK(zero.out == "a,probability\n-3,0\n-2,0\n-1,0\n0,1\n1,0\n2,0\n3,0\n");

  CHECK(run_cli(kCli, "pmf --f 0.5 --pattern F1 --epsilon ln3").exit_code == 2);
  CHECK(run_cli(kCli, "pmf").exit_code == 2);
  CHECK(run_cli(kCli, "pmf --f 1.5").exit_code == 2);
}

TEST_CASE("expected-loss summaries match the closed form") {
  const CliResult result = run_cli(kCli, "ul --f 0,0.5");
  REQUIRE(result.exit_code == 0);
  const nlohmann::json j = nlohmann::json::parse(result.out);
  CHECK(j.at("ul").get<double>() == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(j.at("epsilon_total").get<double>() ==
        doctest::Approx(std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("calibration solves budget to rate to voltage") {
  const CliResult spread = run_cli(kCli, "calibrate --epsilon ln3 --cells 3");
  REQUIRE(spread.exit_code == 0);
  const nlohmann::json j = nlohmann::json::parse(spread.out);
  CHECK(j.at("epsilon").get<double>() == std::log(3.0));
  CHECK(j.at("z") == 3);
  CHECK(j.at("f").get<double>() == 0.8189171263722478);
  // The wanted rate exceeds the calibrated band; the lowest supported
  // voltage is the closest operating point.
  CHECK(j.at("voltage").get<double>() == 0.5);
  CHECK(j.at("f_at_voltage").get<double>() == 0.8157);

  const CliResult inband = run_cli(kCli, "calibrate --epsilon 2.43 --cells 4");
  REQUIRE(inband.exit_code == 0);
  const nlohmann::json k = nlohmann::json::parse(inband.out);
  const double f = k.at("f").get<double>();
  const double voltage = k.at("voltage").get<double>();
  CHECK(f == doctest::Approx(0.7052).epsilon(1e-3));
  CHECK(voltage > 0.54);
  CHECK(voltage < 0.56);
  CHECK(k.at("f_at_voltage").get<double>() == doctest::Approx(f).epsilon(1e-9));

  CHECK(run_cli(kCli, "calibrate --epsilon banana").exit_code == 2);
  CHECK(run_cli(kCli, "calibrate").exit_code == 2);  // --epsilon is required
}

TEST_CASE("privacy reports expose per-bit budgets") {
  testutil::TempDir dir;
  const std::string config_path = dir.file("config.json");
  testutil::write_file(config_path, kBaseConfig);

  const CliResult report =
      run_cli(kCli, "privacy-report --config '" + config_path + "'");
  REQUIRE(report.exit_code == 0);
  const nlohmann::json j = nlohmann::json::parse(report.out);
  CHECK(j.at("epsilon_total").get<double>() ==
        doctest::Approx(std::log(3.0)).epsilon(1e-9));
  REQUIRE(j.at("per_bit").size() == 8);
  CHECK(j.at("per_bit")[0].at("epsilon").is_null());
  CHECK(j.at("per_bit")[7].at("epsilon").is_number());
  CHECK_FALSE(j.contains("drift_bound"));

  const CliResult drifted = run_cli(
      kCli, "privacy-report --config '" + config_path +
                "' --alpha 1.02 --intact-as-infinite");
  REQUIRE(drifted.exit_code == 0);
  const nlohmann::json k = nlohmann::json::parse(drifted.out);
  CHECK(k.at("per_bit")[0].at("epsilon") == "inf");
  CHECK(k.at("drift_bound").get<double>() ==
        doctest::Approx(3.0 * std::log(1.04)).epsilon(1e-9));
}

TEST_CASE("experiment pipelines emit deterministic reports") {
  testutil::TempDir dir;
  const std::string config_path = dir.file("config.json");
  testutil::write_file(config_path, kBaseConfig);

  const CliResult a =
      run_cli(kCli, "run-experiment --config '" + config_path + "'");
  REQUIRE(a.exit_code == 0);
  const CliResult b =
      run_cli(kCli, "run-experiment --config '" + config_path + "'");
  REQUIRE(b.exit_code == 0);
  CHECK(a.out == b.out);  // wall-clock noise goes to stderr only
  CHECK(a.err.find("runtime:") != std::string::npos);

  const nlohmann::json j = nlohmann::json::parse(a.out);
  CHECK(j.at("count") == 150);
  CHECK(j.at("seed") == 7);
  CHECK(j.at("z") == 3);
  CHECK(j.at("recovery")[0].at("algo") == "em");

  // --seed overrides the config; artifacts land in --out-dir.
  const std::string art_dir = dir.file("artifacts");
  const CliResult seeded = run_cli(
      kCli, "run-experiment --config '" + config_path + "' --seed 99 " +
                "--out-dir '" + art_dir + "'");
  REQUIRE(seeded.exit_code == 0);
  CHECK(nlohmann::json::parse(seeded.out).at("seed") == 99);
  CHECK(std::filesystem::exists(art_dir + "/records.csv"));
  CHECK(std::filesystem::exists(art_dir + "/histogram.csv"));
  CHECK(std::filesystem::exists(art_dir + "/result.json"));
  CHECK(testutil::read_file(art_dir + "/result.json") == seeded.out);
}

TEST_CASE("mechanism-versus-reference comparisons run end to end") {
  testutil::TempDir dir;
  const std::string config_path = dir.file("config.json");
  testutil::write_file(config_path, kBaseConfig);

  const CliResult a =
      run_cli(kCli, "compare-rr --config '" + config_path + "'");
  REQUIRE(a.exit_code == 0);
  const CliResult b =
      run_cli(kCli, "compare-rr --config '" + config_path + "'");
  CHECK(a.out == b.out);

  const nlohmann::json j = nlohmann::json::parse(a.out);
  CHECK(j.at("sram").at("count") == 150);
  CHECK(j.at("rr").at("count") == 150);
  CHECK(j.at("sram").at("epsilon_total").get<double>() ==
        doctest::Approx(j.at("rr").at("epsilon_total").get<double>())
            .epsilon(1e-12));
  CHECK(j.at("output_tv").get<double>() >= 0.0);
}

TEST_CASE("exit codes separate configuration from numeric failures") {
  testutil::TempDir dir;

  // Configuration problems, including command line parse errors: 2.
  CHECK(run_cli(kCli, "").exit_code == 2);
  CHECK(run_cli(kCli, "no-such-command").exit_code == 2);
  CHECK(run_cli(kCli, "gen-data --bogus-flag 1").exit_code == 2);
  CHECK(run_cli(kCli, "run-experiment").exit_code == 2);  // missing --config
  CHECK(run_cli(kCli, "perturb --input '" + dir.file("missing.csv") +
                          "' --config '" + dir.file("missing.json") + "'")
            .exit_code == 2);

  const std::string bad_config = dir.file("bad.json");
  testutil::write_file(bad_config, R"({"pattern": "F1", "epsilon": 1, "x": 1})");
  CHECK(run_cli(kCli, "run-experiment --config '" + bad_config + "'")
            .exit_code == 2);

  CHECK(run_cli(kCli, "--help").exit_code == 0);
  CHECK(run_cli(kCli, "gen-data --help").exit_code == 0);

  // Numeric failures: 3.
  const std::string profile_path = dir.file("profile.json");
  testutil::write_file(profile_path, R"({"f": [0.9, 0.9, 0.9, 0.9]})");
  const std::string obs_path = dir.file("obs.csv");
  std::string obs = "output\n";
  for (int i = 0; i < 16; ++i) obs += std::to_string(i) + "\n";
  testutil::write_file(obs_path, obs);

  // A positive-but-unreachable threshold forces a non-converged stop.
  const CliResult stalled = run_cli(
      kCli, "recover --algo em --f-profile '" + profile_path + "' --obs '" +
                obs_path + "' --delta 1e-300 --max-iter 1");
  CHECK(stalled.exit_code == 3);
  CHECK(stalled.err.find("numeric error") != std::string::npos);

  // A non-positive threshold is a configuration mistake, not numeric.
  CHECK(run_cli(kCli, "recover --algo em --f-profile '" + profile_path +
                          "' --obs '" + obs_path + "' --delta 0")
            .exit_code == 2);

  const CliResult infeasible = run_cli(
      kCli, "recover --algo clr --f-profile '" + profile_path + "' --obs '" +
                obs_path + "' --moment 1=500");
  CHECK(infeasible.exit_code == 3);

  // Misuse of recovery flags: 2.
  CHECK(run_cli(kCli, "recover --algo em --f-profile '" + profile_path +
                          "' --obs '" + obs_path + "' --moment 1=5")
            .exit_code == 2);
  CHECK(run_cli(kCli, "recover --algo bogus --f-profile '" + profile_path +
                          "' --obs '" + obs_path + "'")
            .exit_code == 2);
  CHECK(run_cli(kCli, "recover --algo clr --f-profile '" + profile_path +
                          "' --obs '" + obs_path + "' --moment nonsense")
            .exit_code == 2);
}
