// Command line front end for the low-voltage-SRAM privacy mechanism:
// dataset generation, perturbation, recovery, privacy and utility
// reports, and full experiment pipelines.
//
// Exit codes: 0 success, 2 configuration error, 3 numeric failure
// (non-convergence, infeasible constraints, degenerate inputs).

#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include <nlohmann/json.hpp>

#include "sramdp/cellspec.hpp"
#include "sramdp/errors.hpp"
#include "sramdp/harness.hpp"
#include "sramdp/io.hpp"
#include "sramdp/mechanism.hpp"
#include "sramdp/privacy.hpp"
#include "sramdp/recovery.hpp"
#include "sramdp/rng.hpp"
#include "sramdp/utility.hpp"
#include "sramdp/word.hpp"

namespace {

using nlohmann::ordered_json;
using namespace sramdp;

// Shared flags every subcommand understands.
struct GlobalArgs {
  std::optional<std::uint64_t> seed;
  std::string config_path;
  std::string out_dir;
};

void add_global_flags(CLI::App* cmd, GlobalArgs* args) {
  cmd->add_option("--seed", args->seed, "Master seed (overrides the config)");
  cmd->add_option("--config", args->config_path,
                  "Experiment config JSON file");
  cmd->add_option("--out-dir", args->out_dir,
                  "Artifact directory (overrides the config)");
}

ExperimentConfig load_config(const GlobalArgs& args, bool required) {
  ExperimentConfig config;
  if (!args.config_path.empty()) {
    config = experiment_config_from_json_file(args.config_path);
  } else if (required) {
    throw ConfigError("this subcommand needs --config <json>");
  }
  if (args.seed) config.seed = *args.seed;
  if (!args.out_dir.empty()) config.out_dir = args.out_dir;
  return config;
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
  } else {
    io::write_file(out_path, content);
  }
}

std::vector<double> parse_rate_list(const std::string& text) {
  std::vector<double> rates;
  std::stringstream ss(text);
  std::string field;
  while (std::getline(ss, field, ',')) {
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(field, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != field.size()) {
      throw ConfigError("cannot parse rate '" + field + "' in '" + text + "'");
    }
    rates.push_back(value);
  }
  if (rates.empty()) {
    throw ConfigError("empty rate list");
  }
  return rates;
}

std::pair<std::uint32_t, std::uint32_t> parse_range(const std::string& text) {
  const std::size_t colon = text.find(':');
  if (colon == std::string::npos) {
    throw ConfigError("range '" + text + "' must look like lo:hi");
  }
  try {
    const unsigned long lo = std::stoul(text.substr(0, colon));
    const unsigned long hi = std::stoul(text.substr(colon + 1));
    return {static_cast<std::uint32_t>(lo), static_cast<std::uint32_t>(hi)};
  } catch (const std::exception&) {
    throw ConfigError("range '" + text + "' must look like lo:hi");
  }
}

// Profile given directly on the command line (--f) or as a named
// pattern plus epsilon; exactly one form is required.
FailureProfile profile_from_flags(const std::string& f_list,
                                  const std::string& pattern,
                                  const std::string& epsilon) {
  if (!f_list.empty()) {
    if (!pattern.empty() || !epsilon.empty()) {
      throw ConfigError("give either --f or --pattern/--epsilon, not both");
    }
    return FailureProfile(parse_rate_list(f_list));
  }
  if (pattern.empty() || epsilon.empty()) {
    throw ConfigError("give either --f or both --pattern and --epsilon");
  }
  return named_pattern(pattern, parse_epsilon(epsilon));
}

// {"f": [...]} or a bare JSON array, rates MSB first.
FailureProfile profile_from_json_file(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(io::read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": not valid JSON: " + e.what());
  }
  const nlohmann::json* rates = &j;
  if (j.is_object()) {
    if (!j.contains("f")) {
      throw ConfigError(path + ": expected an object with an \"f\" array");
    }
    rates = &j.at("f");
  }
  if (!rates->is_array()) {
    throw ConfigError(path + ": the profile must be an array of rates");
  }
  std::vector<double> f;
  for (const nlohmann::json& r : *rates) {
    if (!r.is_number()) {
      throw ConfigError(path + ": profile rates must be numbers");
    }
    f.push_back(r.get<double>());
  }
  return FailureProfile(std::move(f));
}

int run_gen_data(const GlobalArgs& globals, const std::string& kind,
                 double mu, double sigma, int count, int width,
                 const std::string& clip, const std::string& out) {
  const std::uint64_t seed = globals.seed.value_or(1);
  std::ostringstream csv;
  if (kind == "gaussian") {
    std::uint32_t lo = 0;
    std::uint32_t hi = width == 32 ? 0xffffffffu : (1u << width) - 1u;
    if (!clip.empty()) std::tie(lo, hi) = parse_range(clip);
    const std::vector<std::uint32_t> values =
        gen_gaussian(mu, sigma, count, width, lo, hi,
                     derive_seed(seed, SeedStream::kData));
    csv << "value\n";
    for (std::uint32_t v : values) csv << v << "\n";
  } else if (kind == "grid") {
    const std::vector<GridPoint> points =
        gen_grid(count, derive_seed(seed, SeedStream::kData));
    csv << "x,y\n";
    for (const GridPoint& p : points) csv << p.x << ',' << p.y << "\n";
  } else {
    throw ConfigError("unknown dataset kind '" + kind +
                      "' (expected gaussian or grid)");
  }
  emit(out, csv.str());
  return 0;
}

int run_perturb(const GlobalArgs& globals, const std::string& input,
                const std::string& out) {
  ExperimentConfig config = load_config(globals, /*required=*/true);
  const std::vector<std::uint32_t> values =
      io::read_value_column(input, {"value"});
  for (std::uint32_t v : values) {
    Word::encode(v, config.width);  // validates the range
  }
  if (config.mode == FailureMode::kChip && config.chip_words == 0) {
    config.chip_words = static_cast<int>(values.size());
  }
  Mechanism mechanism = build_mechanism(config);
  MechanismStreams streams{
      Rng(derive_seed(config.seed, SeedStream::kPattern)),
      Rng(derive_seed(config.seed, SeedStream::kFailure)),
      Rng(derive_seed(config.seed, SeedStream::kNoise)),
  };
  std::ostringstream csv;
  csv << "input,output,pattern_index\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    const PerturbResult result =
        mechanism.perturb_at(Word::encode(values[i], config.width), i, streams);
    csv << values[i] << ',' << result.output.decode() << ','
        << result.pattern_index << "\n";
  }
  emit(out, csv.str());
  return 0;
}

int run_recover(const std::string& algo, const std::string& profile_path,
                const std::string& obs_path, const std::string& omega_text,
                double delta, int max_iterations,
                const std::vector<std::string>& moment_texts,
                const std::string& out) {
  const FailureProfile profile = profile_from_json_file(profile_path);
  const std::vector<std::uint32_t> raw =
      io::read_value_column(obs_path, {"output", "value"});
  std::vector<Word> observations;
  observations.reserve(raw.size());
  for (std::uint32_t v : raw) {
    observations.push_back(Word::encode(v, profile.width()));
  }

  CandidateSet omega = CandidateSet::full_domain(profile.width());
  if (!omega_text.empty()) {
    const auto [lo, hi] = parse_range(omega_text);
    omega = CandidateSet::range(lo, hi, profile.width());
  }

  Distribution estimate = Distribution::uniform(omega.size());
  if (algo == "em") {
    if (!moment_texts.empty()) {
      throw ConfigError("moment constraints apply to --algo clr only");
    }
    EmConfig config;
    config.delta = delta;
    if (max_iterations > 0) config.max_iterations = max_iterations;
    const EmResult result = em_recover(observations, profile, omega, config);
    if (!result.converged) {
      throw NumericError(
          "EM did not converge within " +
          std::to_string(config.max_iterations) +
          " iterations (last change " + io::format_double(result.final_change) +
          ")");
    }
    estimate = result.estimate;
  } else if (algo == "clr") {
    std::vector<MomentConstraint> moments;
    for (const std::string& text : moment_texts) {
      const std::size_t eq = text.find('=');
      if (eq == std::string::npos) {
        throw ConfigError("moment '" + text + "' must look like order=value");
      }
      try {
        moments.push_back(MomentConstraint{std::stoi(text.substr(0, eq)),
                                           std::stod(text.substr(eq + 1))});
      } catch (const std::exception&) {
        throw ConfigError("moment '" + text + "' must look like order=value");
      }
    }
    ClrConfig config;
    if (max_iterations > 0) config.max_iterations = max_iterations;
    const ClrResult result =
        clr_recover(observations, profile, omega, moments, config);
    if (result.pg_norm > config.pg_tolerance) {
      throw NumericError("least-squares recovery stalled at gradient norm " +
                         io::format_double(result.pg_norm));
    }
    estimate = result.estimate;
  } else {
    throw ConfigError("unknown recovery algorithm '" + algo +
                      "' (expected em or clr)");
  }

  std::ostringstream csv;
  csv << "value,probability\n";
  for (std::size_t i = 0; i < omega.size(); ++i) {
    csv << omega.word(i).decode() << ',' << io::format_double(estimate[i])
        << "\n";
  }
  emit(out, csv.str());
  return 0;
}

int run_pmf(const std::string& f_list, const std::string& pattern,
            const std::string& epsilon, const std::string& out) {
  const FailureProfile profile = profile_from_flags(f_list, pattern, epsilon);
  const DeltaPmf pmf = delta_pmf(profile);
  std::ostringstream csv;
  csv << "a,probability\n";
  const std::int64_t reach = (std::int64_t{1} << profile.width()) - 1;
  for (std::int64_t a = -reach; a <= reach; ++a) {
    csv << a << ',' << io::format_double(pmf.prob(a)) << "\n";
  }
  emit(out, csv.str());
  return 0;
}

int run_ul(const std::string& f_list, const std::string& pattern,
           const std::string& epsilon, const std::string& out) {
  const FailureProfile profile = profile_from_flags(f_list, pattern, epsilon);
  ordered_json j;
  j["f"] = profile.rates();
  j["epsilon_total"] = epsilon_inf(profile);
  j["ul"] = expected_l1(profile);
  emit(out, j.dump(2) + "\n");
  return 0;
}

int run_calibrate(const std::string& epsilon, int cells,
                  const std::string& out) {
  const double eps = parse_epsilon(epsilon);
  const double f = f_for_epsilon(eps, cells);
  const FailureCurve curve(CellSpec::sram6t());
  const std::optional<double> exact = curve.voltage_for(f);
  double voltage = 0.0;
  if (exact) {
    voltage = *exact;
  } else {
    // Outside the calibrated band: the nearest supported endpoint.
    const auto& points = curve.points();
    voltage = f > points.front().probability ? points.front().voltage
                                             : points.back().voltage;
  }
  ordered_json j;
  j["epsilon"] = eps;
  j["z"] = cells;
  j["f"] = f;
  j["voltage"] = voltage;
  j["f_at_voltage"] = curve.at(voltage);
  emit(out, j.dump(2) + "\n");
  return 0;
}

int run_privacy_report(const GlobalArgs& globals, double alpha,
                       bool intact_as_infinite, const std::string& out) {
  const ExperimentConfig config = load_config(globals, /*required=*/true);
  const FailureProfile profile = config_profile(config);
  std::vector<double> alphas;
  if (alpha > 0.0) {
    alphas.assign(profile.prone_positions().size(), alpha);
  }
  const PrivacyReport report =
      make_privacy_report(profile, alphas, intact_as_infinite);
  emit(out, io::privacy_report_json(report));
  return 0;
}

int run_run_experiment(const GlobalArgs& globals) {
  const ExperimentConfig config = load_config(globals, /*required=*/true);
  const ResultRecord record = run_experiment(config);
  std::cout << result_record_json(record);
  std::cerr << "runtime: " << record.runtime_seconds << " s\n";
  return 0;
}

int run_compare_rr(const GlobalArgs& globals) {
  const ExperimentConfig config = load_config(globals, /*required=*/true);
  const ComparisonResult result = compare_rr(config);
  std::cout << comparison_json(result);
  std::cerr << "runtime: " << result.sram.runtime_seconds << " s\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Differentially private data collection with low-voltage SRAM "
      "storage: simulate, calibrate, and evaluate the mechanism."};
  app.require_subcommand(1);

  GlobalArgs globals;

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "Generate a synthetic dataset");
  std::string gen_kind = "gaussian";
  double gen_mu = 125.0, gen_sigma = 20.0;
  int gen_count = 1000, gen_width = 8;
  std::string gen_clip, gen_out;
  gen->add_option("--kind", gen_kind, "gaussian | grid")
      ->default_str("gaussian");
  gen->add_option("--mu", gen_mu, "Gaussian mean")->default_str("125");
  gen->add_option("--sigma", gen_sigma, "Gaussian standard deviation")
      ->default_str("20");
  gen->add_option("--count", gen_count, "Number of records")
      ->default_str("1000");
  gen->add_option("--width", gen_width, "Word width in bits")
      ->default_str("8");
  gen->add_option("--clip", gen_clip, "Clip range lo:hi (default: full range)");
  gen->add_option("--out", gen_out, "Output CSV (default: stdout)");
  add_global_flags(gen, &globals);

  // perturb
  auto* perturb = app.add_subcommand(
      "perturb", "Run every input record through the mechanism");
  std::string perturb_input, perturb_out;
  perturb->add_option("--input", perturb_input, "Input CSV of values")
      ->required();
  perturb->add_option("--out", perturb_out, "Output CSV (default: stdout)");
  add_global_flags(perturb, &globals);

  // recover
  auto* recover = app.add_subcommand(
      "recover", "Estimate the input distribution from perturbed records");
  std::string rec_algo = "em", rec_profile, rec_obs, rec_omega, rec_out;
  double rec_delta = 1e-3;
  int rec_max_iter = 0;
  std::vector<std::string> rec_moments;
  recover->add_option("--algo", rec_algo, "em | clr")->default_str("em");
  recover->add_option("--f-profile", rec_profile,
                      "JSON failure profile, e.g. {\"f\":[0,0,0.8,...]}")
      ->required();
  recover->add_option("--obs", rec_obs, "CSV of perturbed records")
      ->required();
  recover->add_option("--omega", rec_omega,
                      "Candidate range lo:hi (default: full domain)");
  recover->add_option("--delta", rec_delta, "EM convergence threshold")
      ->default_str("1e-3");
  recover->add_option("--max-iter", rec_max_iter,
                      "Iteration budget (0: algorithm default)");
  recover->add_option("--moment", rec_moments,
                      "CLR moment constraint order=value (repeatable)");
  recover->add_option("--out", rec_out, "Output CSV (default: stdout)");
  add_global_flags(recover, &globals);

  // pmf
  auto* pmf = app.add_subcommand(
      "pmf", "Exact PMF of the signed value error introduced by one write");
  std::string pmf_f, pmf_pattern, pmf_eps, pmf_out;
  pmf->add_option("--f", pmf_f, "Per-bit rates, MSB first, e.g. 0.5,0.5");
  pmf->add_option("--pattern", pmf_pattern, "Named pattern F1 | F2 | F3");
  pmf->add_option("--epsilon", pmf_eps, "Budget for --pattern (e.g. ln3)");
  pmf->add_option("--out", pmf_out, "Output CSV (default: stdout)");
  add_global_flags(pmf, &globals);

  // ul
  auto* ul = app.add_subcommand(
      "ul", "Expected absolute value error of one write");
  std::string ul_f, ul_pattern, ul_eps, ul_out;
  ul->add_option("--f", ul_f, "Per-bit rates, MSB first");
  ul->add_option("--pattern", ul_pattern, "Named pattern F1 | F2 | F3");
  ul->add_option("--epsilon", ul_eps, "Budget for --pattern (e.g. ln3)");
  ul->add_option("--out", ul_out, "Output JSON (default: stdout)");
  add_global_flags(ul, &globals);

  // calibrate
  auto* calibrate = app.add_subcommand(
      "calibrate",
      "Failure rate and supply voltage that spend a given budget");
  std::string cal_eps;
  int cal_cells = 4;
  std::string cal_out;
  calibrate->add_option("--epsilon", cal_eps, "Privacy budget (e.g. ln3)")
      ->required();
  calibrate->add_option("--cells", cal_cells, "Failure-prone cell count")
      ->default_str("4");
  calibrate->add_option("--out", cal_out, "Output JSON (default: stdout)");
  add_global_flags(calibrate, &globals);

  // privacy-report
  auto* report = app.add_subcommand(
      "privacy-report", "Per-bit and total privacy budget of a config");
  double rep_alpha = 0.0;
  bool rep_intact_inf = false;
  std::string rep_out;
  report->add_option("--alpha", rep_alpha,
                     "Rate drift factor applied to every failure-prone "
                     "position (adds the budget-shift bound)");
  report->add_flag("--intact-as-infinite", rep_intact_inf,
                   "Report intact positions as epsilon = inf");
  report->add_option("--out", rep_out, "Output JSON (default: stdout)");
  add_global_flags(report, &globals);

  // run-experiment / compare-rr
  auto* runexp = app.add_subcommand(
      "run-experiment", "Full pipeline: data, perturbation, metrics, recovery");
  add_global_flags(runexp, &globals);

  auto* compare = app.add_subcommand(
      "compare-rr",
      "Mechanism vs per-bit randomized response at matched budget");
  add_global_flags(compare, &globals);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Command line problems are configuration errors (exit 2); --help and
    // --version are successes.
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) {
      return run_gen_data(globals, gen_kind, gen_mu, gen_sigma, gen_count,
                          gen_width, gen_clip, gen_out);
    }
    if (perturb->parsed()) {
      return run_perturb(globals, perturb_input, perturb_out);
    }
    if (recover->parsed()) {
      return run_recover(rec_algo, rec_profile, rec_obs, rec_omega, rec_delta,
                         rec_max_iter, rec_moments, rec_out);
    }
    if (pmf->parsed()) {
      return run_pmf(pmf_f, pmf_pattern, pmf_eps, pmf_out);
    }
    if (ul->parsed()) {
      return run_ul(ul_f, ul_pattern, ul_eps, ul_out);
    }
    if (calibrate->parsed()) {
      return run_calibrate(cal_eps, cal_cells, cal_out);
    }
    if (report->parsed()) {
      return run_privacy_report(globals, rep_alpha, rep_intact_inf, rep_out);
    }
    if (runexp->parsed()) {
      return run_run_experiment(globals);
    }
    if (compare->parsed()) {
      return run_compare_rr(globals);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
