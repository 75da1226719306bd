#include "sramdp/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include <nlohmann/json.hpp>

#include "sramdp/cellspec.hpp"
#include "sramdp/errors.hpp"
#include "sramdp/io.hpp"
#include "sramdp/rng.hpp"
#include "sramdp/utility.hpp"

namespace sramdp {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::uint32_t domain_max(int width) {
  return width == 32 ? 0xffffffffu : (1u << width) - 1u;
}

}  // namespace

std::vector<std::uint32_t> gen_gaussian(double mu, double sigma, int count,
                                        int width, std::uint32_t clip_lo,
                                        std::uint32_t clip_hi,
                                        std::uint64_t seed) {
  if (width < 1 || width > Word::kMaxWidth) {
    throw ConfigError("dataset width must be in [1, 32], got " +
                      std::to_string(width));
  }
  if (count < 1) {
    throw ConfigError("dataset count must be at least 1, got " +
                      std::to_string(count));
  }
  if (!std::isfinite(mu) || !std::isfinite(sigma) || sigma < 0.0) {
    throw ConfigError("the Gaussian needs finite mu and non-negative sigma");
  }
  if (clip_lo > clip_hi || clip_hi > domain_max(width)) {
    throw ConfigError("clip range [" + std::to_string(clip_lo) + ", " +
                      std::to_string(clip_hi) + "] must be ordered and fit " +
                      std::to_string(width) + " bits");
  }
  Rng rng(seed);
  GaussianSampler gauss;
  std::vector<std::uint32_t> values;
  values.reserve(static_cast<std::size_t>(count));
  const double lo = static_cast<double>(clip_lo);
  const double hi = static_cast<double>(clip_hi);
  for (int i = 0; i < count; ++i) {
    const double v = mu + sigma * gauss.next(rng);
    const double clipped = std::min(hi, std::max(lo, std::round(v)));
    values.push_back(static_cast<std::uint32_t>(clipped));
  }
  return values;
}

std::vector<GridPoint> gen_grid(int count, std::uint64_t seed) {
  if (count < 1) {
    throw ConfigError("dataset count must be at least 1, got " +
                      std::to_string(count));
  }
  // Three fixed hotspots on the 256x256 coordinate plane; weights sum
  // to 1.  The mixture gives the clustered look of check-in data while
  // staying fully synthetic.
  struct Hotspot {
    double weight, x, y, sigma;
  };
  static constexpr Hotspot kHotspots[] = {
      {0.45, 52.0, 180.0, 14.0},
      {0.35, 168.0, 96.0, 22.0},
      {0.20, 208.0, 200.0, 10.0},
  };
  Rng rng(seed);
  GaussianSampler gauss;
  std::vector<GridPoint> points;
  points.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double u = uniform01(rng);
    const Hotspot* spot = &kHotspots[0];
    double acc = 0.0;
    for (const Hotspot& h : kHotspots) {
      acc += h.weight;
      spot = &h;
      if (u < acc) break;
    }
    const double x = spot->x + spot->sigma * gauss.next(rng);
    const double y = spot->y + spot->sigma * gauss.next(rng);
    const auto quantize = [](double v) {
      return static_cast<std::uint32_t>(
          std::min(255.0, std::max(0.0, std::round(v))));
    };
    points.push_back(GridPoint{quantize(x), quantize(y)});
  }
  return points;
}

std::uint32_t grid_aoi(const GridPoint& p) {
  if (p.x > 255 || p.y > 255) {
    throw ConfigError("grid coordinates must fit 8 bits");
  }
  return ((p.x >> 2) << 6) | (p.y >> 2);
}

FailureProfile named_pattern(const std::string& name, double eps) {
  const double rate = f_for_epsilon(eps, 3);
  std::vector<double> f(8, 0.0);
  if (name == "F1") {
    f[5] = f[6] = f[7] = rate;
  } else if (name == "F2") {
    f[2] = f[3] = f[4] = rate;
  } else if (name == "F3") {
    f[0] = f[1] = f[2] = rate;
  } else {
    throw ConfigError("unknown failure pattern '" + name +
                      "' (expected F1, F2 or F3)");
  }
  return FailureProfile(std::move(f));
}

double parse_epsilon(const std::string& text) {
  std::string t = text;
  t.erase(std::remove_if(t.begin(), t.end(),
                         [](unsigned char c) { return std::isspace(c); }),
          t.end());
  if (t.empty()) {
    throw ConfigError("cannot parse epsilon '" + text + "'");
  }
  double value = 0.0;
  if (t.rfind("ln", 0) == 0) {
    std::string arg = t.substr(2);
    if (arg.size() >= 2 && arg.front() == '(' && arg.back() == ')') {
      arg = arg.substr(1, arg.size() - 2);
    }
    std::size_t used = 0;
    double inner = 0.0;
    try {
      inner = std::stod(arg, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != arg.size() || !(inner > 0.0)) {
      throw ConfigError("cannot parse epsilon '" + text + "'");
    }
    value = std::log(inner);
  } else {
    std::size_t used = 0;
    try {
      value = std::stod(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != t.size()) {
      throw ConfigError("cannot parse epsilon '" + text + "'");
    }
  }
  if (!std::isfinite(value) || value < 0.0) {
    throw ConfigError("epsilon must be finite and non-negative, got '" +
                      text + "'");
  }
  return value;
}

namespace {

CellSpec cell_from_kind(const std::string& kind) {
  if (kind == "6T" || kind == "6t") return CellSpec::sram6t();
  if (kind == "reliable") return CellSpec::reliable();
  throw ConfigError("unknown cell kind '" + kind +
                    "' (expected '6T' or 'reliable')");
}

enum class Route { kExplicit, kEpsilon, kVoltage };

Route validate_config(const ExperimentConfig& config) {
  if (config.width < 1 || config.width > 16) {
    throw ConfigError("experiment pipelines support widths 1..16, got " +
                      std::to_string(config.width));
  }

  const bool has_pattern = config.pattern.has_value();
  const bool has_f = config.f.has_value();
  const bool has_eps = config.epsilon.has_value();
  const bool has_volt = config.voltage.has_value();
  const bool has_cells = !config.cells.empty();
  const bool has_prone = !config.prone.empty();

  const int routes = (has_f ? 1 : 0) + (has_eps ? 1 : 0) + (has_volt ? 1 : 0);
  if (routes != 1) {
    throw ConfigError("specify the operating point exactly one way: an "
                      "explicit per-bit rate vector, an epsilon budget, or "
                      "a supply voltage");
  }

  Route route = Route::kExplicit;
  if (has_f) {
    route = Route::kExplicit;
    if (has_pattern || has_cells || has_prone) {
      throw ConfigError("an explicit rate vector cannot be combined with a "
                        "named pattern, cell kinds or a prone list");
    }
    if (static_cast<int>(config.f->size()) != config.width) {
      throw ConfigError("rate vector has " +
                        std::to_string(config.f->size()) +
                        " entries for width " + std::to_string(config.width));
    }
  } else if (has_eps) {
    route = Route::kEpsilon;
    if (has_cells) {
      throw ConfigError("the epsilon route takes a named pattern or a prone "
                        "list, not cell kinds");
    }
    if (has_pattern == has_prone) {
      throw ConfigError("the epsilon route needs exactly one of a named "
                        "pattern or a prone-position list");
    }
    if (has_pattern && config.width != 8) {
      throw ConfigError("named patterns are defined for width 8");
    }
    if (has_prone) {
      std::set<int> seen;
      for (int p : config.prone) {
        if (p < 0 || p >= config.width) {
          throw ConfigError("prone position " + std::to_string(p) +
                            " is outside [0, " +
                            std::to_string(config.width) + ")");
        }
        if (!seen.insert(p).second) {
          throw ConfigError("prone position " + std::to_string(p) +
                            " is listed twice");
        }
      }
    }
  } else {
    route = Route::kVoltage;
    if (has_pattern || has_prone) {
      throw ConfigError("the voltage route takes per-position cell kinds, "
                        "not patterns or prone lists");
    }
    if (static_cast<int>(config.cells.size()) != config.width) {
      throw ConfigError("cell assignment has " +
                        std::to_string(config.cells.size()) +
                        " entries for width " + std::to_string(config.width));
    }
  }

  if (route != Route::kVoltage) {
    if (config.mode == FailureMode::kChip) {
      throw ConfigError("chip mode needs the voltage route: per-position "
                        "cell kinds plus a supply voltage");
    }
    if (config.permset.has_value()) {
      throw ConfigError("a shuffle set only combines with the voltage "
                        "route; named and explicit profiles are effective "
                        "per-bit rates, realized with the identity shuffle");
    }
  }

  if (config.lfsr.has_value() &&
      config.noise_source != NoiseSource::kLfsr) {
    throw ConfigError("an LFSR config was given but the noise source is "
                      "the seeded system engine");
  }
  if (config.chip_words < 0) {
    throw ConfigError("chip_words must be non-negative");
  }
  if (config.chip_words != 0 && config.mode != FailureMode::kChip) {
    throw ConfigError("chip_words only applies to chip mode");
  }
  if (config.recovery.per_record_profiles &&
      config.mode != FailureMode::kChip) {
    throw ConfigError("per-record recovery profiles require chip mode, "
                      "where fault positions are a static property of the "
                      "written word");
  }

  if (config.omega) {
    const auto [lo, hi] = *config.omega;
    if (lo > hi || hi > domain_max(config.width)) {
      throw ConfigError("candidate range [" + std::to_string(lo) + ", " +
                        std::to_string(hi) + "] must be ordered and fit " +
                        std::to_string(config.width) + " bits");
    }
  } else if ((config.recovery.em || config.recovery.clr) &&
             config.width > 12) {
    throw ConfigError("recovery over the full domain is capped at width "
                      "12; give an explicit candidate range");
  }

  for (const MomentConstraint& m : config.recovery.moments) {
    if (m.order < 1) {
      throw ConfigError("moment constraints need order >= 1, got " +
                        std::to_string(m.order));
    }
    if (!std::isfinite(m.value)) {
      throw ConfigError("moment constraint values must be finite");
    }
  }

  if (config.dataset.kind == DatasetSpec::Kind::kGrid && config.width != 8) {
    throw ConfigError("the grid dataset quantizes both axes to 8 bits; "
                      "set width 8");
  }
  return route;
}

}  // namespace

FailureProfile config_profile(const ExperimentConfig& config) {
  const Route route = validate_config(config);
  switch (route) {
    case Route::kExplicit:
      return FailureProfile(*config.f);
    case Route::kEpsilon: {
      if (config.pattern) return named_pattern(*config.pattern, *config.epsilon);
      const double rate =
          f_for_epsilon(*config.epsilon, static_cast<int>(config.prone.size()));
      std::vector<double> f(static_cast<std::size_t>(config.width), 0.0);
      for (int p : config.prone) f[static_cast<std::size_t>(p)] = rate;
      return FailureProfile(std::move(f));
    }
    case Route::kVoltage: {
      std::vector<double> rates;
      rates.reserve(config.cells.size());
      for (const std::string& kind : config.cells) {
        rates.push_back(failure_rate_at(cell_from_kind(kind), *config.voltage));
      }
      const PermSet permset =
          config.permset ? *config.permset
                         : (config.width == 8 ? PermSet::default_set(8)
                                              : PermSet::identity_only(config.width));
      return effective_f(permset, rates);
    }
  }
  throw ConfigError("unreachable operating-point route");
}

Mechanism build_mechanism(const ExperimentConfig& config) {
  const Route route = validate_config(config);

  MechanismConfig mc;
  mc.width = config.width;
  mc.mode = config.mode;
  mc.noise_source = config.noise_source;
  mc.fixed_output = config.fixed_output;

  if (route == Route::kVoltage) {
    mc.voltage = config.voltage;
    mc.cells.reserve(config.cells.size());
    for (const std::string& kind : config.cells) {
      mc.cells.push_back(cell_from_kind(kind));
    }
    mc.permset = config.permset;  // nullopt keeps the mechanism default
  } else {
    mc.cell_rates = config_profile(config).rates();
    mc.permset = PermSet::identity_only(config.width);
  }

  if (config.mode == FailureMode::kChip) {
    int words = config.chip_words;
    if (words == 0) {
      if (config.dataset.kind == DatasetSpec::Kind::kFile) {
        throw ConfigError("chip mode with a file dataset needs an explicit "
                          "chip_words");
      }
      words = config.dataset.count *
              (config.dataset.kind == DatasetSpec::Kind::kGrid ? 2 : 1);
    }
    mc.chip_words = words;
    mc.chip_seed = derive_seed(config.seed, SeedStream::kChip);
  }

  if (config.noise_source == NoiseSource::kLfsr) {
    LfsrConfig lc = config.lfsr.value_or(LfsrConfig{});
    if (lc.seed == 0) {
      lc.seed = derive_seed(config.seed, SeedStream::kLfsr);
    }
    mc.lfsr = lc;
  }

  return Mechanism(std::move(mc));
}

std::vector<std::uint32_t> load_dataset(const ExperimentConfig& config) {
  const DatasetSpec& ds = config.dataset;
  const std::uint64_t data_seed = derive_seed(config.seed, SeedStream::kData);
  switch (ds.kind) {
    case DatasetSpec::Kind::kGaussian:
      return gen_gaussian(ds.mu, ds.sigma, ds.count, config.width, ds.clip_lo,
                          ds.clip_hi, data_seed);
    case DatasetSpec::Kind::kGrid: {
      // Each point contributes its two axis words, interleaved; the
      // mechanism privatizes the axes independently.
      const std::vector<GridPoint> points = gen_grid(ds.count, data_seed);
      std::vector<std::uint32_t> values;
      values.reserve(points.size() * 2);
      for (const GridPoint& p : points) {
        values.push_back(p.x);
        values.push_back(p.y);
      }
      return values;
    }
    case DatasetSpec::Kind::kFile: {
      std::vector<std::uint32_t> values =
          io::read_value_column(ds.path, {"value"});
      for (std::uint32_t v : values) {
        if (v > domain_max(config.width)) {
          throw ConfigError(ds.path + ": value " + std::to_string(v) +
                            " does not fit " + std::to_string(config.width) +
                            " bits");
        }
      }
      return values;
    }
  }
  throw ConfigError("unreachable dataset kind");
}

namespace {

struct ArmResult {
  ResultRecord record;
  std::vector<double> ia;  // per record; empty when the metric is off
  std::vector<double> ul;
  std::vector<std::uint64_t> original_counts;   // over the full domain
  std::vector<std::uint64_t> perturbed_counts;  // over the full domain
  std::vector<double> recovered_em;             // estimated counts, or empty
  std::vector<double> recovered_clr;
};

CandidateSet recovery_omega(const ExperimentConfig& config) {
  if (config.omega) {
    return CandidateSet::range(config.omega->first, config.omega->second,
                               config.width);
  }
  return CandidateSet::full_domain(config.width);
}

RecoveryMetrics recovery_metrics(const std::string& algo,
                                 const Distribution& estimate,
                                 const CandidateSet& omega,
                                 const std::vector<std::uint64_t>& original,
                                 std::size_t count, int iterations,
                                 bool converged, std::vector<double>* out) {
  std::vector<double> est_counts(original.size(), 0.0);
  for (std::size_t i = 0; i < omega.size(); ++i) {
    est_counts[omega.word(i).decode()] =
        estimate[i] * static_cast<double>(count);
  }
  double mse = 0.0;
  double tv = 0.0;
  for (std::size_t v = 0; v < original.size(); ++v) {
    const double diff = est_counts[v] - static_cast<double>(original[v]);
    mse += diff * diff;
    tv += std::abs(est_counts[v] - static_cast<double>(original[v])) /
          static_cast<double>(count);
  }
  mse /= static_cast<double>(original.size());
  tv *= 0.5;
  if (out != nullptr) *out = std::move(est_counts);
  return RecoveryMetrics{algo, mse, tv, iterations, converged};
}

// Metrics and recovery shared by the mechanism arm and the
// randomized-response reference arm.
ArmResult evaluate_arm(const ExperimentConfig& config,
                       const std::vector<std::uint32_t>& inputs,
                       const std::vector<std::uint32_t>& outputs,
                       const FailureProfile& profile,
                       const std::vector<FailureProfile>* per_record) {
  const std::size_t n = inputs.size();
  const std::size_t domain = static_cast<std::size_t>(domain_max(config.width)) + 1;

  ArmResult arm;
  arm.record.epsilon_total = epsilon_inf(profile);
  arm.record.z = profile.z();
  arm.record.count = static_cast<int>(n);
  arm.record.seed = config.seed;

  arm.original_counts.assign(domain, 0);
  arm.perturbed_counts.assign(domain, 0);
  for (std::size_t i = 0; i < n; ++i) {
    ++arm.original_counts[inputs[i]];
    ++arm.perturbed_counts[outputs[i]];
  }

  if (config.compute_ia) {
    std::map<std::uint32_t, double> cache;
    arm.ia.reserve(n);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto it = cache.find(outputs[i]);
      double value = 0.0;
      if (it != cache.end()) {
        value = it->second;
      } else {
        const Word o = Word::encode(outputs[i], config.width);
        const CandidateSet candidates = indistinguishable_set(o, profile);
        const AdversaryPrior prior =
            build_prior(config.prior, candidates, inputs);
        value = ia_meter(o, prior, profile);
        cache.emplace(outputs[i], value);
      }
      arm.ia.push_back(value);
      sum += value;
      sum_sq += value * value;
    }
    const double mean = sum / static_cast<double>(n);
    arm.record.ia_mean = mean;
    arm.record.ia_std =
        std::sqrt(std::max(0.0, sum_sq / static_cast<double>(n) - mean * mean));
  }

  if (config.compute_ul) {
    std::map<std::uint32_t, double> cache;
    arm.ul.reserve(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto it = cache.find(inputs[i]);
      double value = 0.0;
      if (it != cache.end()) {
        value = it->second;
      } else {
        value = ul_meter(Word::encode(inputs[i], config.width), profile);
        cache.emplace(inputs[i], value);
      }
      arm.ul.push_back(value);
      sum += value;
    }
    arm.record.ul_mean = sum / static_cast<double>(n);
  }

  if (config.recovery.em || config.recovery.clr) {
    const CandidateSet omega = recovery_omega(config);
    std::vector<Word> observations;
    observations.reserve(n);
    for (std::uint32_t o : outputs) {
      observations.push_back(Word::encode(o, config.width));
    }
    if (config.recovery.em) {
      const EmResult em =
          per_record != nullptr
              ? em_recover(observations, *per_record, omega,
                           config.recovery.em_config)
              : em_recover(observations, profile, omega,
                           config.recovery.em_config);
      arm.record.recovery.push_back(recovery_metrics(
          "em", em.estimate, omega, arm.original_counts, n, em.iterations,
          em.converged, &arm.recovered_em));
    }
    if (config.recovery.clr) {
      const ClrResult clr =
          clr_recover(observations, profile, omega, config.recovery.moments,
                      config.recovery.clr_config);
      arm.record.recovery.push_back(recovery_metrics(
          "clr", clr.estimate, omega, arm.original_counts, n, clr.iterations,
          clr.pg_norm <= config.recovery.clr_config.pg_tolerance,
          &arm.recovered_clr));
    }
  }

  const auto check = [](const char* name, double v) {
    if (!std::isfinite(v) || v < 0.0) {
      throw NumericError(std::string("result metric '") + name +
                         "' is not finite and non-negative");
    }
  };
  check("epsilon_total", arm.record.epsilon_total);
  if (arm.record.ia_mean) check("ia_mean", *arm.record.ia_mean);
  if (arm.record.ia_std) check("ia_std", *arm.record.ia_std);
  if (arm.record.ul_mean) check("ul_mean", *arm.record.ul_mean);
  for (const RecoveryMetrics& m : arm.record.recovery) {
    check("count_mse", m.count_mse);
    check("tv", m.tv);
  }
  return arm;
}

ordered_json record_to_json(const ResultRecord& record) {
  ordered_json j;
  j["epsilon_total"] = record.epsilon_total;
  j["z"] = record.z;
  j["count"] = record.count;
  if (record.ia_mean) {
    j["ia_mean"] = *record.ia_mean;
    j["ia_std"] = *record.ia_std;
  }
  if (record.ul_mean) {
    j["ul_mean"] = *record.ul_mean;
  }
  ordered_json recovery = ordered_json::array();
  for (const RecoveryMetrics& m : record.recovery) {
    ordered_json e;
    e["algo"] = m.algo;
    e["count_mse"] = m.count_mse;
    e["tv"] = m.tv;
    e["iterations"] = m.iterations;
    e["converged"] = m.converged;
    recovery.push_back(std::move(e));
  }
  j["recovery"] = std::move(recovery);
  j["seed"] = record.seed;
  return j;
}

// Writes the given artifact files, deleting everything already written
// when any write fails so no partial run is left behind.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(const std::string& dir) : dir_(dir) {
    std::filesystem::create_directories(dir_);
  }

  std::string path(const std::string& name) const {
    return (std::filesystem::path(dir_) / name).string();
  }

  void write(const std::string& name, const std::string& content) {
    const std::string p = path(name);
    written_.push_back(p);  // before writing, so a partial file is removed too
    try {
      io::write_file(p, content);
    } catch (...) {
      discard();
      throw;
    }
  }

  void discard() {
    for (const std::string& p : written_) {
      std::error_code ec;
      std::filesystem::remove(p, ec);
    }
    written_.clear();
  }

 private:
  std::string dir_;
  std::vector<std::string> written_;
};

struct SramArm {
  std::vector<std::uint32_t> outputs;
  std::vector<int> pattern_indices;
  std::vector<FailureProfile> per_record_profiles;
  FailureProfile profile = FailureProfile::zeros(1);
  std::optional<std::string> fault_dump;
};

SramArm run_sram_arm(const ExperimentConfig& config, Mechanism& mechanism,
                     const std::vector<std::uint32_t>& inputs) {
  SramArm arm;
  MechanismStreams streams{
      Rng(derive_seed(config.seed, SeedStream::kPattern)),
      Rng(derive_seed(config.seed, SeedStream::kFailure)),
      Rng(derive_seed(config.seed, SeedStream::kNoise)),
  };
  const bool want_traces = config.recovery.per_record_profiles;
  arm.outputs.reserve(inputs.size());
  arm.pattern_indices.reserve(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const Word x = Word::encode(inputs[i], config.width);
    if (want_traces) {
      const PerturbTrace trace = mechanism.perturb_trace(x, i, streams);
      arm.outputs.push_back(trace.output.decode());
      arm.pattern_indices.push_back(trace.pattern_index);
      const PermPattern& pattern = mechanism.permset().pattern(
          static_cast<std::size_t>(trace.pattern_index));
      std::vector<double> rates(static_cast<std::size_t>(config.width), 0.0);
      for (int d = 0; d < config.width; ++d) {
        if (trace.faults.failed[static_cast<std::size_t>(d)]) {
          rates[static_cast<std::size_t>(pattern.source_of(d))] = 1.0;
        }
      }
      arm.per_record_profiles.emplace_back(std::move(rates));
    } else {
      const PerturbResult result = mechanism.perturb_at(x, i, streams);
      arm.outputs.push_back(result.output.decode());
      arm.pattern_indices.push_back(result.pattern_index);
    }
  }
  if (config.mode == FailureMode::kChip) {
    // A curator recovering chip-perturbed data does not know the per-word
    // fault maps; it works from the average failure rate observed across the
    // array, which deviates from the per-record truth.  Per-record profiles
    // (when enabled) are the remedy for exactly that mismatch.
    arm.profile = mechanism.average_profile();
    arm.fault_dump = mechanism.chip().fault_dump_json(*mechanism.config().voltage);
  } else {
    arm.profile = mechanism.profile();
  }
  return arm;
}

std::string records_csv(const ExperimentConfig& config,
                        const std::vector<std::uint32_t>& inputs,
                        const SramArm& sram, const ArmResult& arm) {
  std::ostringstream out;
  out << "index,input,output,pattern_index";
  if (!arm.ia.empty()) out << ",ia";
  if (!arm.ul.empty()) out << ",ul";
  out << "\n";
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    out << i << ',' << inputs[i] << ',' << sram.outputs[i] << ','
        << sram.pattern_indices[i];
    if (!arm.ia.empty()) out << ',' << io::format_double(arm.ia[i]);
    if (!arm.ul.empty()) out << ',' << io::format_double(arm.ul[i]);
    out << "\n";
  }
  (void)config;
  return out.str();
}

std::string histogram_csv(const ArmResult& arm) {
  std::ostringstream out;
  out << "value,original,perturbed";
  if (!arm.recovered_em.empty()) out << ",recovered_em";
  if (!arm.recovered_clr.empty()) out << ",recovered_clr";
  out << "\n";
  for (std::size_t v = 0; v < arm.original_counts.size(); ++v) {
    out << v << ',' << arm.original_counts[v] << ',' << arm.perturbed_counts[v];
    if (!arm.recovered_em.empty()) {
      out << ',' << io::format_double(arm.recovered_em[v]);
    }
    if (!arm.recovered_clr.empty()) {
      out << ',' << io::format_double(arm.recovered_clr[v]);
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace

std::string result_record_json(const ResultRecord& record) {
  return record_to_json(record).dump(2) + "\n";
}

ResultRecord run_experiment(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  validate_config(config);

  const std::vector<std::uint32_t> inputs = load_dataset(config);
  ExperimentConfig resolved = config;
  if (config.mode == FailureMode::kChip && config.chip_words == 0) {
    resolved.chip_words = static_cast<int>(inputs.size());
  }
  Mechanism mechanism = build_mechanism(resolved);

  const SramArm sram = run_sram_arm(resolved, mechanism, inputs);
  ArmResult arm = evaluate_arm(
      resolved, inputs, sram.outputs, sram.profile,
      config.recovery.per_record_profiles ? &sram.per_record_profiles
                                          : nullptr);

  arm.record.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();

  if (!config.out_dir.empty()) {
    ArtifactWriter writer(config.out_dir);
    try {
      writer.write("records.csv", records_csv(resolved, inputs, sram, arm));
      writer.write("histogram.csv", histogram_csv(arm));
      writer.write("result.json", result_record_json(arm.record));
      if (sram.fault_dump) {
        writer.write("fault_map.json", *sram.fault_dump);
      }
    } catch (...) {
      writer.discard();
      throw;
    }
  }
  return arm.record;
}

ComparisonResult compare_rr(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  validate_config(config);

  const std::vector<std::uint32_t> inputs = load_dataset(config);
  ExperimentConfig resolved = config;
  if (config.mode == FailureMode::kChip && config.chip_words == 0) {
    resolved.chip_words = static_cast<int>(inputs.size());
  }
  Mechanism mechanism = build_mechanism(resolved);

  const SramArm sram = run_sram_arm(resolved, mechanism, inputs);
  ArmResult sram_arm = evaluate_arm(
      resolved, inputs, sram.outputs, sram.profile,
      config.recovery.per_record_profiles ? &sram.per_record_profiles
                                          : nullptr);

  // The reference arm randomizes the same failure-prone positions at the
  // matched per-bit budget: flipping with probability f_i/2 is exactly
  // randomized response with eps_i = ln((1 - f_i/2)/(f_i/2)).  It always
  // uses the calibrated profile, so in chip mode the arms differ by the
  // fault correlation the reference does not have.
  const FailureProfile reference_profile = config_profile(resolved);
  Rng rr_rng(derive_seed(config.seed, SeedStream::kReference));
  std::vector<std::uint32_t> rr_outputs;
  rr_outputs.reserve(inputs.size());
  for (std::uint32_t v : inputs) {
    rr_outputs.push_back(
        rr_perturb(Word::encode(v, config.width), reference_profile, rr_rng)
            .decode());
  }
  ExperimentConfig rr_config = resolved;
  rr_config.recovery.per_record_profiles = false;
  ArmResult rr_arm =
      evaluate_arm(rr_config, inputs, rr_outputs, reference_profile, nullptr);

  double output_tv = 0.0;
  for (std::size_t v = 0; v < sram_arm.perturbed_counts.size(); ++v) {
    output_tv += std::abs(static_cast<double>(sram_arm.perturbed_counts[v]) -
                          static_cast<double>(rr_arm.perturbed_counts[v]));
  }
  output_tv *= 0.5 / static_cast<double>(inputs.size());

  ComparisonResult result;
  result.sram = sram_arm.record;
  result.rr = rr_arm.record;
  result.output_tv = output_tv;
  result.sram.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  result.rr.runtime_seconds = result.sram.runtime_seconds;

  if (!config.out_dir.empty()) {
    ArtifactWriter writer(config.out_dir);
    try {
      writer.write("comparison.json", comparison_json(result));
    } catch (...) {
      writer.discard();
      throw;
    }
  }
  return result;
}

std::string comparison_json(const ComparisonResult& result) {
  ordered_json j;
  j["sram"] = record_to_json(result.sram);
  j["rr"] = record_to_json(result.rr);
  j["output_tv"] = result.output_tv;
  return j.dump(2) + "\n";
}

namespace {

void expect_keys(const json& j, const std::string& context,
                 std::initializer_list<const char*> allowed) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ConfigError(context + ": unknown key '" + item.key() + "'");
    }
  }
}

double json_number(const json& j, const std::string& context) {
  if (!j.is_number()) {
    throw ConfigError(context + " must be a number");
  }
  return j.get<double>();
}

int json_int(const json& j, const std::string& context) {
  if (!j.is_number_integer()) {
    throw ConfigError(context + " must be an integer");
  }
  return j.get<int>();
}

DatasetSpec parse_dataset(const json& j) {
  if (!j.is_object()) {
    throw ConfigError("'dataset' must be an object");
  }
  expect_keys(j, "dataset",
              {"kind", "mu", "sigma", "count", "clip", "path"});
  DatasetSpec ds;
  const std::string kind = j.value("kind", std::string("gaussian"));
  if (kind == "gaussian") {
    ds.kind = DatasetSpec::Kind::kGaussian;
  } else if (kind == "grid") {
    ds.kind = DatasetSpec::Kind::kGrid;
  } else if (kind == "file") {
    ds.kind = DatasetSpec::Kind::kFile;
  } else {
    throw ConfigError("dataset kind '" + kind +
                      "' is not one of gaussian, grid, file");
  }
  if (j.contains("mu")) ds.mu = json_number(j.at("mu"), "dataset.mu");
  if (j.contains("sigma")) ds.sigma = json_number(j.at("sigma"), "dataset.sigma");
  if (j.contains("count")) ds.count = json_int(j.at("count"), "dataset.count");
  if (j.contains("clip")) {
    const json& clip = j.at("clip");
    if (!clip.is_array() || clip.size() != 2) {
      throw ConfigError("dataset.clip must be [lo, hi]");
    }
    ds.clip_lo = clip.at(0).get<std::uint32_t>();
    ds.clip_hi = clip.at(1).get<std::uint32_t>();
  }
  if (j.contains("path")) ds.path = j.at("path").get<std::string>();
  if (ds.kind == DatasetSpec::Kind::kFile && ds.path.empty()) {
    throw ConfigError("a file dataset needs a path");
  }
  if (ds.kind != DatasetSpec::Kind::kFile && !ds.path.empty()) {
    throw ConfigError("dataset.path only applies to file datasets");
  }
  return ds;
}

RecoverySpec parse_recovery(const json& j) {
  if (!j.is_object()) {
    throw ConfigError("'recovery' must be an object");
  }
  expect_keys(j, "recovery",
              {"algorithms", "em", "clr", "moments", "per_record_profiles"});
  RecoverySpec spec;
  if (j.contains("algorithms")) {
    spec.em = false;
    spec.clr = false;
    for (const json& a : j.at("algorithms")) {
      const std::string name = a.get<std::string>();
      if (name == "em") {
        spec.em = true;
      } else if (name == "clr") {
        spec.clr = true;
      } else {
        throw ConfigError("unknown recovery algorithm '" + name + "'");
      }
    }
  }
  if (j.contains("em")) {
    const json& e = j.at("em");
    expect_keys(e, "recovery.em", {"delta", "max_iterations"});
    if (e.contains("delta")) {
      spec.em_config.delta = json_number(e.at("delta"), "recovery.em.delta");
    }
    if (e.contains("max_iterations")) {
      spec.em_config.max_iterations =
          json_int(e.at("max_iterations"), "recovery.em.max_iterations");
    }
  }
  if (j.contains("clr")) {
    const json& c = j.at("clr");
    expect_keys(c, "recovery.clr",
                {"pg_tolerance", "max_iterations", "moment_tolerance",
                 "penalty_initial", "penalty_growth", "penalty_rounds"});
    if (c.contains("pg_tolerance")) {
      spec.clr_config.pg_tolerance =
          json_number(c.at("pg_tolerance"), "recovery.clr.pg_tolerance");
    }
    if (c.contains("max_iterations")) {
      spec.clr_config.max_iterations =
          json_int(c.at("max_iterations"), "recovery.clr.max_iterations");
    }
    if (c.contains("moment_tolerance")) {
      spec.clr_config.moment_tolerance = json_number(
          c.at("moment_tolerance"), "recovery.clr.moment_tolerance");
    }
    if (c.contains("penalty_initial")) {
      spec.clr_config.penalty_initial = json_number(
          c.at("penalty_initial"), "recovery.clr.penalty_initial");
    }
    if (c.contains("penalty_growth")) {
      spec.clr_config.penalty_growth = json_number(
          c.at("penalty_growth"), "recovery.clr.penalty_growth");
    }
    if (c.contains("penalty_rounds")) {
      spec.clr_config.penalty_rounds =
          json_int(c.at("penalty_rounds"), "recovery.clr.penalty_rounds");
    }
  }
  if (j.contains("moments")) {
    for (const json& m : j.at("moments")) {
      expect_keys(m, "recovery.moments[]", {"order", "value"});
      spec.moments.push_back(MomentConstraint{
          json_int(m.at("order"), "moment order"),
          json_number(m.at("value"), "moment value")});
    }
  }
  if (j.contains("per_record_profiles")) {
    spec.per_record_profiles = j.at("per_record_profiles").get<bool>();
  }
  return spec;
}

}  // namespace

ExperimentConfig experiment_config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("experiment config is not valid JSON: ") +
                      e.what());
  }
  if (!j.is_object()) {
    throw ConfigError("experiment config must be a JSON object");
  }
  expect_keys(j, "config",
              {"width", "dataset", "pattern", "f", "epsilon", "voltage",
               "cells", "prone", "mode", "chip_words", "noise_source", "lfsr",
               "fixed_output", "permset", "prior", "recovery", "omega",
               "metrics", "seed", "out_dir"});

  ExperimentConfig config;
  if (j.contains("width")) config.width = json_int(j.at("width"), "width");
  if (j.contains("dataset")) config.dataset = parse_dataset(j.at("dataset"));

  if (j.contains("pattern")) {
    config.pattern = j.at("pattern").get<std::string>();
  }
  if (j.contains("f")) {
    const json& f = j.at("f");
    if (!f.is_array()) {
      throw ConfigError("'f' must be an array of per-bit rates, MSB first");
    }
    std::vector<double> rates;
    for (const json& r : f) rates.push_back(json_number(r, "f[]"));
    config.f = std::move(rates);
  }
  if (j.contains("epsilon")) {
    const json& e = j.at("epsilon");
    config.epsilon = e.is_string() ? parse_epsilon(e.get<std::string>())
                                   : json_number(e, "epsilon");
  }
  if (j.contains("voltage")) {
    config.voltage = json_number(j.at("voltage"), "voltage");
  }
  if (j.contains("cells")) {
    for (const json& c : j.at("cells")) {
      config.cells.push_back(c.get<std::string>());
    }
  }
  if (j.contains("prone")) {
    for (const json& p : j.at("prone")) {
      config.prone.push_back(json_int(p, "prone[]"));
    }
  }
  if (j.contains("mode")) {
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "stochastic") {
      config.mode = FailureMode::kStochastic;
    } else if (mode == "chip") {
      config.mode = FailureMode::kChip;
    } else {
      throw ConfigError("mode '" + mode + "' is not stochastic or chip");
    }
  }
  if (j.contains("chip_words")) {
    config.chip_words = json_int(j.at("chip_words"), "chip_words");
  }
  if (j.contains("noise_source")) {
    const std::string src = j.at("noise_source").get<std::string>();
    if (src == "system") {
      config.noise_source = NoiseSource::kSeededSystem;
    } else if (src == "lfsr") {
      config.noise_source = NoiseSource::kLfsr;
    } else {
      throw ConfigError("noise_source '" + src + "' is not system or lfsr");
    }
  }
  if (j.contains("lfsr")) {
    const json& l = j.at("lfsr");
    expect_keys(l, "lfsr", {"width", "taps", "seed"});
    LfsrConfig lc;
    if (l.contains("width")) lc.width = json_int(l.at("width"), "lfsr.width");
    if (l.contains("taps")) {
      lc.taps = static_cast<std::uint32_t>(json_int(l.at("taps"), "lfsr.taps"));
    }
    if (l.contains("seed")) lc.seed = l.at("seed").get<std::uint64_t>();
    config.lfsr = lc;
  }
  if (j.contains("fixed_output")) {
    config.fixed_output = json_int(j.at("fixed_output"), "fixed_output");
  }
  if (j.contains("permset")) {
    const json& p = j.at("permset");
    if (p.is_string()) {
      const std::string name = p.get<std::string>();
      if (name == "identity") {
        config.permset = PermSet::identity_only(config.width);
      } else if (name == "default") {
        config.permset = PermSet::default_set(config.width);
      } else {
        throw ConfigError("permset '" + name +
                          "' is not identity, default or an inline object");
      }
    } else {
      config.permset = PermSet::from_json_text(p.dump());
    }
  }
  if (j.contains("prior")) {
    const std::string prior = j.at("prior").get<std::string>();
    if (prior == "K1" || prior == "uniform") {
      config.prior = PriorKind::kUniform;
    } else if (prior == "K2" || prior == "dataset") {
      config.prior = PriorKind::kDatasetInformed;
    } else {
      throw ConfigError("prior '" + prior + "' is not K1/uniform or "
                        "K2/dataset");
    }
  }
  if (j.contains("recovery")) {
    config.recovery = parse_recovery(j.at("recovery"));
  }
  if (j.contains("omega")) {
    const json& o = j.at("omega");
    if (!o.is_array() || o.size() != 2) {
      throw ConfigError("'omega' must be [lo, hi]");
    }
    config.omega = std::make_pair(o.at(0).get<std::uint32_t>(),
                                  o.at(1).get<std::uint32_t>());
  }
  if (j.contains("metrics")) {
    const json& m = j.at("metrics");
    expect_keys(m, "metrics", {"ia", "ul"});
    if (m.contains("ia")) config.compute_ia = m.at("ia").get<bool>();
    if (m.contains("ul")) config.compute_ul = m.at("ul").get<bool>();
  }
  if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("out_dir")) {
    config.out_dir = j.at("out_dir").get<std::string>();
  }

  validate_config(config);
  return config;
}

ExperimentConfig experiment_config_from_json_file(const std::string& path) {
  return experiment_config_from_json_text(io::read_file(path));
}

}  // namespace sramdp
