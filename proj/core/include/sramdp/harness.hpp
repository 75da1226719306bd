#ifndef SRAMDP_HARNESS_HPP_
#define SRAMDP_HARNESS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sramdp/candidates.hpp"
#include "sramdp/failure_profile.hpp"
#include "sramdp/mechanism.hpp"
#include "sramdp/privacy.hpp"
#include "sramdp/recovery.hpp"

namespace sramdp {

// Rounded, clipped integer samples from a Gaussian.  The clip range must
// lie within [0, 2^width); sigma = 0 degenerates to all-mu.
std::vector<std::uint32_t> gen_gaussian(double mu, double sigma, int count,
                                        int width, std::uint32_t clip_lo,
                                        std::uint32_t clip_hi,
                                        std::uint64_t seed);

// Synthetic check-in coordinates on a 64x64 grid of areas of interest,
// with both axes quantized to 8 bits.  Points are drawn from a fixed
// mixture of Gaussian hotspots, mimicking clustered location data.
struct GridPoint {
  std::uint32_t x;
  std::uint32_t y;
};

std::vector<GridPoint> gen_grid(int count, std::uint64_t seed);

// Area-of-interest index (0..4095) of a grid point: the two 6-bit cell
// coordinates combined row-major.
std::uint32_t grid_aoi(const GridPoint& p);

// Named 8-bit failure patterns: F1 fails the three least significant
// bits, F2 the middle three (positions 2..4, MSB first), F3 the three
// most significant bits, each at the homogeneous rate that spends eps
// across the three positions.
FailureProfile named_pattern(const std::string& name, double eps);

// Accepts a plain number ("1.5") or a natural-log shorthand ("ln3",
// "ln(3)"); the result must be finite and non-negative.
double parse_epsilon(const std::string& text);

struct DatasetSpec {
  enum class Kind { kGaussian, kGrid, kFile };

  Kind kind = Kind::kGaussian;
  double mu = 125.0;
  double sigma = 20.0;
  int count = 1000;
  std::uint32_t clip_lo = 0;
  std::uint32_t clip_hi = 255;
  std::string path;  // kFile only
};

struct RecoverySpec {
  bool em = true;
  bool clr = false;
  EmConfig em_config;
  ClrConfig clr_config;
  std::vector<MomentConstraint> moments;  // applied to the CLR estimate
  // Chip mode only: give the recovery the exact per-record fault
  // positions instead of the array-average profile (EM only).
  bool per_record_profiles = false;
};

// One end-to-end run.  The operating point must be given in exactly one
// of three ways:
//   - a named pattern plus epsilon (or a prone-position list plus
//     epsilon, spending it homogeneously across those positions),
//   - an explicit per-bit rate vector (MSB first),
//   - per-position cell kinds plus a supply voltage.
// Named/explicit profiles describe effective per-bit rates, realized
// with the identity shuffle; the voltage route uses the configured (or
// default) shuffle set.
struct ExperimentConfig {
  int width = 8;
  DatasetSpec dataset;

  std::optional<std::string> pattern;      // F1 | F2 | F3
  std::optional<std::vector<double>> f;    // explicit rates, MSB first
  std::optional<double> epsilon;
  std::optional<double> voltage;
  std::vector<std::string> cells;          // per-position kinds, e.g. "6T"
  std::vector<int> prone;                  // epsilon route without a name

  FailureMode mode = FailureMode::kStochastic;
  int chip_words = 0;  // chip mode; 0 = one word per record
  NoiseSource noise_source = NoiseSource::kSeededSystem;
  std::optional<LfsrConfig> lfsr;  // seed 0 = derive from the master seed
  int fixed_output = 1;
  std::optional<PermSet> permset;

  PriorKind prior = PriorKind::kUniform;
  RecoverySpec recovery;
  // Candidate range for recovery, inclusive; default is the full domain.
  std::optional<std::pair<std::uint32_t, std::uint32_t>> omega;

  bool compute_ia = true;
  bool compute_ul = true;

  std::uint64_t seed = 1;
  std::string out_dir;  // empty: compute metrics only, write nothing
};

// JSON round trip for configs; unknown keys are rejected.
ExperimentConfig experiment_config_from_json_text(const std::string& text);
ExperimentConfig experiment_config_from_json_file(const std::string& path);

// The effective per-bit profile the config describes, before any chip
// sampling (voltage route: cell rates mixed through the shuffle set).
FailureProfile config_profile(const ExperimentConfig& config);

// The mechanism realizing the config's operating point.
Mechanism build_mechanism(const ExperimentConfig& config);

// Materializes the configured dataset (generates or loads).
std::vector<std::uint32_t> load_dataset(const ExperimentConfig& config);

struct RecoveryMetrics {
  std::string algo;  // "em" | "clr"
  double count_mse = 0.0;  // mean squared per-bin count error vs original
  double tv = 0.0;         // total variation vs the original histogram
  int iterations = 0;
  bool converged = true;
};

struct ResultRecord {
  double epsilon_total = 0.0;
  int z = 0;
  int count = 0;
  std::optional<double> ia_mean;
  std::optional<double> ia_std;
  std::optional<double> ul_mean;
  std::vector<RecoveryMetrics> recovery;
  std::uint64_t seed = 0;
  // Wall-clock diagnostics; deliberately excluded from serialized
  // artifacts so identical runs stay byte-identical.
  double runtime_seconds = 0.0;
};

std::string result_record_json(const ResultRecord& record);

// Runs the full pipeline: data, perturbation, metrics, recovery.  With
// an output directory set, writes records.csv (index, input, output,
// pattern_index and per-record metrics), histogram.csv (original,
// perturbed and recovered counts per value), result.json, and in chip
// mode fault_map.json.  Partially written artifacts are removed when a
// stage fails.
ResultRecord run_experiment(const ExperimentConfig& config);

struct ComparisonResult {
  ResultRecord sram;
  ResultRecord rr;
  double output_tv = 0.0;  // between the two arms' output histograms
};

// Runs the mechanism and a per-bit randomized-response reference over
// the same dataset at the matched per-bit budget (flip probability
// f_i/2 on every failure-prone position).  With an output directory
// set, writes comparison.json.
ComparisonResult compare_rr(const ExperimentConfig& config);

std::string comparison_json(const ComparisonResult& result);

}  // namespace sramdp

#endif  // SRAMDP_HARNESS_HPP_
