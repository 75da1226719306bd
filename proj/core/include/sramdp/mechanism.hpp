#ifndef SRAMDP_MECHANISM_HPP_
#define SRAMDP_MECHANISM_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "sramdp/candidates.hpp"
#include "sramdp/cellspec.hpp"
#include "sramdp/chip.hpp"
#include "sramdp/failure_profile.hpp"
#include "sramdp/lfsr.hpp"
#include "sramdp/permutation.hpp"
#include "sramdp/rng.hpp"
#include "sramdp/word.hpp"

namespace sramdp {

// How cell failures are realized per write.
//  - Stochastic: every write draws fresh independent failures per cell
//    with the cell's calibrated probability (the i.i.d. model).
//  - Chip: failures come from the static fault map of a sampled chip;
//    record i is written to word (i mod words).
enum class FailureMode { kStochastic, kChip };

// Where the mechanism's own random bits (pattern selection and injected
// noise) come from.  The LFSR source mirrors the hardware generator;
// the system source uses the seeded engine passed to perturb().
enum class NoiseSource { kSeededSystem, kLfsr };

struct LfsrConfig {
  int width = 8;
  std::optional<std::uint32_t> taps;  // default: built-in maximal taps
  std::uint64_t seed = 1;
};

// Full description of one mechanism instance.
//
// The operating point is given either as per-position cell types plus a
// supply voltage, or as explicit per-cell failure rates (stochastic mode
// only).  Cell rates are indexed by storage position, i.e. after the
// shuffle.
struct MechanismConfig {
  int width = 8;
  std::optional<PermSet> permset;  // default: default_set(8) for width 8,
                                   // identity otherwise
  FailureMode mode = FailureMode::kStochastic;
  NoiseSource noise_source = NoiseSource::kSeededSystem;
  int fixed_output = 1;  // what a failed cell reads out before noise

  std::vector<CellSpec> cells;  // one spec per position when voltage-driven
  std::optional<double> voltage;
  std::optional<std::vector<double>> cell_rates;

  int chip_words = 0;  // chip mode: number of words in the array
  std::uint64_t chip_seed = 0;
  std::optional<LfsrConfig> lfsr;
};

struct PerturbResult {
  Word output;
  int pattern_index;
};

// Independent random streams for the three random stages of a write, so
// experiments can vary one stage while holding the others fixed.  The
// single-Rng perturb overloads draw all three stages from one stream.
struct MechanismStreams {
  Rng pattern;
  Rng failure;
  Rng noise;
};

// Intermediate values of one write/read cycle, for debugging and for
// tests that pin down the per-stage behaviour.
struct PerturbTrace {
  int pattern_index;
  Word shuffled;       // after the forward shuffle
  FaultMap faults;     // per-cell failure mask for this access
  Word raw_readout;    // failed cells collapsed to the fixed output value
  Word noised;         // failed cells replaced by fresh random bits
  Word output;         // after the reverse shuffle
};

// Effective per-bit failure rates: the probability that source bit i
// lands in a failed cell, i.e. the pattern-weighted mix of per-cell
// rates, f_i = sum_k m[i][k] * cell_rates[k].
FailureProfile effective_f(const PermSet& permset,
                           const std::vector<double>& cell_rates);

// Probability that input x is observed as o: the product over bit
// positions of f_i/2 where the bits differ and 1 - f_i/2 where they
// agree.
double channel_prob(const Word& x, const Word& o, const FailureProfile& f);

// The channel restricted to a candidate set: entry (i, j) is
// channel_prob(omega[i], omega[j]).  Rows sum to 1 when the set is the
// full domain.
class Channel {
 public:
  static constexpr std::size_t kMaxCandidates = 1u << 16;

  Channel(CandidateSet omega, FailureProfile f);

  const CandidateSet& omega() const { return omega_; }
  const FailureProfile& profile() const { return f_; }

  // Single entry, computed from the per-bit factorization.
  double prob(std::size_t x_index, std::size_t o_index) const;

  // The materialized matrix, row major, rows indexed by input.
  const std::vector<std::vector<double>>& matrix() const { return matrix_; }

 private:
  CandidateSet omega_;
  FailureProfile f_;
  std::vector<std::vector<double>> matrix_;
};

Channel build_channel(const CandidateSet& omega, const FailureProfile& f);

// The mechanism: shuffle, store at low voltage, replace failed readouts
// with fresh random bits, unshuffle.
//
// perturb() is pure given the RNG handle except for two documented bits
// of state: the LFSR register (when the LFSR noise source is selected)
// and the word cursor used by plain perturb() in chip mode.  Concurrent
// callers must use separate instances with independent RNG streams.
class Mechanism {
 public:
  explicit Mechanism(MechanismConfig config);

  int width() const { return config_.width; }
  const MechanismConfig& config() const { return config_; }
  const PermSet& permset() const { return permset_; }

  // Resolved per-cell failure rates at the operating point.
  const std::vector<double>& cell_rates() const { return cell_rates_; }

  // Effective per-bit profile implied by the cell rates and the shuffle.
  const FailureProfile& profile() const { return profile_; }

  // Chip-mode accessors.
  const ChipInstance& chip() const;

  // Empirical effective profile of the sampled chip: per-bit rates from
  // the fraction of failed cells across all words.
  FailureProfile average_profile() const;

  // One write/read cycle.  perturb() advances an internal word cursor;
  // perturb_at() addresses a word explicitly (record_index mod words).
  PerturbResult perturb(const Word& x, Rng& rng);
  PerturbResult perturb_at(const Word& x, std::size_t record_index, Rng& rng);
  PerturbResult perturb_at(const Word& x, std::size_t record_index,
                           MechanismStreams& streams);
  PerturbTrace perturb_trace(const Word& x, std::size_t record_index, Rng& rng);
  PerturbTrace perturb_trace(const Word& x, std::size_t record_index,
                             MechanismStreams& streams);

 private:
  PerturbTrace trace_impl(const Word& x, std::size_t record_index,
                          Rng& pattern_rng, Rng& failure_rng, Rng& noise_rng);
  int select_pattern(Rng& rng);
  int noise_bit(Rng& rng);

  MechanismConfig config_;
  PermSet permset_;
  std::vector<double> cell_rates_;
  FailureProfile profile_;
  std::optional<ChipInstance> chip_;
  std::optional<LfsrState> lfsr_;
  std::size_t cursor_ = 0;
};

// Classic binary randomized response: keep the bit with probability
// e^eps / (1 + e^eps), flip it otherwise.
double rr_keep_probability(double eps);
std::array<std::array<double, 2>, 2> rr_matrix(double eps);
int rr_reference(int bit, double eps, Rng& rng);

// Word-level reference arm: independently applies randomized response to
// every failure-prone position of the profile, with the per-bit budget
// eps_i = ln((1 - f_i/2) / (f_i/2)) that makes the per-bit channel match
// the mechanism's.
Word rr_perturb(const Word& x, const FailureProfile& f, Rng& rng);

}  // namespace sramdp

#endif  // SRAMDP_MECHANISM_HPP_
