#ifndef SRAMDP_PRIVACY_HPP_
#define SRAMDP_PRIVACY_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sramdp/candidates.hpp"
#include "sramdp/failure_profile.hpp"
#include "sramdp/word.hpp"

namespace sramdp {

// Privacy loss contributed by one failure-prone bit with effective
// failure rate f in (0, 1]: ln((1 - f/2) / (f/2)).
double per_bit_epsilon(double f);

// Worst-case privacy loss of the whole mechanism: the sum of per-bit
// contributions over the failure-prone positions.  Intact positions
// (f_i = 0) carry no randomness and are excluded from the sum; call
// sites that require every position to be failure-prone should pass the
// expected count via require_prone.
double epsilon_inf(const FailureProfile& f);

// As above, but errors when any of the named positions has a zero rate
// (a declared failure-prone cell that cannot fail makes the budget
// unbounded).
double epsilon_inf(const FailureProfile& f, std::span<const int> prone_positions);

// Inverts the budget across z equally-noisy cells: the homogeneous rate
// f = 2 / (1 + e^(eps/z)) for which z cells spend exactly eps.
// eps = 0 yields f = 1 (pure noise).
double f_for_epsilon(double eps, int z);

// Upper bound on the budget shift when every rate f_i drifts to
// alpha_i * f_i (supply droop, temperature, ...):
// |delta eps| <= sum_i |ln(2 * alpha_i - 1)|.  Each alpha_i must exceed
// 1/2; at or below that the bound degenerates.
double droop_bound(std::span<const double> alpha);

// The drifted profile itself, with each alpha_i * f_i clamped to [0, 1].
FailureProfile drifted_profile(const FailureProfile& f,
                               std::span<const double> alpha);

// What the adversary knows before seeing the output.
enum class PriorKind {
  kUniform,          // K1: all candidates equally likely
  kDatasetInformed,  // K2: candidate mass follows the dataset histogram
  kCustom,
};

struct AdversaryPrior {
  CandidateSet omega;
  Distribution dist;
  PriorKind kind;
};

// Builds a prior over the candidate set.  The dataset is only consulted
// for the dataset-informed kind, where candidate mass is the value's
// frequency (renormalized over the set; errors if the set carries zero
// dataset mass).
AdversaryPrior build_prior(PriorKind kind, const CandidateSet& omega,
                           std::span<const std::uint32_t> dataset = {});

AdversaryPrior custom_prior(const CandidateSet& omega,
                            std::vector<double> weights);

// All inputs that could have produced observation o: candidates that
// agree with o on every intact position, free on the failure-prone ones
// (2^z values).
CandidateSet indistinguishable_set(const Word& o, const FailureProfile& f);

// Maximum-a-posteriori guess for the input behind observation o.
// Ties break toward the smallest decoded value.
Word mle_infer(const Word& o, const AdversaryPrior& prior,
               const FailureProfile& f);

// Inference accuracy: the posterior-expected absolute distance between
// the adversary's best guess and the truth,
//   IA(o) = sum_X P(X | o) * |decode(guess) - decode(X)|.
// Smaller is better for the adversary.
double ia_meter(const Word& o, const AdversaryPrior& prior,
                const FailureProfile& f);

// Summary of the privacy characteristics of one profile.
struct PrivacyReport {
  struct PerBit {
    int position;
    double f;
    std::optional<double> epsilon;  // empty for intact positions
  };

  double epsilon_total;
  std::vector<PerBit> per_bit;
  bool intact_as_infinite = false;  // report intact bits as eps = inf
  std::vector<double> alpha;        // drift factors the bound was made for
  std::optional<double> drift_bound;
  std::optional<double> ia_mean;    // filled when observations were run
  std::vector<double> ia_samples;
};

PrivacyReport make_privacy_report(const FailureProfile& f,
                                  std::span<const double> alpha = {},
                                  bool intact_as_infinite = false);

}  // namespace sramdp

#endif  // SRAMDP_PRIVACY_HPP_
