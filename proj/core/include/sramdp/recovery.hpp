#ifndef SRAMDP_RECOVERY_HPP_
#define SRAMDP_RECOVERY_HPP_

#include <span>
#include <vector>

#include "sramdp/candidates.hpp"
#include "sramdp/failure_profile.hpp"
#include "sramdp/word.hpp"

namespace sramdp {

// Iterative Bayesian update of the candidate distribution.
struct EmConfig {
  double delta = 1e-3;       // stop when max per-candidate change <= delta
  int max_iterations = 500;
};

struct EmResult {
  Distribution estimate;
  int iterations = 0;
  bool converged = false;
  double final_change = 0.0;
};

// Estimates the input distribution from perturbed observations.
// Starting from the uniform prior, each round computes the posterior of
// every observation under the current prior and the per-bit channel, and
// replaces the prior with the average posterior.  Stops when the largest
// per-candidate change drops to delta, or after max_iterations (in which
// case the result carries converged = false).
//
// The candidate set is capped at 4096 values.  Observations need not lie
// inside the candidate set, but every observation must have non-zero
// likelihood under at least one candidate.
EmResult em_recover(std::span<const Word> observations,
                    const FailureProfile& f, const CandidateSet& omega,
                    const EmConfig& config = {});

// Variant with one profile per observation, for recovering data written
// to words with known, differing fault maps.
EmResult em_recover(std::span<const Word> observations,
                    std::span<const FailureProfile> per_record_f,
                    const CandidateSet& omega, const EmConfig& config = {});

// Moment side information for the least-squares reconstruction:
// sum_X X^order * P(X) must equal value.
struct MomentConstraint {
  int order;
  double value;
};

struct ClrConfig {
  double pg_tolerance = 1e-8;    // stop on this gradient-mapping norm
  int max_iterations = 100000;   // per penalty round
  double moment_tolerance = 1e-6;
  double penalty_initial = 1e2;
  double penalty_growth = 10.0;
  int penalty_rounds = 12;
};

struct ClrResult {
  Distribution estimate;
  int iterations = 0;      // total across penalty rounds
  double pg_norm = 0.0;
  double moment_violation = 0.0;  // max over constraints, 0 when none
};

// Constrained least-squares reconstruction: minimizes
//   (1/2) * || P * M - Q ||^2
// over the probability simplex, where M is the channel matrix over the
// candidate set and Q the observed output frequencies.  Solved by
// projected gradient descent with a fixed step from the Lipschitz
// constant of M*M^T (with Nesterov acceleration and adaptive restart so
// ill-conditioned channels converge within the iteration budget).
//
// Moment equalities are enforced by escalating quadratic penalties; if
// the violation cannot be driven below moment_tolerance the constraints
// are declared infeasible.
ClrResult clr_recover(std::span<const Word> observations,
                      const FailureProfile& f, const CandidateSet& omega,
                      std::span<const MomentConstraint> moments = {},
                      const ClrConfig& config = {});

// Euclidean projection onto the probability simplex
// {p : p_i >= 0, sum p_i = 1}.  Exposed for tests.
std::vector<double> project_to_simplex(std::vector<double> v);

}  // namespace sramdp

#endif  // SRAMDP_RECOVERY_HPP_
