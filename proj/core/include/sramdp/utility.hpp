#ifndef SRAMDP_UTILITY_HPP_
#define SRAMDP_UTILITY_HPP_

#include <cstdint>
#include <vector>

#include "sramdp/failure_profile.hpp"
#include "sramdp/word.hpp"

namespace sramdp {

// Distribution of the signed integer error O - X a mechanism adds to a
// width-n word, over the support [-(2^n - 1), 2^n - 1].  The error is
// zero-mean and symmetric for any profile because every bit flips up or
// down with equal probability f_i/4.
class DeltaPmf {
 public:
  DeltaPmf(int width, std::vector<double> probs);

  int width() const { return width_; }
  std::int64_t min_delta() const { return -max_delta(); }
  std::int64_t max_delta() const { return (1ll << width_) - 1; }

  // Mass at a (0 outside the support).
  double prob(std::int64_t a) const;

  // Mass vector indexed from min_delta() to max_delta().
  const std::vector<double>& probs() const { return probs_; }

  double mean() const;
  double expected_abs() const;

 private:
  int width_;
  std::vector<double> probs_;
};

// Error distribution by the per-bit convolution recursion: adding bit j
// (weight 2^(j-1), LSB up) moves the error by -2^(j-1), 0, +2^(j-1) with
// probabilities f_j/4, 1 - f_j/2, f_j/4.  Profiles are MSB-first as
// everywhere else; widths up to 20.
DeltaPmf delta_pmf(const FailureProfile& f);

// Same distribution by exhaustive enumeration of all 3^n per-bit error
// combinations.  Exponentially slow; widths up to 12.  Kept as an
// independent cross-check of the recursion.
DeltaPmf delta_pmf_bruteforce(const FailureProfile& f);

// Expected absolute error E|O - X| for uniformly distributed inputs.
double expected_l1(const FailureProfile& f);

// Closed-form upper bound on the expected absolute error for a
// homogeneous profile (all n bits at rate f):
//   (4^n - 2^n) * ((1 - f/2)^(n+1) - (f/4)^(n+1)) / (1 - 3f/4).
double l1_bound_homogeneous(double f, int n);

// Utility loss conditioned on a concrete input:
//   UL(x) = sum_O P(O | x) * |decode(O) - decode(x)|,
// summed over the full width-n output domain (n up to 16).
double ul_meter(const Word& x, const FailureProfile& f);

}  // namespace sramdp

#endif  // SRAMDP_UTILITY_HPP_
