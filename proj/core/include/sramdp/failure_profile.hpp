#ifndef SRAMDP_FAILURE_PROFILE_HPP_
#define SRAMDP_FAILURE_PROFILE_HPP_

#include <cstddef>
#include <vector>

namespace sramdp {

// Per-bit effective failure rates of a mechanism, MSB first.
//
// Entry i is the probability that the bit at position i ends up stored in
// a failed cell (after accounting for the shuffle), in which case its
// readout is replaced by a fresh fair random bit.  Positions with rate 0
// pass through unchanged ("intact"); positions with rate > 0 are
// failure-prone.
class FailureProfile {
 public:
  explicit FailureProfile(std::vector<double> rates);

  static FailureProfile zeros(int width);
  static FailureProfile homogeneous(double rate, int width);

  int width() const { return static_cast<int>(rates_.size()); }
  double operator[](std::size_t i) const { return rates_[i]; }
  const std::vector<double>& rates() const { return rates_; }

  // Positions with a non-zero failure rate, ascending.
  std::vector<int> prone_positions() const;
  int z() const;  // number of failure-prone positions

  friend bool operator==(const FailureProfile& a,
                         const FailureProfile& b) = default;

 private:
  std::vector<double> rates_;
};

}  // namespace sramdp

#endif  // SRAMDP_FAILURE_PROFILE_HPP_
