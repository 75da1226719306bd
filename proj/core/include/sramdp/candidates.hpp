#ifndef SRAMDP_CANDIDATES_HPP_
#define SRAMDP_CANDIDATES_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "sramdp/word.hpp"

namespace sramdp {

// An ordered set of distinct candidate values out of the width-bit
// domain.  Recovery algorithms and adversary priors are defined over a
// candidate set; distributions are index-aligned with it.
class CandidateSet {
 public:
  CandidateSet(std::vector<std::uint32_t> values, int width);

  // All 2^width values, ascending.  Width is capped at 16 so the set
  // stays materializable.
  static CandidateSet full_domain(int width);

  // The inclusive range [lo, hi].
  static CandidateSet range(std::uint32_t lo, std::uint32_t hi, int width);

  std::size_t size() const { return values_.size(); }
  int width() const { return width_; }
  std::uint32_t value(std::size_t i) const { return values_[i]; }
  const std::vector<std::uint32_t>& values() const { return values_; }
  Word word(std::size_t i) const { return Word::encode(values_[i], width_); }

  std::optional<std::size_t> index_of(std::uint32_t value) const;

  friend bool operator==(const CandidateSet& a, const CandidateSet& b) = default;

 private:
  std::vector<std::uint32_t> values_;
  int width_;
};

// A probability distribution aligned with a candidate set: entry i is
// the mass of the set's i-th value.  Entries must be non-negative and
// sum to 1 (within 1e-9).
class Distribution {
 public:
  explicit Distribution(std::vector<double> probs);

  static Distribution uniform(std::size_t size);

  // Normalizes non-negative weights.  Throws NumericError when the total
  // mass is zero.
  static Distribution normalized(std::vector<double> weights);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  const std::vector<double>& probs() const { return probs_; }

 private:
  std::vector<double> probs_;
};

// Total variation distance between two distributions over the same set.
double tv_distance(const Distribution& a, const Distribution& b);
double tv_distance(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace sramdp

#endif  // SRAMDP_CANDIDATES_HPP_
