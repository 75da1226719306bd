#ifndef SRAMDP_PERMUTATION_HPP_
#define SRAMDP_PERMUTATION_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "sramdp/rng.hpp"
#include "sramdp/word.hpp"

namespace sramdp {

// A bit-shuffle pattern: a permutation of the bit positions of a word.
//
// The pattern is destination-ordered: entry d names the source position
// whose bit lands at destination position d, i.e.
//
//   apply(x)[d] = x[pattern[d]]      (positions MSB first)
//
// so the identity pattern on 8 bits is [0,1,2,3,4,5,6,7].
class PermPattern {
 public:
  explicit PermPattern(std::vector<int> sources);

  static PermPattern identity(int width);

  int width() const { return static_cast<int>(sources_.size()); }

  // Source position feeding destination d.
  int source_of(int dest) const { return sources_[static_cast<std::size_t>(dest)]; }

  const std::vector<int>& sources() const { return sources_; }

  // Forward shuffle: out[d] = x[source_of(d)].
  Word apply(const Word& x) const;

  // Inverse shuffle; invert(apply(x)) == x for every x.
  Word invert(const Word& y) const;

  friend bool operator==(const PermPattern& a, const PermPattern& b) = default;

 private:
  std::vector<int> sources_;
};

Word apply_permutation(const Word& x, const PermPattern& p);
Word invert_permutation(const Word& y, const PermPattern& p);

// A weighted set of shuffle patterns of one common width.  The mechanism
// draws one pattern per write; the weights are the selection
// probabilities.
class PermSet {
 public:
  PermSet(std::vector<PermPattern> patterns, std::vector<double> weights);

  // Uniform weights over the given patterns.
  static PermSet uniform(std::vector<PermPattern> patterns);

  // The default 8-bit set: four patterns that keep the four MSB positions
  // fixed and permute the four LSB positions (identity, adjacent-pair
  // swap, half rotation, reversal), selected uniformly.  Every LSB
  // position is mapped to every LSB cell by exactly one pattern, so a
  // 2-bit selector suffices in hardware.
  static PermSet default_set(int width = 8);

  // Identity-only set (no shuffling) for any width.
  static PermSet identity_only(int width);

  // JSON round trip.  Schema:
  //   {"width": 8, "patterns": [[0,1,...], ...], "weights": [0.25, ...]}
  // "weights" may be omitted for uniform selection.
  static PermSet from_json_text(const std::string& text);
  static PermSet from_json_file(const std::string& path);
  std::string to_json_text() const;

  int width() const { return patterns_.front().width(); }
  std::size_t size() const { return patterns_.size(); }
  const PermPattern& pattern(std::size_t i) const { return patterns_[i]; }
  const std::vector<double>& weights() const { return weights_; }
  bool uniform_weights() const;

  // Draws a pattern index according to the weights.
  int sample_index(Rng& rng) const;

  // Mapping matrix m[i][k]: the probability that the bit at source
  // position i is stored in cell (destination position) k.  Rows sum
  // to 1.
  std::vector<std::vector<double>> mapping_matrix() const;

 private:
  std::vector<PermPattern> patterns_;
  std::vector<double> weights_;
};

}  // namespace sramdp

#endif  // SRAMDP_PERMUTATION_HPP_
