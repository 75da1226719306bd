#ifndef SRAMDP_LFSR_HPP_
#define SRAMDP_LFSR_HPP_

#include <cstdint>
#include <utility>

#include "sramdp/word.hpp"

namespace sramdp {

// State of a Fibonacci linear-feedback shift register.
//
// The register shifts right; the bit shifted out of position 0 is the
// output bit and the XOR of the tapped positions is fed into the top.
// The register therefore always holds the next `width` output bits,
// LSB first.  With maximal-length taps and a non-zero seed the state
// runs through all 2^width - 1 non-zero values before repeating.
struct LfsrState {
  int width;
  std::uint32_t taps;  // bit i set = register position i is tapped
  std::uint32_t reg;   // never zero

  friend bool operator==(const LfsrState& a, const LfsrState& b) = default;
};

// Maximal-length tap mask for widths 2..24 (one standard choice per
// width).  Throws ConfigError for widths without a built-in entry.
std::uint32_t default_taps(int width);

// Builds an LFSR from an explicit initial register value.
// The seed must satisfy 0 < seed < 2^width; the all-zero register is a
// fixed point of the recurrence and is rejected.
LfsrState make_lfsr(int width, std::uint32_t seed);
LfsrState make_lfsr(int width, std::uint32_t taps, std::uint32_t seed);

// Folds an arbitrary 64-bit seed into a valid non-zero register value.
LfsrState seeded_lfsr(int width, std::uint64_t seed);

// Advances the register by one bit.  Returns the output bit and the new
// state.
std::pair<int, LfsrState> lfsr_step(const LfsrState& state);

// Draws `nbits` (1..32) consecutive output bits, first bit in the MSB of
// the returned word.
std::pair<Word, LfsrState> lfsr_next(const LfsrState& state, int nbits);

}  // namespace sramdp

#endif  // SRAMDP_LFSR_HPP_
