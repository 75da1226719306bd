#include "sramdp/lfsr.hpp"

#include <bit>
#include <string>

#include "sramdp/errors.hpp"

namespace sramdp {

namespace {

// Tap positions (1-based, highest tap = width) of one maximal-length
// polynomial per width, from the standard tables.  Position t maps to
// register bit (width - t), so the output bit is always tapped.
struct TapEntry {
  int width;
  int taps[4];  // zero-terminated after the first entry
};

constexpr TapEntry kTapTable[] = {
    {2, {2, 1, 0, 0}},   {3, {3, 2, 0, 0}},    {4, {4, 3, 0, 0}},
    {5, {5, 3, 0, 0}},   {6, {6, 5, 0, 0}},    {7, {7, 6, 0, 0}},
    {8, {8, 6, 5, 4}},   {9, {9, 5, 0, 0}},    {10, {10, 7, 0, 0}},
    {11, {11, 9, 0, 0}}, {12, {12, 11, 10, 4}}, {13, {13, 12, 11, 8}},
    {14, {14, 13, 12, 2}}, {15, {15, 14, 0, 0}}, {16, {16, 15, 13, 4}},
    {17, {17, 14, 0, 0}}, {18, {18, 11, 0, 0}}, {19, {19, 18, 17, 14}},
    {20, {20, 17, 0, 0}}, {21, {21, 19, 0, 0}}, {22, {22, 21, 0, 0}},
    {23, {23, 18, 0, 0}}, {24, {24, 23, 22, 17}},
};

std::uint32_t register_limit(int width) { return 1u << width; }

}  // namespace

std::uint32_t default_taps(int width) {
  for (const TapEntry& e : kTapTable) {
    if (e.width == width) {
      std::uint32_t mask = 0;
      for (int t : e.taps) {
        if (t == 0) break;
        mask |= 1u << (width - t);
      }
      return mask;
    }
  }
  throw ConfigError("no built-in maximal-length taps for LFSR width " +
                    std::to_string(width) + " (supported: 2..24); supply a "
                    "tap mask explicitly");
}

LfsrState make_lfsr(int width, std::uint32_t seed) {
  return make_lfsr(width, default_taps(width), seed);
}

LfsrState make_lfsr(int width, std::uint32_t taps, std::uint32_t seed) {
  if (width < 2 || width > 24) {
    throw ConfigError("LFSR width must be in [2, 24], got " +
                      std::to_string(width));
  }
  if (taps == 0 || taps >= register_limit(width)) {
    throw ConfigError("LFSR tap mask out of range for width " +
                      std::to_string(width));
  }
  if ((taps & 1u) == 0) {
    throw ConfigError("LFSR tap mask must include the output position "
                      "(bit 0), got mask " + std::to_string(taps));
  }
  if (seed == 0) {
    throw ConfigError("LFSR seed must not be all-zero: the zero register "
                      "never leaves the zero state");
  }
  if (seed >= register_limit(width)) {
    throw ConfigError("LFSR seed " + std::to_string(seed) +
                      " does not fit in a " + std::to_string(width) +
                      "-bit register");
  }
  return LfsrState{width, taps, seed};
}

LfsrState seeded_lfsr(int width, std::uint64_t seed) {
  if (width < 2 || width > 24) {
    throw ConfigError("LFSR width must be in [2, 24], got " +
                      std::to_string(width));
  }
  const std::uint64_t nonzero_states = register_limit(width) - 1u;
  const std::uint32_t reg = static_cast<std::uint32_t>(seed % nonzero_states) + 1u;
  return make_lfsr(width, default_taps(width), reg);
}

std::pair<int, LfsrState> lfsr_step(const LfsrState& state) {
  const int out = static_cast<int>(state.reg & 1u);
  const std::uint32_t feedback =
      static_cast<std::uint32_t>(std::popcount(state.reg & state.taps) & 1);
  LfsrState next = state;
  next.reg = (state.reg >> 1) | (feedback << (state.width - 1));
  return {out, next};
}

std::pair<Word, LfsrState> lfsr_next(const LfsrState& state, int nbits) {
  if (nbits < 1 || nbits > Word::kMaxWidth) {
    throw ConfigError("LFSR draw width must be in [1, 32], got " +
                      std::to_string(nbits));
  }
  LfsrState cur = state;
  std::uint64_t value = 0;
  for (int i = 0; i < nbits; ++i) {
    auto [bit, next] = lfsr_step(cur);
    value = (value << 1) | static_cast<std::uint64_t>(bit);
    cur = next;
  }
  return {Word::encode(value, nbits), cur};
}

}  // namespace sramdp
