#include "sramdp/word.hpp"

#include <string>

#include "sramdp/errors.hpp"

namespace sramdp {

Word Word::encode(std::uint64_t value, int width) {
  if (width < 1 || width > kMaxWidth) {
    throw ConfigError("word width must be in [1, 32], got " +
                      std::to_string(width));
  }
  const std::uint64_t limit = 1ull << width;
  if (value >= limit) {
    throw ConfigError("value " + std::to_string(value) +
                      " does not fit in a " + std::to_string(width) +
                      "-bit word");
  }
  return Word(static_cast<std::uint32_t>(value), width);
}

Word Word::from_string(std::string_view bits) {
  if (bits.empty() || bits.size() > kMaxWidth) {
    throw ConfigError("bit string must have 1..32 characters, got " +
                      std::to_string(bits.size()));
  }
  std::uint32_t value = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') {
      throw ConfigError(std::string("bit string may contain only '0' and "
                                    "'1', got '") +
                        c + "'");
    }
    value = (value << 1) | static_cast<std::uint32_t>(c == '1');
  }
  return Word(value, static_cast<int>(bits.size()));
}

int Word::bit(int position) const {
  if (position < 0 || position >= width_) {
    throw ConfigError("bit position " + std::to_string(position) +
                      " out of range for width " + std::to_string(width_));
  }
  return static_cast<int>((value_ >> (width_ - 1 - position)) & 1u);
}

Word Word::with_bit(int position, int bit) const {
  if (position < 0 || position >= width_) {
    throw ConfigError("bit position " + std::to_string(position) +
                      " out of range for width " + std::to_string(width_));
  }
  if (bit != 0 && bit != 1) {
    throw ConfigError("bit value must be 0 or 1, got " + std::to_string(bit));
  }
  const std::uint32_t mask = 1u << (width_ - 1 - position);
  std::uint32_t value = value_;
  if (bit) {
    value |= mask;
  } else {
    value &= ~mask;
  }
  return Word(value, width_);
}

std::string Word::to_string() const {
  std::string out(static_cast<std::size_t>(width_), '0');
  for (int i = 0; i < width_; ++i) {
    if (bit(i)) out[static_cast<std::size_t>(i)] = '1';
  }
  return out;
}

}  // namespace sramdp
