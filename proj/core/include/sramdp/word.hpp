#ifndef SRAMDP_WORD_HPP_
#define SRAMDP_WORD_HPP_

#include <cstdint>
#include <string>
#include <string_view>

namespace sramdp {

// A fixed-width binary word of 1..32 bits.
//
// Bit positions are most-significant-first: position 0 is the MSB and
// position width()-1 is the LSB.  This matches the way calibration
// tables, failure profiles and shuffle patterns are written down
// throughout the library.
class Word {
 public:
  static constexpr int kMaxWidth = 32;

  // Encodes a non-negative integer into a width-bit word.
  // Throws ConfigError if the value does not fit or the width is out of
  // range.
  static Word encode(std::uint64_t value, int width);

  // Parses a string of '0'/'1' characters, MSB first.
  static Word from_string(std::string_view bits);

  // All-zero word of the given width.
  static Word zero(int width) { return encode(0, width); }

  // The integer value this word encodes.
  std::uint32_t decode() const { return value_; }

  int width() const { return width_; }

  // Bit at the given MSB-first position, 0 or 1.
  int bit(int position) const;

  // Copy of this word with one bit replaced.
  Word with_bit(int position, int bit) const;

  // "10100110"-style rendering, MSB first.
  std::string to_string() const;

  friend bool operator==(const Word& a, const Word& b) = default;

 private:
  Word(std::uint32_t value, int width) : value_(value), width_(width) {}

  std::uint32_t value_;
  int width_;
};

}  // namespace sramdp

#endif  // SRAMDP_WORD_HPP_
