#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sramdp/errors.hpp"
#include "sramdp/word.hpp"

using sramdp::ConfigError;
using sramdp::Word;

TEST_CASE("encode renders MSB-first bit strings") {
  CHECK(Word::encode(166, 8).to_string() == "10100110");
  CHECK(Word::encode(0, 8).to_string() == "00000000");
  CHECK(Word::encode(255, 8).to_string() == "11111111");
  CHECK(Word::encode(1, 8).to_string() == "00000001");
  CHECK(Word::encode(1, 1).to_string() == "1");
}

TEST_CASE("from_string decodes MSB-first") {
  CHECK(Word::from_string("10100110").decode() == 166);
  CHECK(Word::from_string("00000001").decode() == 1);
  CHECK(Word::from_string("11110110").decode() == 246);
  CHECK(Word::from_string("0").decode() == 0);
  CHECK(Word::from_string("10100110").width() == 8);
}

TEST_CASE("decode inverts encode over whole small domains") {
  for (int width = 1; width <= 10; ++width) {
    for (std::uint32_t v = 0; v < (1u << width); ++v) {
      const Word w = Word::encode(v, width);
      CHECK(w.decode() == v);
      CHECK(w.width() == width);
      CHECK(Word::from_string(w.to_string()) == w);
    }
  }
}

TEST_CASE("bit positions are MSB first") {
  const Word w = Word::from_string("10000001");
  CHECK(w.bit(0) == 1);
  CHECK(w.bit(1) == 0);
  CHECK(w.bit(7) == 1);

  const Word x = Word::encode(0b10100110, 8);
  int decoded = 0;
  for (int i = 0; i < 8; ++i) decoded = (decoded << 1) | x.bit(i);
  CHECK(decoded == 0b10100110);
}

TEST_CASE("with_bit replaces a single position") {
  const Word w = Word::from_string("00000000");
  CHECK(w.with_bit(0, 1).to_string() == "10000000");
  CHECK(w.with_bit(7, 1).to_string() == "00000001");
  CHECK(w.with_bit(3, 0) == w);

  const Word x = Word::from_string("10100110");
  CHECK(x.with_bit(2, 0).with_bit(2, 1) == x);
}

TEST_CASE("zero constructs the all-zero word") {
  CHECK(Word::zero(8) == Word::encode(0, 8));
  CHECK(Word::zero(3).to_string() == "000");
}

TEST_CASE("encode rejects out-of-range values and widths") {
  CHECK_THROWS_AS(Word::encode(256, 8), ConfigError);
  CHECK_THROWS_AS(Word::encode(2, 1), ConfigError);
  CHECK_THROWS_AS(Word::encode(0, 0), ConfigError);
  CHECK_THROWS_AS(Word::encode(0, 33), ConfigError);
  CHECK_NOTHROW(Word::encode(0xFFFFFFFFull, 32));
}

TEST_CASE("from_string rejects non-binary input") {
  CHECK_THROWS_AS(Word::from_string(""), ConfigError);
  CHECK_THROWS_AS(Word::from_string("10102"), ConfigError);
  CHECK_THROWS_AS(Word::from_string("1 0"), ConfigError);
}

TEST_CASE("bit access is bounds-checked") {
  const Word w = Word::encode(5, 4);
  CHECK_THROWS_AS(w.bit(-1), ConfigError);
  CHECK_THROWS_AS(w.bit(4), ConfigError);
  CHECK_THROWS_AS(w.with_bit(4, 1), ConfigError);
  CHECK_THROWS_AS(w.with_bit(0, 2), ConfigError);
}
