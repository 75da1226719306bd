#include "sramdp/rng.hpp"

#include <cmath>

#include "sramdp/errors.hpp"

namespace sramdp {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t state = master;
  std::uint64_t mixed = splitmix64(state);
  state = mixed ^ (stream * 0xd1342543de82ef95ull);
  return splitmix64(state);
}

std::uint64_t derive_seed(std::uint64_t master, SeedStream stream) {
  return derive_seed(master, static_cast<std::uint64_t>(stream));
}

double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

bool bernoulli(Rng& rng, double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return uniform01(rng) < p;
}

int random_bit(Rng& rng) { return static_cast<int>(rng() >> 63); }

std::uint32_t uniform_below(Rng& rng, std::uint32_t n) {
  if (n == 0) throw ConfigError("uniform_below: n must be positive");
  if (n == 1) return 0;
  std::uint32_t mask = n - 1;
  mask |= mask >> 1;
  mask |= mask >> 2;
  mask |= mask >> 4;
  mask |= mask >> 8;
  mask |= mask >> 16;
  for (;;) {
    std::uint32_t draw = static_cast<std::uint32_t>(rng() >> 32) & mask;
    if (draw < n) return draw;
  }
}

double GaussianSampler::next(Rng& rng) {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Box-Muller; u1 is bounded away from zero so the log is finite.
  double u1 = uniform01(rng);
  double u2 = uniform01(rng);
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * M_PI * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

}  // namespace sramdp
