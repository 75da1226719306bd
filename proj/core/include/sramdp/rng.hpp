#ifndef SRAMDP_RNG_HPP_
#define SRAMDP_RNG_HPP_

#include <cstdint>
#include <random>

namespace sramdp {

// All randomness in the simulator flows through a single engine type so
// that runs are reproducible from one master seed.
using Rng = std::mt19937_64;

// One step of the splitmix64 generator.  Used for seed derivation only.
std::uint64_t splitmix64(std::uint64_t& state);

// Derives an independent stream seed from a master seed.  Each pipeline
// stage (data generation, chip sampling, pattern selection, cell
// failures, noise bits, ...) uses its own stream id so that changing the
// amount of randomness one stage consumes never perturbs another.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

// Stream ids used by the experiment harness.
enum class SeedStream : std::uint64_t {
  kData = 1,
  kChip = 2,
  kPattern = 3,
  kFailure = 4,
  kNoise = 5,
  kLfsr = 6,
  kReference = 7,  // the randomized-response arm of comparisons
};

std::uint64_t derive_seed(std::uint64_t master, SeedStream stream);

// Uniform double in [0, 1) with 53 random bits.  Hand-rolled (instead of
// std::uniform_real_distribution) so sequences are identical across
// standard library implementations.
double uniform01(Rng& rng);

// Bernoulli(p) event.
bool bernoulli(Rng& rng, double p);

// One fair random bit.
int random_bit(Rng& rng);

// Uniform integer in [0, n) by masked rejection sampling; exact for any n.
std::uint32_t uniform_below(Rng& rng, std::uint32_t n);

// Standard normal deviate via the Box-Muller transform.  The spare value
// is cached in the sampler, again for cross-platform reproducibility.
class GaussianSampler {
 public:
  double next(Rng& rng);

 private:
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace sramdp

#endif  // SRAMDP_RNG_HPP_
