#include "sramdp/utility.hpp"

#include <cmath>
#include <string>

#include "sramdp/errors.hpp"
#include "sramdp/mechanism.hpp"

namespace sramdp {

namespace {

constexpr int kMaxRecursionWidth = 20;
constexpr int kMaxBruteForceWidth = 12;
constexpr int kMaxUlWidth = 16;

std::size_t support_size(int width) {
  return (std::size_t{2} << width) - 1;  // 2^(width+1) - 1
}

}  // namespace

DeltaPmf::DeltaPmf(int width, std::vector<double> probs)
    : width_(width), probs_(std::move(probs)) {
  if (width_ < 1 || width_ > kMaxRecursionWidth) {
    throw ConfigError("error pmf width must be in [1, 20], got " +
                      std::to_string(width_));
  }
  if (probs_.size() != support_size(width_)) {
    throw ConfigError("error pmf over width " + std::to_string(width_) +
                      " needs " + std::to_string(support_size(width_)) +
                      " entries, got " + std::to_string(probs_.size()));
  }
}

double DeltaPmf::prob(std::int64_t a) const {
  if (a < min_delta() || a > max_delta()) return 0.0;
  return probs_[static_cast<std::size_t>(a - min_delta())];
}

double DeltaPmf::mean() const {
  double acc = 0.0;
  for (std::int64_t a = min_delta(); a <= max_delta(); ++a) {
    acc += static_cast<double>(a) * prob(a);
  }
  return acc;
}

double DeltaPmf::expected_abs() const {
  double acc = 0.0;
  for (std::int64_t a = min_delta(); a <= max_delta(); ++a) {
    acc += std::abs(static_cast<double>(a)) * prob(a);
  }
  return acc;
}

DeltaPmf delta_pmf(const FailureProfile& f) {
  const int n = f.width();
  if (n > kMaxRecursionWidth) {
    throw ConfigError("error pmf recursion supports widths up to 20, got " +
                      std::to_string(n));
  }

  // The recursion walks the bits LSB up; the profile is MSB-first.
  auto rate = [&](int j) {  // j = 1..n, weight 2^(j-1)
    return f[static_cast<std::size_t>(n - j)];
  };

  // Level j covers offsets [-(2^j - 1), 2^j - 1].
  std::vector<double> cur(3, 0.0);
  {
    const double f1 = rate(1);
    cur[0] = 0.25 * f1;
    cur[1] = 1.0 - 0.5 * f1;
    cur[2] = 0.25 * f1;
  }
  for (int j = 2; j <= n; ++j) {
    const double fj = rate(j);
    const std::int64_t w = 1ll << (j - 1);
    const std::int64_t old_max = w - 1;
    const std::int64_t new_max = (1ll << j) - 1;
    std::vector<double> next(static_cast<std::size_t>(2 * new_max + 1), 0.0);
    auto old_at = [&](std::int64_t a) -> double {
      if (a < -old_max || a > old_max) return 0.0;
      return cur[static_cast<std::size_t>(a + old_max)];
    };
    for (std::int64_t a = -new_max; a <= new_max; ++a) {
      // Summing the two shifted terms first keeps the result exactly
      // symmetric in floating point: the pair (a - w, a + w) maps to the
      // same two summands for -a in swapped order.
      const double shifted = old_at(a - w) + old_at(a + w);
      next[static_cast<std::size_t>(a + new_max)] =
          0.25 * fj * shifted + (1.0 - 0.5 * fj) * old_at(a);
    }
    cur = std::move(next);
  }
  return DeltaPmf(n, std::move(cur));
}

DeltaPmf delta_pmf_bruteforce(const FailureProfile& f) {
  const int n = f.width();
  if (n > kMaxBruteForceWidth) {
    throw ConfigError("brute-force error pmf supports widths up to 12, "
                      "got " + std::to_string(n));
  }
  const std::int64_t max = (1ll << n) - 1;
  std::vector<double> probs(static_cast<std::size_t>(2 * max + 1), 0.0);

  // Ternary counter over per-bit moves: digit j is the move of the bit
  // with weight 2^j (down, stay, up).
  std::vector<int> digits(static_cast<std::size_t>(n), 0);
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) total *= 3;
  for (std::size_t it = 0; it < total; ++it) {
    double p = 1.0;
    std::int64_t a = 0;
    for (int j = 0; j < n; ++j) {
      const double fj = f[static_cast<std::size_t>(n - 1 - j)];
      switch (digits[static_cast<std::size_t>(j)]) {
        case 0:
          p *= 1.0 - 0.5 * fj;
          break;
        case 1:
          p *= 0.25 * fj;
          a += 1ll << j;
          break;
        default:
          p *= 0.25 * fj;
          a -= 1ll << j;
          break;
      }
    }
    probs[static_cast<std::size_t>(a + max)] += p;
    for (int j = 0; j < n; ++j) {
      if (++digits[static_cast<std::size_t>(j)] < 3) break;
      digits[static_cast<std::size_t>(j)] = 0;
    }
  }
  return DeltaPmf(n, std::move(probs));
}

double expected_l1(const FailureProfile& f) { return delta_pmf(f).expected_abs(); }

double l1_bound_homogeneous(double f, int n) {
  if (!(f >= 0.0 && f <= 1.0)) {
    throw ConfigError("failure rate must be in [0, 1], got " +
                      std::to_string(f));
  }
  if (n < 1 || n > kMaxRecursionWidth) {
    throw ConfigError("bound width must be in [1, 20], got " +
                      std::to_string(n));
  }
  const double gap = std::pow(1.0 - 0.5 * f, n + 1) - std::pow(0.25 * f, n + 1);
  const double words = std::pow(4.0, n) - std::pow(2.0, n);
  return words * gap / (1.0 - 0.75 * f);
}

double ul_meter(const Word& x, const FailureProfile& f) {
  const int n = f.width();
  if (x.width() != n) {
    throw ConfigError("ul_meter: word width " + std::to_string(x.width()) +
                      " does not match profile width " + std::to_string(n));
  }
  if (n > kMaxUlWidth) {
    throw ConfigError("ul_meter enumerates the full output domain and "
                      "supports widths up to 16, got " + std::to_string(n));
  }
  const std::uint64_t domain = 1ull << n;
  const double x_value = static_cast<double>(x.decode());
  double acc = 0.0;
  for (std::uint64_t o = 0; o < domain; ++o) {
    const Word ow = Word::encode(o, n);
    acc += channel_prob(x, ow, f) *
           std::abs(static_cast<double>(o) - x_value);
  }
  return acc;
}

}  // namespace sramdp
