#include "sramdp/candidates.hpp"

#include <cmath>
#include <string>
#include <unordered_set>

#include "sramdp/errors.hpp"

namespace sramdp {

CandidateSet::CandidateSet(std::vector<std::uint32_t> values, int width)
    : values_(std::move(values)), width_(width) {
  if (width_ < 1 || width_ > Word::kMaxWidth) {
    throw ConfigError("candidate set width must be in [1, 32], got " +
                      std::to_string(width_));
  }
  if (values_.empty()) {
    throw ConfigError("candidate set must not be empty");
  }
  const std::uint64_t limit = 1ull << width_;
  std::unordered_set<std::uint32_t> seen;
  seen.reserve(values_.size());
  for (std::uint32_t v : values_) {
    if (v >= limit) {
      throw ConfigError("candidate value " + std::to_string(v) +
                        " does not fit in " + std::to_string(width_) +
                        " bits");
    }
    if (!seen.insert(v).second) {
      throw ConfigError("candidate value " + std::to_string(v) +
                        " listed twice");
    }
  }
}

CandidateSet CandidateSet::full_domain(int width) {
  if (width < 1 || width > 16) {
    throw ConfigError("full candidate domains are limited to widths 1..16, "
                      "got " + std::to_string(width));
  }
  const std::uint32_t n = 1u << width;
  std::vector<std::uint32_t> values(n);
  for (std::uint32_t v = 0; v < n; ++v) values[v] = v;
  return CandidateSet(std::move(values), width);
}

CandidateSet CandidateSet::range(std::uint32_t lo, std::uint32_t hi, int width) {
  if (lo > hi) {
    throw ConfigError("candidate range is empty: lo " + std::to_string(lo) +
                      " > hi " + std::to_string(hi));
  }
  std::vector<std::uint32_t> values;
  values.reserve(hi - lo + 1);
  for (std::uint32_t v = lo; v <= hi; ++v) values.push_back(v);
  return CandidateSet(std::move(values), width);
}

std::optional<std::size_t> CandidateSet::index_of(std::uint32_t value) const {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] == value) return i;
  }
  return std::nullopt;
}

Distribution::Distribution(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) {
    throw ConfigError("distribution must not be empty");
  }
  double total = 0.0;
  for (double p : probs_) {
    if (!std::isfinite(p) || p < 0.0) {
      throw ConfigError("distribution entries must be finite and "
                        "non-negative");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ConfigError("distribution must sum to 1 within 1e-9, got " +
                      std::to_string(total));
  }
}

Distribution Distribution::uniform(std::size_t size) {
  if (size == 0) throw ConfigError("distribution must not be empty");
  return Distribution(std::vector<double>(size, 1.0 / static_cast<double>(size)));
}

Distribution Distribution::normalized(std::vector<double> weights) {
  if (weights.empty()) throw ConfigError("distribution must not be empty");
  double total = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) {
      throw ConfigError("weights must be finite and non-negative");
    }
    total += w;
  }
  if (total <= 0.0) {
    throw NumericError("cannot normalize weights with zero total mass");
  }
  for (double& w : weights) w /= total;
  return Distribution(std::move(weights));
}

double tv_distance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) {
    throw ConfigError("total variation distance needs equal-size vectors");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
  return 0.5 * sum;
}

double tv_distance(const Distribution& a, const Distribution& b) {
  return tv_distance(a.probs(), b.probs());
}

}  // namespace sramdp
