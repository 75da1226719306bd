#include "sramdp/failure_profile.hpp"

#include <cmath>
#include <string>

#include "sramdp/errors.hpp"
#include "sramdp/word.hpp"

namespace sramdp {

FailureProfile::FailureProfile(std::vector<double> rates)
    : rates_(std::move(rates)) {
  if (rates_.empty() || rates_.size() > Word::kMaxWidth) {
    throw ConfigError("failure profile width must be in [1, 32], got " +
                      std::to_string(rates_.size()));
  }
  for (std::size_t i = 0; i < rates_.size(); ++i) {
    const double f = rates_[i];
    if (!std::isfinite(f) || f < 0.0 || f > 1.0) {
      throw ConfigError("failure rate at position " + std::to_string(i) +
                        " must be in [0, 1], got " + std::to_string(f));
    }
  }
}

FailureProfile FailureProfile::zeros(int width) {
  if (width < 1 || width > Word::kMaxWidth) {
    throw ConfigError("failure profile width must be in [1, 32], got " +
                      std::to_string(width));
  }
  return FailureProfile(std::vector<double>(static_cast<std::size_t>(width), 0.0));
}

FailureProfile FailureProfile::homogeneous(double rate, int width) {
  if (width < 1 || width > Word::kMaxWidth) {
    throw ConfigError("failure profile width must be in [1, 32], got " +
                      std::to_string(width));
  }
  return FailureProfile(std::vector<double>(static_cast<std::size_t>(width), rate));
}

std::vector<int> FailureProfile::prone_positions() const {
  std::vector<int> out;
  for (int i = 0; i < width(); ++i) {
    if (rates_[static_cast<std::size_t>(i)] > 0.0) out.push_back(i);
  }
  return out;
}

int FailureProfile::z() const {
  return static_cast<int>(prone_positions().size());
}

}  // namespace sramdp
