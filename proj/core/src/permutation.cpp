#include "sramdp/permutation.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sramdp/errors.hpp"

namespace sramdp {

PermPattern::PermPattern(std::vector<int> sources) : sources_(std::move(sources)) {
  const int n = static_cast<int>(sources_.size());
  if (n < 1 || n > Word::kMaxWidth) {
    throw ConfigError("shuffle pattern width must be in [1, 32], got " +
                      std::to_string(n));
  }
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (int s : sources_) {
    if (s < 0 || s >= n) {
      throw ConfigError("shuffle pattern entry " + std::to_string(s) +
                        " out of range for width " + std::to_string(n));
    }
    if (seen[static_cast<std::size_t>(s)]) {
      throw ConfigError("shuffle pattern repeats source position " +
                        std::to_string(s));
    }
    seen[static_cast<std::size_t>(s)] = 1;
  }
}

PermPattern PermPattern::identity(int width) {
  if (width < 1 || width > Word::kMaxWidth) {
    throw ConfigError("shuffle pattern width must be in [1, 32], got " +
                      std::to_string(width));
  }
  std::vector<int> sources(static_cast<std::size_t>(width));
  std::iota(sources.begin(), sources.end(), 0);
  return PermPattern(std::move(sources));
}

Word PermPattern::apply(const Word& x) const {
  if (x.width() != width()) {
    throw ConfigError("cannot shuffle a " + std::to_string(x.width()) +
                      "-bit word with a " + std::to_string(width()) +
                      "-bit pattern");
  }
  Word out = Word::zero(width());
  for (int d = 0; d < width(); ++d) {
    out = out.with_bit(d, x.bit(source_of(d)));
  }
  return out;
}

Word PermPattern::invert(const Word& y) const {
  if (y.width() != width()) {
    throw ConfigError("cannot unshuffle a " + std::to_string(y.width()) +
                      "-bit word with a " + std::to_string(width()) +
                      "-bit pattern");
  }
  Word out = Word::zero(width());
  for (int d = 0; d < width(); ++d) {
    out = out.with_bit(source_of(d), y.bit(d));
  }
  return out;
}

Word apply_permutation(const Word& x, const PermPattern& p) { return p.apply(x); }

Word invert_permutation(const Word& y, const PermPattern& p) { return p.invert(y); }

PermSet::PermSet(std::vector<PermPattern> patterns, std::vector<double> weights)
    : patterns_(std::move(patterns)), weights_(std::move(weights)) {
  if (patterns_.empty()) {
    throw ConfigError("a shuffle set needs at least one pattern");
  }
  const int w = patterns_.front().width();
  for (const PermPattern& p : patterns_) {
    if (p.width() != w) {
      throw ConfigError("all patterns in a shuffle set must share one width");
    }
  }
  if (weights_.size() != patterns_.size()) {
    throw ConfigError("shuffle set has " + std::to_string(patterns_.size()) +
                      " patterns but " + std::to_string(weights_.size()) +
                      " weights");
  }
  double total = 0.0;
  for (double wi : weights_) {
    if (!(wi >= 0.0) || !std::isfinite(wi)) {
      throw ConfigError("shuffle weights must be finite and non-negative");
    }
    total += wi;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ConfigError("shuffle weights must sum to 1, got " +
                      std::to_string(total));
  }
}

PermSet PermSet::uniform(std::vector<PermPattern> patterns) {
  if (patterns.empty()) {
    throw ConfigError("a shuffle set needs at least one pattern");
  }
  const double w = 1.0 / static_cast<double>(patterns.size());
  std::vector<double> weights(patterns.size(), w);
  return PermSet(std::move(patterns), std::move(weights));
}

PermSet PermSet::default_set(int width) {
  if (width != 8) {
    throw ConfigError("the default shuffle set is defined for 8-bit words; "
                      "use identity_only or a custom set for width " +
                      std::to_string(width));
  }
  std::vector<PermPattern> patterns;
  patterns.emplace_back(std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7});
  patterns.emplace_back(std::vector<int>{0, 1, 2, 3, 5, 4, 7, 6});
  patterns.emplace_back(std::vector<int>{0, 1, 2, 3, 6, 7, 4, 5});
  patterns.emplace_back(std::vector<int>{0, 1, 2, 3, 7, 6, 5, 4});
  return uniform(std::move(patterns));
}

PermSet PermSet::identity_only(int width) {
  std::vector<PermPattern> patterns;
  patterns.push_back(PermPattern::identity(width));
  return PermSet(std::move(patterns), {1.0});
}

PermSet PermSet::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid shuffle set JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("patterns")) {
    throw ConfigError("shuffle set JSON must be an object with a "
                      "\"patterns\" array");
  }
  std::vector<PermPattern> patterns;
  for (const auto& entry : j.at("patterns")) {
    std::vector<int> sources;
    for (const auto& v : entry) sources.push_back(v.get<int>());
    patterns.emplace_back(std::move(sources));
  }
  if (patterns.empty()) {
    throw ConfigError("shuffle set JSON contains no patterns");
  }
  if (j.contains("width")) {
    const int width = j.at("width").get<int>();
    if (width != patterns.front().width()) {
      throw ConfigError("shuffle set JSON declares width " +
                        std::to_string(width) + " but patterns have width " +
                        std::to_string(patterns.front().width()));
    }
  }
  if (j.contains("weights")) {
    std::vector<double> weights = j.at("weights").get<std::vector<double>>();
    return PermSet(std::move(patterns), std::move(weights));
  }
  return uniform(std::move(patterns));
}

PermSet PermSet::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open shuffle set file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

std::string PermSet::to_json_text() const {
  nlohmann::ordered_json j;
  j["width"] = width();
  j["patterns"] = nlohmann::ordered_json::array();
  for (const PermPattern& p : patterns_) j["patterns"].push_back(p.sources());
  j["weights"] = weights_;
  return j.dump(2);
}

bool PermSet::uniform_weights() const {
  const double w = 1.0 / static_cast<double>(weights_.size());
  for (double wi : weights_) {
    if (std::abs(wi - w) > 1e-12) return false;
  }
  return true;
}

int PermSet::sample_index(Rng& rng) const {
  const double u = uniform01(rng);
  double cum = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    cum += weights_[i];
    if (u < cum) return static_cast<int>(i);
  }
  return static_cast<int>(weights_.size() - 1);
}

std::vector<std::vector<double>> PermSet::mapping_matrix() const {
  const int n = width();
  std::vector<std::vector<double>> m(
      static_cast<std::size_t>(n),
      std::vector<double>(static_cast<std::size_t>(n), 0.0));
  for (std::size_t p = 0; p < patterns_.size(); ++p) {
    for (int d = 0; d < n; ++d) {
      const int s = patterns_[p].source_of(d);
      m[static_cast<std::size_t>(s)][static_cast<std::size_t>(d)] += weights_[p];
    }
  }
  return m;
}

}  // namespace sramdp
