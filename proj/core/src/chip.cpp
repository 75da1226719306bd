#include "sramdp/chip.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sramdp/errors.hpp"
#include "sramdp/rng.hpp"

namespace sramdp {

namespace {

// Draws a critical voltage by inverse-transform sampling so that
// P(V_crit > V) equals the cell's calibrated failure probability at every
// supported voltage.  Below the calibrated range the failure probability
// is held at its lowest-voltage value, so a draw that survives the whole
// ladder maps to "never fails" (V_crit = 0) and one that fails even at
// the top maps to "always fails" (V_crit = +inf).
double sample_v_crit(const FailureCurve& curve, Rng& rng) {
  const auto& pts = curve.points();
  const double u = uniform01(rng);
  if (u < pts.back().probability) {
    return std::numeric_limits<double>::infinity();
  }
  if (u >= pts.front().probability) {
    return 0.0;
  }
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const CalPoint& a = pts[i - 1];
    const CalPoint& b = pts[i];
    if (u >= b.probability && u < a.probability) {
      const double t = (a.probability - u) / (a.probability - b.probability);
      return a.voltage + t * (b.voltage - a.voltage);
    }
  }
  return pts.back().voltage;
}

}  // namespace

FaultMap::FaultMap(std::vector<std::uint8_t> flags) : failed(std::move(flags)) {
  z = static_cast<int>(std::count(failed.begin(), failed.end(), 1));
}

ChipInstance::ChipInstance(std::vector<CellSpec> cells, int words,
                           std::uint64_t seed, std::vector<double> v_crit)
    : cells_(std::move(cells)), words_(words), seed_(seed),
      v_crit_(std::move(v_crit)) {}

ChipInstance ChipInstance::sample(const std::vector<CellSpec>& cells,
                                  int words, std::uint64_t seed) {
  if (cells.empty() || cells.size() > Word::kMaxWidth) {
    throw ConfigError("chip width must be in [1, 32], got " +
                      std::to_string(cells.size()));
  }
  if (words < 1) {
    throw ConfigError("chip must have at least one word, got " +
                      std::to_string(words));
  }
  std::vector<FailureCurve> curves;
  curves.reserve(cells.size());
  for (const CellSpec& spec : cells) curves.emplace_back(spec);

  Rng rng(seed);
  std::vector<double> v_crit;
  v_crit.reserve(static_cast<std::size_t>(words) * cells.size());
  for (int w = 0; w < words; ++w) {
    for (std::size_t p = 0; p < cells.size(); ++p) {
      v_crit.push_back(sample_v_crit(curves[p], rng));
    }
  }
  return ChipInstance(cells, words, seed, std::move(v_crit));
}

void ChipInstance::check_word(int word) const {
  if (word < 0 || word >= words_) {
    throw ConfigError("word index " + std::to_string(word) +
                      " out of range for a chip with " +
                      std::to_string(words_) + " words");
  }
}

void ChipInstance::check_voltage(double voltage) const {
  // Require the voltage to be within every per-position calibrated range
  // so fault maps never rely on extrapolation.
  for (const CellSpec& spec : cells_) {
    if (voltage < spec.min_voltage() || voltage > spec.max_voltage()) {
      std::ostringstream msg;
      msg << "voltage " << voltage << " V outside the calibrated range ["
          << spec.min_voltage() << ", " << spec.max_voltage()
          << "] V of cell kind '" << spec.kind() << "'";
      throw ConfigError(msg.str());
    }
  }
}

double ChipInstance::v_crit(int word, int position) const {
  check_word(word);
  if (position < 0 || position >= width()) {
    throw ConfigError("bit position " + std::to_string(position) +
                      " out of range for width " + std::to_string(width()));
  }
  return v_crit_[static_cast<std::size_t>(word) * cells_.size() +
                 static_cast<std::size_t>(position)];
}

FaultMap ChipInstance::fault_map(int word, double voltage) const {
  check_word(word);
  check_voltage(voltage);
  std::vector<std::uint8_t> flags(cells_.size(), 0);
  for (int p = 0; p < width(); ++p) {
    flags[static_cast<std::size_t>(p)] =
        voltage < v_crit(word, p) ? 1 : 0;
  }
  return FaultMap(std::move(flags));
}

Word ChipInstance::read_raw(int word, const Word& stored, double voltage,
                            int fixed_output) const {
  if (stored.width() != width()) {
    throw ConfigError("stored word has width " +
                      std::to_string(stored.width()) +
                      " but the chip stores " + std::to_string(width()) +
                      "-bit words");
  }
  if (fixed_output != 0 && fixed_output != 1) {
    throw ConfigError("fixed output value must be 0 or 1, got " +
                      std::to_string(fixed_output));
  }
  const FaultMap faults = fault_map(word, voltage);
  Word out = stored;
  for (int p = 0; p < width(); ++p) {
    if (faults.failed[static_cast<std::size_t>(p)]) {
      out = out.with_bit(p, fixed_output);
    }
  }
  return out;
}

std::vector<double> ChipInstance::average_cell_failure(double voltage) const {
  check_voltage(voltage);
  std::vector<double> avg(cells_.size(), 0.0);
  for (int w = 0; w < words_; ++w) {
    for (int p = 0; p < width(); ++p) {
      if (voltage < v_crit(w, p)) avg[static_cast<std::size_t>(p)] += 1.0;
    }
  }
  for (double& a : avg) a /= static_cast<double>(words_);
  return avg;
}

double ChipInstance::failed_fraction(double voltage) const {
  const std::vector<double> avg = average_cell_failure(voltage);
  double total = 0.0;
  for (double a : avg) total += a;
  return total / static_cast<double>(avg.size());
}

std::string ChipInstance::fault_dump_json(double voltage) const {
  check_voltage(voltage);
  nlohmann::ordered_json j;
  j["voltage"] = voltage;
  j["words"] = nlohmann::ordered_json::array();
  for (int w = 0; w < words_; ++w) {
    const FaultMap fm = fault_map(w, voltage);
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (std::uint8_t flag : fm.failed) row.push_back(static_cast<int>(flag));
    j["words"].push_back(std::move(row));
  }
  return j.dump();
}

}  // namespace sramdp
