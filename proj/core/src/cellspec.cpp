#include "sramdp/cellspec.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sramdp/errors.hpp"

namespace sramdp {

CellSpec::CellSpec(std::string kind, std::vector<CalPoint> calibration,
                   std::optional<CellSizing> sizing)
    : kind_(std::move(kind)),
      calibration_(std::move(calibration)),
      sizing_(sizing) {
  if (calibration_.size() < 2) {
    throw ConfigError("cell spec '" + kind_ +
                      "' needs at least two calibration points");
  }
  bool all_zero = true;
  for (const CalPoint& p : calibration_) {
    if (!(p.voltage > 0.0) || !std::isfinite(p.voltage)) {
      throw ConfigError("cell spec '" + kind_ +
                        "' has a non-positive calibration voltage");
    }
    if (!(p.probability >= 0.0 && p.probability <= 1.0)) {
      throw ConfigError("cell spec '" + kind_ +
                        "' has a failure probability outside [0, 1]");
    }
    if (p.probability != 0.0) all_zero = false;
  }
  for (std::size_t i = 1; i < calibration_.size(); ++i) {
    if (!(calibration_[i].voltage > calibration_[i - 1].voltage)) {
      throw ConfigError("cell spec '" + kind_ +
                        "' calibration voltages must be strictly increasing");
    }
    // Higher voltage can only help retention.  A flat all-zero ladder is
    // the degenerate reliable cell; otherwise we insist on a strict drop.
    const bool strict =
        calibration_[i].probability < calibration_[i - 1].probability;
    if (!strict && !all_zero) {
      throw ConfigError("cell spec '" + kind_ +
                        "' failure probabilities must strictly decrease "
                        "with voltage");
    }
  }
}

CellSpec CellSpec::sram6t() {
  return CellSpec("6T", {{0.50, 0.8157},
                         {0.55, 0.7057},
                         {0.56, 0.6831},
                         {0.57, 0.6615},
                         {0.58, 0.6409},
                         {0.59, 0.6203},
                         {0.60, 0.6026}});
}

CellSpec CellSpec::reliable() {
  return CellSpec("reliable", {{0.50, 0.0}, {1.00, 0.0}});
}

CellSpec CellSpec::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid cell spec JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("kind") || !j.contains("calibration")) {
    throw ConfigError("cell spec JSON must be an object with \"kind\" and "
                      "\"calibration\"");
  }
  std::vector<CalPoint> calibration;
  for (const auto& entry : j.at("calibration")) {
    if (!entry.is_array() || entry.size() != 2) {
      throw ConfigError("cell spec calibration entries must be "
                        "[voltage, probability] pairs");
    }
    calibration.push_back({entry[0].get<double>(), entry[1].get<double>()});
  }
  std::optional<CellSizing> sizing;
  if (j.contains("sizing")) {
    const auto& s = j.at("sizing");
    sizing = CellSizing{s.at("a_vt").get<double>(),
                        s.at("width_um").get<double>(),
                        s.at("length_um").get<double>()};
  }
  return CellSpec(j.at("kind").get<std::string>(), std::move(calibration),
                  sizing);
}

CellSpec CellSpec::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open cell spec file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

std::string CellSpec::to_json_text() const {
  nlohmann::ordered_json j;
  j["kind"] = kind_;
  j["calibration"] = nlohmann::ordered_json::array();
  for (const CalPoint& p : calibration_) {
    j["calibration"].push_back({p.voltage, p.probability});
  }
  if (sizing_) {
    j["sizing"] = {{"a_vt", sizing_->a_vt},
                   {"width_um", sizing_->width_um},
                   {"length_um", sizing_->length_um}};
  }
  return j.dump(2);
}

bool CellSpec::never_fails() const {
  return std::all_of(calibration_.begin(), calibration_.end(),
                     [](const CalPoint& p) { return p.probability == 0.0; });
}

FailureCurve::FailureCurve(const CellSpec& spec, double scale) {
  if (!(scale >= 0.0) || !std::isfinite(scale)) {
    throw ConfigError("failure curve scale must be finite and non-negative");
  }
  points_ = spec.calibration();
  for (CalPoint& p : points_) {
    p.probability = std::clamp(p.probability * scale, 0.0, 1.0);
  }
}

double FailureCurve::at(double voltage) const {
  if (voltage < min_voltage() || voltage > max_voltage()) {
    std::ostringstream msg;
    msg << "voltage " << voltage << " V outside the calibrated range ["
        << min_voltage() << ", " << max_voltage()
        << "] V; refusing to extrapolate";
    throw ConfigError(msg.str());
  }
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (voltage <= points_[i].voltage) {
      const CalPoint& lo = points_[i - 1];
      const CalPoint& hi = points_[i];
      if (voltage == lo.voltage) return lo.probability;
      if (voltage == hi.voltage) return hi.probability;
      const double t = (voltage - lo.voltage) / (hi.voltage - lo.voltage);
      return lo.probability + t * (hi.probability - lo.probability);
    }
  }
  return points_.back().probability;
}

std::optional<double> FailureCurve::voltage_for(double probability) const {
  const double hi_p = points_.front().probability;
  const double lo_p = points_.back().probability;
  if (probability > hi_p || probability < lo_p) return std::nullopt;
  for (std::size_t i = 1; i < points_.size(); ++i) {
    const CalPoint& a = points_[i - 1];
    const CalPoint& b = points_[i];
    if (probability <= a.probability && probability >= b.probability) {
      if (a.probability == b.probability) return a.voltage;
      const double t = (a.probability - probability) /
                       (a.probability - b.probability);
      return a.voltage + t * (b.voltage - a.voltage);
    }
  }
  return points_.back().voltage;
}

FailureCurve FailureCurve::scaled(double factor) const {
  if (!(factor >= 0.0) || !std::isfinite(factor)) {
    throw ConfigError("failure curve scale must be finite and non-negative");
  }
  FailureCurve out;
  out.points_ = points_;
  for (CalPoint& p : out.points_) {
    p.probability = std::clamp(p.probability * factor, 0.0, 1.0);
  }
  return out;
}

double failure_rate_at(const CellSpec& spec, double voltage) {
  return FailureCurve(spec).at(voltage);
}

double sigma_vth(double a_vt, double width_um, double length_um) {
  if (!(a_vt > 0.0) || !(width_um > 0.0) || !(length_um > 0.0)) {
    throw ConfigError("sigma_vth requires positive A_VT, width and length");
  }
  return a_vt / std::sqrt(width_um * length_um);
}

}  // namespace sramdp
