#ifndef SRAMDP_CELLSPEC_HPP_
#define SRAMDP_CELLSPEC_HPP_

#include <optional>
#include <string>
#include <vector>

namespace sramdp {

// One measured calibration point: supply voltage (volts) and the
// probability that a cell of this type fails to retain its value at
// that voltage.
struct CalPoint {
  double voltage;
  double probability;

  friend bool operator==(const CalPoint& a, const CalPoint& b) = default;
};

// Optional transistor sizing, used for threshold-voltage spread studies.
struct CellSizing {
  double a_vt;      // Pelgrom coefficient (mV*um)
  double width_um;  // transistor width (um)
  double length_um; // transistor length (um)
};

// A cell type: a kind label plus its voltage -> failure-probability
// calibration.  Voltages must be strictly increasing and probabilities
// non-increasing (strictly decreasing unless the cell never fails, which
// models a reliable cell held at a safe operating point).
class CellSpec {
 public:
  CellSpec(std::string kind, std::vector<CalPoint> calibration,
           std::optional<CellSizing> sizing = std::nullopt);

  // The low-power 6T cell with the measured failure-rate ladder between
  // 0.50 V and 0.60 V.
  static CellSpec sram6t();

  // A cell that never fails at any supported voltage (0.50 V .. 1.00 V).
  static CellSpec reliable();

  // JSON round trip.  Schema:
  //   {"kind": "...", "calibration": [[0.50, 0.8157], ...],
  //    "sizing": {"a_vt": ..., "width_um": ..., "length_um": ...}}
  // "sizing" is optional.
  static CellSpec from_json_text(const std::string& text);
  static CellSpec from_json_file(const std::string& path);
  std::string to_json_text() const;

  const std::string& kind() const { return kind_; }
  const std::vector<CalPoint>& calibration() const { return calibration_; }
  const std::optional<CellSizing>& sizing() const { return sizing_; }

  double min_voltage() const { return calibration_.front().voltage; }
  double max_voltage() const { return calibration_.back().voltage; }
  bool never_fails() const;  // all calibration probabilities are zero

 private:
  std::string kind_;
  std::vector<CalPoint> calibration_;
  std::optional<CellSizing> sizing_;
};

// Piecewise-linear interpolation over a cell's calibration points,
// optionally with all probabilities scaled by a drift factor (clamped to
// [0, 1]).  Voltages outside the calibrated range are refused rather
// than extrapolated.
class FailureCurve {
 public:
  explicit FailureCurve(const CellSpec& spec, double scale = 1.0);

  double at(double voltage) const;

  // Inverse lookup: the voltage at which the curve crosses the given
  // failure probability.  Returns nullopt when the probability is outside
  // the calibrated range.
  std::optional<double> voltage_for(double probability) const;

  FailureCurve scaled(double factor) const;

  double min_voltage() const { return points_.front().voltage; }
  double max_voltage() const { return points_.back().voltage; }
  const std::vector<CalPoint>& points() const { return points_; }

 private:
  FailureCurve() = default;

  std::vector<CalPoint> points_;  // scaled and clamped
};

// Failure probability of a cell type at the given voltage (interpolated;
// refuses out-of-range voltages).
double failure_rate_at(const CellSpec& spec, double voltage);

// Threshold-voltage standard deviation from Pelgrom's area scaling law:
// sigma = A_VT / sqrt(W * L).  Halving the area grows the spread by
// sqrt(2); all arguments must be positive.
double sigma_vth(double a_vt, double width_um, double length_um);

}  // namespace sramdp

#endif  // SRAMDP_CELLSPEC_HPP_
