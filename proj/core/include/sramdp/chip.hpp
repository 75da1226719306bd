#ifndef SRAMDP_CHIP_HPP_
#define SRAMDP_CHIP_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "sramdp/cellspec.hpp"
#include "sramdp/word.hpp"

namespace sramdp {

// Failure mask of one word at one voltage.
struct FaultMap {
  std::vector<std::uint8_t> failed;  // one flag per bit position
  int z = 0;                         // number of failed positions

  explicit FaultMap(std::vector<std::uint8_t> flags);
};

// One manufactured array: a fixed number of words, each with one cell per
// bit position.  Every cell gets a critical voltage drawn once at
// sampling time; the cell fails at operating voltage V exactly when
// V < V_crit.  This makes fault maps deterministic per chip and
// monotone in voltage: a cell that fails at some voltage also fails at
// every lower voltage.
class ChipInstance {
 public:
  // Draws a chip. `cells` assigns a cell type to each bit position
  // (MSB first); the same seed always yields the same chip.
  static ChipInstance sample(const std::vector<CellSpec>& cells, int words,
                             std::uint64_t seed);

  int words() const { return words_; }
  int width() const { return static_cast<int>(cells_.size()); }
  std::uint64_t seed() const { return seed_; }
  const std::vector<CellSpec>& cells() const { return cells_; }

  // Critical voltage of one cell.  Cells that never fail in the
  // supported range report 0; cells that fail everywhere report +inf.
  double v_crit(int word, int position) const;

  // Fault mask of one word at the given operating voltage.
  FaultMap fault_map(int word, double voltage) const;

  // Raw (pre-noise) readout of a stored word: intact cells return the
  // stored bit, failed cells collapse to the fixed output value (0 or 1).
  Word read_raw(int word, const Word& stored, double voltage,
                int fixed_output = 1) const;

  // Fraction of failed cells per bit position across all words.
  std::vector<double> average_cell_failure(double voltage) const;

  // Fraction of failed cells over the whole array.
  double failed_fraction(double voltage) const;

  // JSON dump of all fault maps at one voltage:
  //   {"voltage": 0.5, "words": [[0,1,...], ...]}
  std::string fault_dump_json(double voltage) const;

 private:
  ChipInstance(std::vector<CellSpec> cells, int words, std::uint64_t seed,
               std::vector<double> v_crit);

  void check_word(int word) const;
  void check_voltage(double voltage) const;

  std::vector<CellSpec> cells_;
  int words_;
  std::uint64_t seed_;
  std::vector<double> v_crit_;  // words_ x width, row major
};

}  // namespace sramdp

#endif  // SRAMDP_CHIP_HPP_
