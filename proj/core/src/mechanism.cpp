#include "sramdp/mechanism.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "sramdp/errors.hpp"

namespace sramdp {

FailureProfile effective_f(const PermSet& permset,
                           const std::vector<double>& cell_rates) {
  const int n = permset.width();
  if (static_cast<int>(cell_rates.size()) != n) {
    throw ConfigError("cell rate vector has " +
                      std::to_string(cell_rates.size()) +
                      " entries but the shuffle set has width " +
                      std::to_string(n));
  }
  for (double r : cell_rates) {
    if (!std::isfinite(r) || r < 0.0 || r > 1.0) {
      throw ConfigError("cell failure rates must be in [0, 1]");
    }
  }
  const std::vector<std::vector<double>> m = permset.mapping_matrix();
  std::vector<double> f(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int k = 0; k < n; ++k) {
      acc += m[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] *
             cell_rates[static_cast<std::size_t>(k)];
    }
    f[static_cast<std::size_t>(i)] = acc;
  }
  return FailureProfile(std::move(f));
}

double channel_prob(const Word& x, const Word& o, const FailureProfile& f) {
  if (x.width() != f.width() || o.width() != f.width()) {
    throw ConfigError("channel_prob: word widths (" +
                      std::to_string(x.width()) + ", " +
                      std::to_string(o.width()) +
                      ") must match the profile width " +
                      std::to_string(f.width()));
  }
  double p = 1.0;
  for (int i = 0; i < f.width(); ++i) {
    const double half = 0.5 * f[static_cast<std::size_t>(i)];
    p *= (x.bit(i) != o.bit(i)) ? half : 1.0 - half;
  }
  return p;
}

Channel::Channel(CandidateSet omega, FailureProfile f)
    : omega_(std::move(omega)), f_(std::move(f)) {
  if (omega_.width() != f_.width()) {
    throw ConfigError("channel: candidate width " +
                      std::to_string(omega_.width()) +
                      " does not match profile width " +
                      std::to_string(f_.width()));
  }
  if (omega_.size() > kMaxCandidates) {
    throw ConfigError("channel matrix over " + std::to_string(omega_.size()) +
                      " candidates exceeds the materialization limit of " +
                      std::to_string(kMaxCandidates));
  }
  const std::size_t n = omega_.size();
  matrix_.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    const Word x = omega_.word(i);
    for (std::size_t j = 0; j < n; ++j) {
      matrix_[i][j] = channel_prob(x, omega_.word(j), f_);
    }
  }
}

double Channel::prob(std::size_t x_index, std::size_t o_index) const {
  return channel_prob(omega_.word(x_index), omega_.word(o_index), f_);
}

Channel build_channel(const CandidateSet& omega, const FailureProfile& f) {
  return Channel(omega, f);
}

namespace {

PermSet resolve_permset(const MechanismConfig& config) {
  if (config.permset) {
    if (config.permset->width() != config.width) {
      throw ConfigError("shuffle set width " +
                        std::to_string(config.permset->width()) +
                        " does not match mechanism width " +
                        std::to_string(config.width));
    }
    return *config.permset;
  }
  if (config.width == 8) return PermSet::default_set(8);
  return PermSet::identity_only(config.width);
}

}  // namespace

Mechanism::Mechanism(MechanismConfig config)
    : config_(std::move(config)),
      permset_(resolve_permset(config_)),
      profile_(FailureProfile::zeros(1)) {
  if (config_.width < 1 || config_.width > Word::kMaxWidth) {
    throw ConfigError("mechanism width must be in [1, 32], got " +
                      std::to_string(config_.width));
  }
  if (config_.fixed_output != 0 && config_.fixed_output != 1) {
    throw ConfigError("fixed output value must be 0 or 1, got " +
                      std::to_string(config_.fixed_output));
  }

  const bool has_cells = !config_.cells.empty();
  const bool has_voltage = config_.voltage.has_value();
  const bool has_rates = config_.cell_rates.has_value();
  if (has_rates && (has_cells || has_voltage)) {
    throw ConfigError("specify either explicit cell rates or cell types "
                      "plus a voltage, not both");
  }
  if (!has_rates && !(has_cells && has_voltage)) {
    throw ConfigError("the operating point needs either explicit cell "
                      "rates or cell types plus a voltage");
  }

  if (has_rates) {
    if (config_.mode == FailureMode::kChip) {
      throw ConfigError("chip mode needs cell types and a voltage; "
                        "explicit cell rates have no critical-voltage "
                        "distribution to sample from");
    }
    cell_rates_ = *config_.cell_rates;
    if (static_cast<int>(cell_rates_.size()) != config_.width) {
      throw ConfigError("cell rate vector has " +
                        std::to_string(cell_rates_.size()) +
                        " entries for width " + std::to_string(config_.width));
    }
  } else {
    if (static_cast<int>(config_.cells.size()) != config_.width) {
      throw ConfigError("cell assignment has " +
                        std::to_string(config_.cells.size()) +
                        " entries for width " + std::to_string(config_.width));
    }
    cell_rates_.reserve(config_.cells.size());
    for (const CellSpec& spec : config_.cells) {
      cell_rates_.push_back(failure_rate_at(spec, *config_.voltage));
    }
  }

  profile_ = effective_f(permset_, cell_rates_);

  if (config_.mode == FailureMode::kChip) {
    if (config_.chip_words < 1) {
      throw ConfigError("chip mode needs chip_words >= 1, got " +
                        std::to_string(config_.chip_words));
    }
    chip_ = ChipInstance::sample(config_.cells, config_.chip_words,
                                 config_.chip_seed);
  }

  if (config_.noise_source == NoiseSource::kLfsr) {
    if (!permset_.uniform_weights()) {
      throw ConfigError("the LFSR noise source draws pattern selectors "
                        "from raw bits and supports uniform pattern "
                        "weights only");
    }
    const LfsrConfig lc = config_.lfsr.value_or(LfsrConfig{});
    const std::uint32_t taps =
        lc.taps ? *lc.taps : default_taps(lc.width);
    lfsr_ = make_lfsr(lc.width, taps,
                      static_cast<std::uint32_t>(
                          lc.seed % ((1ull << lc.width) - 1ull) + 1ull));
  }
}

const ChipInstance& Mechanism::chip() const {
  if (!chip_) {
    throw ConfigError("mechanism is not in chip mode");
  }
  return *chip_;
}

FailureProfile Mechanism::average_profile() const {
  return effective_f(permset_, chip().average_cell_failure(*config_.voltage));
}

int Mechanism::select_pattern(Rng& rng) {
  if (permset_.size() == 1) return 0;
  if (config_.noise_source == NoiseSource::kSeededSystem) {
    return permset_.sample_index(rng);
  }
  // Hardware path: take just enough selector bits per draw and reject
  // values beyond the pattern count, which keeps the choice exactly
  // uniform for any set size.
  int bits = 0;
  while ((1u << bits) < permset_.size()) ++bits;
  for (;;) {
    auto [word, next] = lfsr_next(*lfsr_, bits);
    lfsr_ = next;
    if (word.decode() < permset_.size()) return static_cast<int>(word.decode());
  }
}

int Mechanism::noise_bit(Rng& rng) {
  if (config_.noise_source == NoiseSource::kSeededSystem) {
    return random_bit(rng);
  }
  auto [bit, next] = lfsr_step(*lfsr_);
  lfsr_ = next;
  return bit;
}

PerturbResult Mechanism::perturb(const Word& x, Rng& rng) {
  return perturb_at(x, cursor_++, rng);
}

PerturbResult Mechanism::perturb_at(const Word& x, std::size_t record_index,
                                    Rng& rng) {
  const PerturbTrace trace = perturb_trace(x, record_index, rng);
  return {trace.output, trace.pattern_index};
}

PerturbResult Mechanism::perturb_at(const Word& x, std::size_t record_index,
                                    MechanismStreams& streams) {
  const PerturbTrace trace = perturb_trace(x, record_index, streams);
  return {trace.output, trace.pattern_index};
}

PerturbTrace Mechanism::perturb_trace(const Word& x, std::size_t record_index,
                                      Rng& rng) {
  return trace_impl(x, record_index, rng, rng, rng);
}

PerturbTrace Mechanism::perturb_trace(const Word& x, std::size_t record_index,
                                      MechanismStreams& streams) {
  return trace_impl(x, record_index, streams.pattern, streams.failure,
                    streams.noise);
}

PerturbTrace Mechanism::trace_impl(const Word& x, std::size_t record_index,
                                   Rng& pattern_rng, Rng& failure_rng,
                                   Rng& noise_rng) {
  if (x.width() != config_.width) {
    throw ConfigError("input word width " + std::to_string(x.width()) +
                      " does not match mechanism width " +
                      std::to_string(config_.width));
  }

  const int pattern_index = select_pattern(pattern_rng);
  const PermPattern& pattern = permset_.pattern(static_cast<std::size_t>(pattern_index));
  const Word shuffled = pattern.apply(x);

  std::vector<std::uint8_t> flags(static_cast<std::size_t>(config_.width), 0);
  if (config_.mode == FailureMode::kChip) {
    const int word_index =
        static_cast<int>(record_index % static_cast<std::size_t>(chip_->words()));
    flags = chip_->fault_map(word_index, *config_.voltage).failed;
  } else {
    for (int k = 0; k < config_.width; ++k) {
      flags[static_cast<std::size_t>(k)] =
          bernoulli(failure_rng, cell_rates_[static_cast<std::size_t>(k)]) ? 1
                                                                           : 0;
    }
  }
  FaultMap faults(std::move(flags));

  // A failed cell first collapses to the fixed output value; the noise
  // stage then overwrites that readout with a fresh fair bit.  Noise bits
  // are drawn per access and never stored.
  Word raw = shuffled;
  Word noised = shuffled;
  for (int k = 0; k < config_.width; ++k) {
    if (faults.failed[static_cast<std::size_t>(k)]) {
      raw = raw.with_bit(k, config_.fixed_output);
      noised = noised.with_bit(k, noise_bit(noise_rng));
    }
  }

  const Word output = pattern.invert(noised);
  return PerturbTrace{pattern_index, shuffled, std::move(faults), raw, noised,
                      output};
}

double rr_keep_probability(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw ConfigError("randomized response needs a positive finite "
                      "privacy budget, got " + std::to_string(eps));
  }
  const double e = std::exp(eps);
  return e / (1.0 + e);
}

std::array<std::array<double, 2>, 2> rr_matrix(double eps) {
  const double keep = rr_keep_probability(eps);
  const double flip = 1.0 - keep;
  return {{{keep, flip}, {flip, keep}}};
}

int rr_reference(int bit, double eps, Rng& rng) {
  if (bit != 0 && bit != 1) {
    throw ConfigError("randomized response input bit must be 0 or 1, got " +
                      std::to_string(bit));
  }
  const double keep = rr_keep_probability(eps);
  return bernoulli(rng, keep) ? bit : 1 - bit;
}

Word rr_perturb(const Word& x, const FailureProfile& f, Rng& rng) {
  if (x.width() != f.width()) {
    throw ConfigError("rr_perturb: word width " + std::to_string(x.width()) +
                      " does not match profile width " +
                      std::to_string(f.width()));
  }
  Word out = x;
  for (int i = 0; i < f.width(); ++i) {
    const double flip = 0.5 * f[static_cast<std::size_t>(i)];
    if (flip > 0.0 && bernoulli(rng, flip)) {
      out = out.with_bit(i, 1 - out.bit(i));
    }
  }
  return out;
}

}  // namespace sramdp
