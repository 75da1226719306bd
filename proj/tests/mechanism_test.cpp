#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "sramdp/errors.hpp"
#include "sramdp/mechanism.hpp"
#include "sramdp/privacy.hpp"
#include "sramdp/rng.hpp"
#include "sramdp/word.hpp"
#include "testutil.hpp"

using sramdp::CandidateSet;
using sramdp::CellSpec;
using sramdp::Channel;
using sramdp::ConfigError;
using sramdp::FailureMode;
using sramdp::FailureProfile;
using sramdp::LfsrConfig;
using sramdp::Mechanism;
using sramdp::MechanismConfig;
using sramdp::MechanismStreams;
using sramdp::NoiseSource;
using sramdp::PermSet;
using sramdp::PerturbTrace;
using sramdp::Rng;
using sramdp::Word;

namespace {

MechanismConfig rates_config(std::vector<double> rates) {
  MechanismConfig config;
  config.width = static_cast<int>(rates.size());
  config.cell_rates = std::move(rates);
  return config;
}

}  // namespace

TEST_CASE("reliable cells pass every record through unchanged") {
  MechanismConfig config;
  config.width = 8;
  config.cells.assign(8, CellSpec::reliable());
  config.voltage = 0.60;
  Mechanism mech(config);
  Rng rng(1);
  for (std::uint32_t v : {0u, 1u, 166u, 200u, 255u}) {
    for (int i = 0; i < 50; ++i) {
      CHECK(mech.perturb(Word::encode(v, 8), rng).output.decode() == v);
    }
  }
}

TEST_CASE("single-bit marginal law matches the keep/flip probabilities") {
  Mechanism mech(rates_config({0.5}));
  Rng rng(7);
  const Word one = Word::encode(1, 1);
  int kept = 0;
  const int trials = 100000;
  for (int i = 0; i < trials; ++i) {
    kept += static_cast<int>(mech.perturb(one, rng).output.decode() == 1);
  }
  CHECK(static_cast<double>(kept) / trials == doctest::Approx(0.75).epsilon(0.015));
}

TEST_CASE("per-position flip rates are f_i/2 and intact bits never move") {
  MechanismConfig config;
  config.width = 8;
  config.cell_rates = std::vector<double>{0, 0, 0, 0, 0.8157, 0.8157, 0.8157, 0.8157};
  Mechanism mech(config);
  Rng rng(3);
  const Word x = Word::from_string("10100110");
  std::vector<int> flips(8, 0);
  const int trials = 100000;
  for (int i = 0; i < trials; ++i) {
    const Word o = mech.perturb(x, rng).output;
    for (int p = 0; p < 8; ++p) flips[static_cast<std::size_t>(p)] += o.bit(p) != x.bit(p);
  }
  for (int p = 0; p < 4; ++p) CHECK(flips[static_cast<std::size_t>(p)] == 0);
  for (int p = 4; p < 8; ++p) {
    CHECK(static_cast<double>(flips[static_cast<std::size_t>(p)]) / trials ==
          doctest::Approx(0.8157 / 2).epsilon(0.03));
  }
}

TEST_CASE("effective profile through the identity set is the cell rates") {
  const PermSet identity = PermSet::identity_only(4);
  const std::vector<double> rates{0.1, 0.0, 0.9, 0.4};
  const FailureProfile f = sramdp::effective_f(identity, rates);
  CHECK(f.rates() == rates);
}

TEST_CASE("the default shuffle homogenizes the LSB nibble rates") {
  const PermSet set = PermSet::default_set(8);
  std::vector<double> homogeneous{0, 0, 0, 0, 0.8157, 0.8157, 0.8157, 0.8157};
  const FailureProfile f1 = sramdp::effective_f(set, homogeneous);
  for (int p = 0; p < 4; ++p) CHECK(f1[static_cast<std::size_t>(p)] == 0.0);
  for (int p = 4; p < 8; ++p) {
    CHECK(f1[static_cast<std::size_t>(p)] == doctest::Approx(0.8157).epsilon(1e-12));
  }

  // Heterogeneous cell rates: each LSB source sees every LSB cell once,
  // so its effective rate is the nibble mean.
  std::vector<double> mixed{0, 0, 0, 0, 0.2, 0.4, 0.6, 0.8};
  const FailureProfile f2 = sramdp::effective_f(set, mixed);
  for (int p = 4; p < 8; ++p) {
    CHECK(f2[static_cast<std::size_t>(p)] == doctest::Approx(0.5).epsilon(1e-12));
  }

  const FailureProfile zero = sramdp::effective_f(set, std::vector<double>(8, 0.0));
  CHECK(zero == FailureProfile::zeros(8));
}

TEST_CASE("channel probabilities factor over bit positions") {
  // No failures: the channel is the identity indicator.
  const FailureProfile none = FailureProfile::zeros(3);
  CHECK(sramdp::channel_prob(Word::encode(5, 3), Word::encode(5, 3), none) == 1.0);
  CHECK(sramdp::channel_prob(Word::encode(5, 3), Word::encode(4, 3), none) == 0.0);

  const FailureProfile half1(std::vector<double>{0.5});
  CHECK(sramdp::channel_prob(Word::encode(1, 1), Word::encode(1, 1), half1) ==
        doctest::Approx(0.75));

  const FailureProfile half2(std::vector<double>{0.5, 0.5});
  CHECK(sramdp::channel_prob(Word::from_string("11"), Word::from_string("00"),
                             half2) == doctest::Approx(0.0625));
}

TEST_CASE("channel matrices are stochastic") {
  const Channel identity =
      sramdp::build_channel(CandidateSet::full_domain(2), FailureProfile::zeros(2));
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK(identity.matrix()[i][j] == (i == j ? 1.0 : 0.0));
    }
  }

  const Channel rr = sramdp::build_channel(
      CandidateSet::full_domain(1), FailureProfile(std::vector<double>{0.5}));
  CHECK(rr.matrix()[0][0] == doctest::Approx(0.75));
  CHECK(rr.matrix()[0][1] == doctest::Approx(0.25));
  CHECK(rr.matrix()[1][0] == doctest::Approx(0.25));
  CHECK(rr.matrix()[1][1] == doctest::Approx(0.75));

  std::mt19937_64 seed_rng(2024);
  for (int n = 1; n <= 4; ++n) {
    const FailureProfile f(testutil::random_rates(seed_rng, n));
    const Channel chan = sramdp::build_channel(CandidateSet::full_domain(n), f);
    for (const auto& row : chan.matrix()) {
      double total = 0.0;
      for (double p : row) {
        CHECK(p >= 0.0);
        total += p;
      }
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("worst-case channel ratio is attained (small exhaustive)") {
  const FailureProfile f(std::vector<double>{0.3, 0.7});
  const Channel chan = sramdp::build_channel(CandidateSet::full_domain(2), f);
  double worst = 0.0;
  for (std::size_t x = 0; x < 4; ++x) {
    for (std::size_t y = 0; y < 4; ++y) {
      for (std::size_t o = 0; o < 4; ++o) {
        worst = std::max(worst, chan.matrix()[x][o] / chan.matrix()[y][o]);
      }
    }
  }
  CHECK(worst == doctest::Approx(std::exp(sramdp::epsilon_inf(f))).epsilon(1e-9));
}

TEST_CASE("randomized response reference matches its closed forms") {
  const double ln3 = std::log(3.0);
  CHECK(sramdp::rr_keep_probability(ln3) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(sramdp::rr_keep_probability(50.0) == doctest::Approx(1.0).epsilon(1e-9));

  const auto m = sramdp::rr_matrix(ln3);
  CHECK(m[0][0] == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(m[0][1] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(m[1][0] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(m[1][1] == doctest::Approx(0.75).epsilon(1e-12));

  Rng rng(11);
  int kept = 0;
  const int trials = 100000;
  for (int i = 0; i < trials; ++i) kept += sramdp::rr_reference(1, ln3, rng) == 1;
  CHECK(static_cast<double>(kept) / trials == doctest::Approx(0.75).epsilon(0.015));
}

TEST_CASE("per-bit budget makes randomized response match the cell channel") {
  // Keeping a bit with probability e^eps/(1+e^eps) at eps = ln((1-f/2)/(f/2))
  // is exactly the keep probability 1 - f/2 of a failure-prone cell.
  std::mt19937_64 seed_rng(5);
  for (int i = 0; i < 100; ++i) {
    const double f = testutil::random_rates(seed_rng, 1, 0.01, 1.0)[0];
    const double eps = sramdp::per_bit_epsilon(f);
    CHECK(sramdp::rr_keep_probability(eps) ==
          doctest::Approx(1.0 - f / 2).epsilon(1e-12));
  }
}

TEST_CASE("rr_perturb flips only failure-prone positions") {
  const FailureProfile f(std::vector<double>{0, 0, 0, 0, 0.8, 0.8, 0.8, 0.8});
  Rng rng(13);
  const Word x = Word::from_string("11001010");
  std::vector<int> flips(8, 0);
  const int trials = 50000;
  for (int i = 0; i < trials; ++i) {
    const Word o = sramdp::rr_perturb(x, f, rng);
    for (int p = 0; p < 8; ++p) flips[static_cast<std::size_t>(p)] += o.bit(p) != x.bit(p);
  }
  for (int p = 0; p < 4; ++p) CHECK(flips[static_cast<std::size_t>(p)] == 0);
  for (int p = 4; p < 8; ++p) {
    CHECK(static_cast<double>(flips[static_cast<std::size_t>(p)]) / trials ==
          doctest::Approx(0.4).epsilon(0.04));
  }
}

TEST_CASE("traces expose each pipeline stage consistently") {
  MechanismConfig config;
  config.width = 8;
  config.cells.assign(4, CellSpec::reliable());
  for (int i = 0; i < 4; ++i) config.cells.push_back(CellSpec::sram6t());
  config.voltage = 0.50;
  Mechanism mech(config);
  Rng rng(17);
  const Word x = Word::from_string("10100110");

  for (int i = 0; i < 200; ++i) {
    const PerturbTrace t = mech.perturb_trace(x, static_cast<std::size_t>(i), rng);
    const auto& pattern = mech.permset().pattern(static_cast<std::size_t>(t.pattern_index));
    CHECK(t.shuffled == pattern.apply(x));
    CHECK(t.output == pattern.invert(t.noised));
    for (int p = 0; p < 8; ++p) {
      const bool failed = t.faults.failed[static_cast<std::size_t>(p)] != 0;
      if (failed) {
        CHECK(t.raw_readout.bit(p) == 1);  // default fixed output
      } else {
        CHECK(t.raw_readout.bit(p) == t.shuffled.bit(p));
        CHECK(t.noised.bit(p) == t.shuffled.bit(p));
      }
    }
  }
}

TEST_CASE("the fixed output constant is configurable") {
  MechanismConfig config = rates_config({1.0, 1.0});
  config.fixed_output = 0;
  Mechanism mech(config);
  Rng rng(23);
  const PerturbTrace t = mech.perturb_trace(Word::from_string("11"), 0, rng);
  CHECK(t.raw_readout.decode() == 0);  // both cells failed, constant 0
}

TEST_CASE("independent streams isolate the pipeline stages") {
  MechanismConfig config;
  config.width = 8;
  config.cells.assign(4, CellSpec::reliable());
  for (int i = 0; i < 4; ++i) config.cells.push_back(CellSpec::sram6t());
  config.voltage = 0.50;

  Mechanism mech_a(config);
  Mechanism mech_b(config);
  MechanismStreams a{Rng(1), Rng(2), Rng(3)};
  MechanismStreams b{Rng(1), Rng(2), Rng(99)};  // only the noise differs
  const Word x = Word::from_string("10100110");
  for (std::size_t i = 0; i < 100; ++i) {
    const PerturbTrace ta = mech_a.perturb_trace(x, i, a);
    const PerturbTrace tb = mech_b.perturb_trace(x, i, b);
    CHECK(ta.pattern_index == tb.pattern_index);
    CHECK(ta.faults.failed == tb.faults.failed);
    for (int p = 0; p < 8; ++p) {
      if (!ta.faults.failed[static_cast<std::size_t>(p)]) {
        CHECK(ta.noised.bit(p) == tb.noised.bit(p));
      }
    }
  }
}

TEST_CASE("identical seeds reproduce identical outputs") {
  MechanismConfig config = rates_config({0, 0, 0.6, 0.6});
  Mechanism a(config), b(config);
  Rng ra(5), rb(5);
  for (int i = 0; i < 500; ++i) {
    const Word x = Word::encode(static_cast<std::uint32_t>(i) % 16, 4);
    CHECK(a.perturb(x, ra).output == b.perturb(x, rb).output);
  }
}

TEST_CASE("the LFSR noise source is deterministic per register seed") {
  MechanismConfig config = rates_config({0.7, 0.7, 0.7, 0.7});
  config.noise_source = NoiseSource::kLfsr;
  config.lfsr = LfsrConfig{8, std::nullopt, 42};

  Mechanism a(config), b(config);
  Rng ra(5), rb(5);
  bool all_equal = true;
  for (int i = 0; i < 300; ++i) {
    const Word x = Word::encode(9, 4);
    if (!(a.perturb(x, ra).output == b.perturb(x, rb).output)) all_equal = false;
  }
  CHECK(all_equal);

  // A different register seed changes the injected bits.
  MechanismConfig other = config;
  other.lfsr = LfsrConfig{8, std::nullopt, 43};
  Mechanism c(other);
  Rng rc(5);
  Rng rd(5);
  Mechanism d(config);
  int diffs = 0;
  for (int i = 0; i < 300; ++i) {
    const Word x = Word::encode(9, 4);
    diffs += !(c.perturb(x, rc).output == d.perturb(x, rd).output);
  }
  CHECK(diffs > 0);
}

TEST_CASE("chip mode reads the fault map of word (index mod words)") {
  MechanismConfig config;
  config.width = 8;
  config.cells.assign(4, CellSpec::reliable());
  for (int i = 0; i < 4; ++i) config.cells.push_back(CellSpec::sram6t());
  config.voltage = 0.50;
  config.mode = FailureMode::kChip;
  config.chip_words = 4;
  config.chip_seed = 77;
  Mechanism mech(config);
  const auto& chip = mech.chip();
  CHECK(chip.words() == 4);

  Rng rng(1);
  const Word x = Word::from_string("10100110");
  for (std::size_t i = 0; i < 16; ++i) {
    const PerturbTrace t = mech.perturb_trace(x, i, rng);
    const auto expected = chip.fault_map(static_cast<int>(i % 4), 0.50);
    CHECK(t.faults.failed == expected.failed);
  }

  // The average profile reflects the sampled array, one value per position.
  const FailureProfile avg = mech.average_profile();
  REQUIRE(avg.width() == 8);
  for (int p = 0; p < 4; ++p) CHECK(avg[static_cast<std::size_t>(p)] == 0.0);
}

TEST_CASE("plain perturb advances the word cursor like perturb_at") {
  MechanismConfig config;
  config.width = 8;
  config.cells.assign(4, CellSpec::reliable());
  for (int i = 0; i < 4; ++i) config.cells.push_back(CellSpec::sram6t());
  config.voltage = 0.50;
  config.mode = FailureMode::kChip;
  config.chip_words = 8;
  config.chip_seed = 3;

  Mechanism a(config), b(config);
  Rng ra(9), rb(9);
  const Word x = Word::from_string("01010101");
  for (std::size_t i = 0; i < 20; ++i) {
    CHECK(a.perturb(x, ra).output == b.perturb_at(x, i, rb).output);
  }
}

TEST_CASE("config validation rejects contradictory operating points") {
  MechanismConfig both = rates_config({0.5});
  both.cells.assign(1, CellSpec::sram6t());
  both.voltage = 0.55;
  CHECK_THROWS_AS(Mechanism{both}, ConfigError);

  MechanismConfig neither;
  neither.width = 4;
  CHECK_THROWS_AS(Mechanism{neither}, ConfigError);

  CHECK_THROWS_AS(Mechanism(rates_config({0.5, 1.5})), ConfigError);
  CHECK_THROWS_AS(Mechanism(rates_config({-0.1})), ConfigError);

  MechanismConfig chip_rates = rates_config({0.5, 0.5});
  chip_rates.mode = FailureMode::kChip;
  chip_rates.chip_words = 4;
  CHECK_THROWS_AS(Mechanism{chip_rates}, ConfigError);

  MechanismConfig bad_voltage;
  bad_voltage.width = 2;
  bad_voltage.cells.assign(2, CellSpec::sram6t());
  bad_voltage.voltage = 0.70;  // outside the 6T ladder
  CHECK_THROWS_AS(Mechanism{bad_voltage}, ConfigError);

  MechanismConfig wrong_width = rates_config({0.5, 0.5});
  wrong_width.permset = PermSet::identity_only(3);
  CHECK_THROWS_AS(Mechanism{wrong_width}, ConfigError);
}
