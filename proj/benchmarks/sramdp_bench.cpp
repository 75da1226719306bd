// Microbenchmarks for the hot paths: the write/read cycle, the
// signed-error law, channel materialization, and recovery.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "sramdp/candidates.hpp"
#include "sramdp/cellspec.hpp"
#include "sramdp/failure_profile.hpp"
#include "sramdp/mechanism.hpp"
#include "sramdp/recovery.hpp"
#include "sramdp/rng.hpp"
#include "sramdp/utility.hpp"
#include "sramdp/word.hpp"

namespace {

sramdp::MechanismConfig low_voltage_config(sramdp::FailureMode mode) {
  sramdp::MechanismConfig config;
  config.width = 8;
  config.mode = mode;
  config.voltage = 0.50;
  config.cells.assign(8, sramdp::CellSpec::sram6t());
  if (mode == sramdp::FailureMode::kChip) config.chip_words = 64;
  return config;
}

void BM_PerturbStochastic(benchmark::State& state) {
  sramdp::Mechanism mechanism(low_voltage_config(sramdp::FailureMode::kStochastic));
  sramdp::Rng rng(42);
  std::uint32_t value = 0;
  for (auto _ : state) {
    const sramdp::Word x = sramdp::Word::encode(value++ & 0xffu, 8);
    benchmark::DoNotOptimize(mechanism.perturb(x, rng));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_PerturbStochastic);

void BM_PerturbChip(benchmark::State& state) {
  sramdp::Mechanism mechanism(low_voltage_config(sramdp::FailureMode::kChip));
  sramdp::Rng rng(42);
  std::uint32_t value = 0;
  for (auto _ : state) {
    const sramdp::Word x = sramdp::Word::encode(value++ & 0xffu, 8);
    benchmark::DoNotOptimize(mechanism.perturb(x, rng));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_PerturbChip);

void BM_DeltaPmf(benchmark::State& state) {
  const int width = static_cast<int>(state.range(0));
  const auto profile = sramdp::FailureProfile::homogeneous(0.8157, width);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sramdp::delta_pmf(profile));
  }
}
BENCHMARK(BM_DeltaPmf)->Arg(8)->Arg(10)->Arg(12)->Arg(14);

void BM_ChannelBuild(benchmark::State& state) {
  const int width = static_cast<int>(state.range(0));
  std::vector<double> rates(static_cast<std::size_t>(width), 0.0);
  for (int p = width / 2; p < width; ++p) {
    rates[static_cast<std::size_t>(p)] = 0.8157;
  }
  const sramdp::FailureProfile profile(rates);
  const auto omega = sramdp::CandidateSet::full_domain(width);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sramdp::build_channel(omega, profile));
  }
}
BENCHMARK(BM_ChannelBuild)->Arg(6)->Arg(8)->Arg(10);

void BM_EmRecover(benchmark::State& state) {
  const int width = 8;
  std::vector<double> rates(8, 0.0);
  for (int p = 4; p < 8; ++p) rates[static_cast<std::size_t>(p)] = 0.8157;
  const sramdp::FailureProfile profile(rates);
  const auto omega = sramdp::CandidateSet::full_domain(width);

  sramdp::Rng rng(7);
  std::vector<sramdp::Word> observations;
  observations.reserve(2000);
  for (int i = 0; i < 2000; ++i) {
    std::uint32_t x = static_cast<std::uint32_t>(rng() % 256);
    for (int p = 0; p < width; ++p) {
      const double u =
          static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
      if (u < rates[static_cast<std::size_t>(p)] / 2.0) {
        x ^= 1u << (width - 1 - p);
      }
    }
    observations.push_back(sramdp::Word::encode(x, width));
  }

  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sramdp::em_recover(observations, profile, omega));
  }
}
BENCHMARK(BM_EmRecover);

void BM_ClrRecover(benchmark::State& state) {
  const int width = 6;
  std::vector<double> rates(6, 0.0);
  for (int p = 3; p < 6; ++p) rates[static_cast<std::size_t>(p)] = 0.7057;
  const sramdp::FailureProfile profile(rates);
  const auto omega = sramdp::CandidateSet::full_domain(width);

  sramdp::Rng rng(7);
  std::vector<sramdp::Word> observations;
  observations.reserve(1000);
  for (int i = 0; i < 1000; ++i) {
    std::uint32_t x = static_cast<std::uint32_t>(rng() % 64);
    for (int p = 0; p < width; ++p) {
      const double u =
          static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
      if (u < rates[static_cast<std::size_t>(p)] / 2.0) {
        x ^= 1u << (width - 1 - p);
      }
    }
    observations.push_back(sramdp::Word::encode(x, width));
  }

  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sramdp::clr_recover(observations, profile, omega));
  }
}
BENCHMARK(BM_ClrRecover);

}  // namespace

BENCHMARK_MAIN();
