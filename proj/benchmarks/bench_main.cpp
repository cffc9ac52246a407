/*
 * Copyright (c) 2026 The trilimb authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include <benchmark/benchmark.h>

#include <random>

#include "trilimb/hysteresis.hpp"
#include "trilimb/protocol.hpp"
#include "trilimb/session.hpp"
#include "trilimb/stats.hpp"

namespace trilimb {
namespace {

void BM_SessionTick(benchmark::State& state) {
  SessionConfig cfg;
  cfg.mode = state.range(0) ? ControlMode::HandClutch : ControlMode::ThreeLimb;
  Session s(cfg);
  AxesRecord axes;
  axes[AxesRecord::kYF] = 0.3;
  axes[AxesRecord::kRy] = 0.2;
  for (auto _ : state) benchmark::DoNotOptimize(s.tick(axes));
}
BENCHMARK(BM_SessionTick)->Arg(0)->Arg(1);

void BM_StateHash(benchmark::State& state) {
  Session s(SessionConfig{});
  s.tick(AxesRecord{});
  for (auto _ : state) benchmark::DoNotOptimize(s.state_hash());
}
BENCHMARK(BM_StateHash);

void BM_CodecRoundTrip(benchmark::State& state) {
  Session s(SessionConfig{});
  const MasterCommand cmd = s.tick(AxesRecord{}).sent;
  for (auto _ : state) {
    const auto bytes = encode(cmd);
    benchmark::DoNotOptimize(decode(bytes));
  }
}
BENCHMARK(BM_CodecRoundTrip);

void BM_MannWhitney(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> d(200.0, 50.0);
  std::vector<double> a(state.range(0)), b(state.range(0));
  for (auto& v : a) v = d(rng);
  for (auto& v : b) v = d(rng);
  for (auto _ : state) benchmark::DoNotOptimize(mann_whitney_u(a, b));
}
BENCHMARK(BM_MannWhitney)->Arg(7)->Arg(24)->Arg(1000);

void BM_HysteresisSweep(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(hysteresis_sweep(22.5, 60.0, 2));
}
BENCHMARK(BM_HysteresisSweep);

}  // namespace
}  // namespace trilimb

BENCHMARK_MAIN();
