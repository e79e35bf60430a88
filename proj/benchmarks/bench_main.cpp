// Copyright 2026 The SliceGraph Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <random>

#include "slicegraph/knowledge.hpp"
#include "slicegraph/optimizer.hpp"
#include "slicegraph/sim.hpp"

using namespace slicegraph;

namespace {

const std::string kData = SLICEGRAPH_DATA_DIR;

std::vector<FeasibleInterval> random_intervals(std::size_t n) {
    std::mt19937_64 rng(n);
    std::uniform_real_distribution<double> c(1.0, 20.0);
    std::uniform_real_distribution<double> lower(1.0, 5.0);
    std::uniform_real_distribution<double> width(0.0, 10.0);
    std::vector<FeasibleInterval> out;
    for (std::size_t i = 0; i < n; ++i) {
        const double l = lower(rng);
        out.push_back({i + 1, l, l + width(rng), c(rng)});
    }
    return out;
}

void greedy_fill(benchmark::State& state) {
    const auto intervals = random_intervals(static_cast<std::size_t>(state.range(0)));
    double budget = 0.0;
    for (const auto& f : intervals) budget += (f.lower_mhz + f.upper_mhz) / 2.0;
    for (auto _ : state) benchmark::DoNotOptimize(optimizer::greedy_fill(intervals, budget));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(greedy_fill)->RangeMultiplier(8)->Range(8, 4096)->Complexity();

void kb_retrieve(benchmark::State& state) {
    const auto kb = knowledge::load_kb(kData + "/kb.json");
    for (auto _ : state) benchmark::DoNotOptimize(kb.retrieve("remote surgery robot arm with haptic feedback", 3));
}
BENCHMARK(kb_retrieve);

void run_method(benchmark::State& state, sim::Method method) {
    const auto scenario = load_scenario(kData + "/case_study.json");
    const auto pool = sim::load_request_pool(kData + "/request_pool.json");
    const auto users = sim::scenario_users(scenario, scenario.seed, pool);
    sim::RunOptions options;
    options.backend = sim::reference_mock_factory(scenario.slices);
    for (auto _ : state)
        benchmark::DoNotOptimize(sim::run_users(scenario.slices, scenario.radio, users, method, options));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(users.size()));
}
BENCHMARK_CAPTURE(run_method, rule, sim::Method::Rule);
BENCHMARK_CAPTURE(run_method, agent, sim::Method::Agent);
BENCHMARK_CAPTURE(run_method, prompt, sim::Method::Prompt);

}  // namespace

BENCHMARK_MAIN();
