// Copyright 2026 The SliceGraph Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "slicegraph/agent.hpp"
#include "slicegraph/domain.hpp"
#include "slicegraph/graphflow.hpp"
#include "slicegraph/knowledge.hpp"
#include "slicegraph/llm.hpp"

namespace slicegraph::sim {

enum class Method { Rule, Agent, Prompt };

inline constexpr Method kAllMethods[] = {Method::Rule, Method::Agent, Method::Prompt};

std::string_view to_string(Method method) noexcept;
Method parse_method(std::string_view text);

struct SlotSnapshot {
    std::uint64_t slot = 0;
    UserId user_id = 0;
    double embb_allocated_mhz = 0.0;
    double embb_idle_mhz = 0.0;
    double urllc_allocated_mhz = 0.0;
    double urllc_idle_mhz = 0.0;
    std::size_t admitted = 0;
    bool operator==(const SlotSnapshot&) const = default;
};

struct Metrics {
    double utilization_overall = 0.0;  // averaged over slots
    double utilization_embb = 0.0;
    double utilization_urllc = 0.0;
    double idle_rate = 0.0;
    double final_utilization = 0.0;  // after the last slot
    double throughput_mbps = 0.0;    // rates counted up to each slice's rate ceiling
    double supported_users = 0.0;
    double users_processed = 0.0;
    double intent_accuracy = 0.0;
    std::vector<SlotSnapshot> per_slot;
    bool operator==(const Metrics&) const = default;
};

// Names of the scalar metrics, in CSV column order, and their values.
std::span<const char* const> metric_names() noexcept;
std::vector<double> metric_values(const Metrics& metrics);

struct PoolRequest {
    std::string text;
    IntentLabel label;
    bool operator==(const PoolRequest&) const = default;
};

void to_json(nlohmann::json& j, const PoolRequest& request);
void from_json(const nlohmann::json& j, PoolRequest& request);

std::vector<PoolRequest> load_request_pool(const std::filesystem::path& path);

// Uniform 53-bit double in [0, 1) from one mt19937_64 draw; identical on every platform.
double unit_uniform(std::uint64_t bits) noexcept;

// Users 1..n placed uniformly by area in the annulus [min_radius, max_radius]
// around the base station, each drawing a request from the pool.
std::vector<UserProfile> generate_users(std::size_t n, std::uint64_t seed, const RadioParams& radio,
                                        std::span<const PoolRequest> pool, const UserGeneratorConfig& geometry = {});

// Explicit users win; otherwise users are generated from the scenario's block with the given seed.
std::vector<UserProfile> scenario_users(const Scenario& scenario, std::uint64_t seed,
                                        std::span<const PoolRequest> pool);

// Perfect backend: intent prompts get the user's true intent, allocation prompts
// get the true slice at its per-user maximum. Users are found by "User ID: <n>".
std::unique_ptr<llm::MockBackend> make_reference_mock(std::span<const UserProfile> users,
                                                      const SliceConfigs& configs);

// Yields the backend for one trial's users; may hand back the same instance every time.
using BackendFactory = std::function<std::shared_ptr<llm::Backend>(std::span<const UserProfile>)>;

BackendFactory reference_mock_factory(const SliceConfigs& configs);

struct RunOptions {
    BackendFactory backend;  // unused by the rule method
    const knowledge::KnowledgeBase* kb = nullptr;
    agent::PromptTemplates templates = agent::PromptTemplates::defaults();
};

struct RunResult {
    Metrics metrics;
    NetworkState network;
    std::vector<graphflow::TraceEntry> trace;  // agent method only
};

// Backend failures (and workflow failures) abort the run; the trace so far travels with it.
class RunAborted : public Error {
  public:
    RunAborted(const std::string& what, std::vector<graphflow::TraceEntry> trace, std::size_t completed,
               std::exception_ptr cause)
        : Error(what), trace_(std::move(trace)), completed_(completed), cause_(cause) {}
    [[nodiscard]] const std::vector<graphflow::TraceEntry>& trace() const noexcept { return trace_; }
    [[nodiscard]] std::size_t completed_users() const noexcept { return completed_; }
    [[nodiscard]] std::exception_ptr cause() const noexcept { return cause_; }

  private:
    std::vector<graphflow::TraceEntry> trace_;
    std::size_t completed_;
    std::exception_ptr cause_;
};

// Users in id order, one per slot starting at slot 1.
RunResult run_users(const SliceConfigs& slices, const RadioParams& radio, std::vector<UserProfile> users,
                    Method method, const RunOptions& options);

RunResult run_scenario(const Scenario& scenario, Method method, const RunOptions& options,
                       std::span<const PoolRequest> pool = {});

struct Trial {
    std::uint64_t seed = 0;
    Method method = Method::Rule;
    RunResult result;
};

struct MonteCarloResult {
    std::vector<Trial> trials;  // sorted by seed
    Metrics mean;
    Metrics stddev;  // sample standard deviation; zero for a single trial
};

class MonteCarloAborted : public Error {
  public:
    MonteCarloAborted(const std::string& what, std::size_t completed, std::exception_ptr cause)
        : Error(what), completed_(completed), cause_(cause) {}
    [[nodiscard]] std::size_t completed_trials() const noexcept { return completed_; }
    [[nodiscard]] std::exception_ptr cause() const noexcept { return cause_; }

  private:
    std::size_t completed_;
    std::exception_ptr cause_;
};

MonteCarloResult monte_carlo(const Scenario& scenario, Method method, std::size_t trials, std::uint64_t base_seed,
                             const RunOptions& options, std::span<const PoolRequest> pool = {});

// Per-metric mean and sample standard deviation of the scalar fields.
std::pair<Metrics, Metrics> aggregate(std::span<const Metrics> runs);

struct CompareRow {
    std::size_t users = 0;
    double throughput[3] = {};  // indexed by Method
    double idle[3] = {};        // final-state idle rate
};

// Each row replays the first n users (n = 1..N) through all three methods.
std::vector<CompareRow> compare(const SliceConfigs& slices, const RadioParams& radio,
                                std::span<const UserProfile> users, const RunOptions& options);

void write_metrics_csv_header(std::ostream& out);
void write_metrics_csv_row(std::ostream& out, std::size_t trial, const Trial& t);
void write_compare_csv(std::ostream& out, std::span<const CompareRow> rows);

}  // namespace slicegraph::sim
