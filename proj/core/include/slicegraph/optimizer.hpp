// Copyright 2026 The SliceGraph Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "slicegraph/domain.hpp"

namespace slicegraph::optimizer {

struct Infeasible {
    std::string reason;

    bool operator==(const Infeasible&) const = default;
};

template <typename T>
using OrInfeasible = std::variant<T, Infeasible>;

// How the upper end of a feasible interval is chosen.
enum class UpperPolicy {
    // min(bw_max, bandwidth reaching rate_max): strict rate bounds (rule-based solver).
    RateCapped,
    // bw_max only; rate_max is enforced later by capping the reported rate (agent grants).
    SliceMax,
};

// Bandwidth interval satisfying the intent's rate and latency against a slice.
// The intent's own slice label is not consulted, so handover can probe the other
// slice. Reasons: "latency", "rate", "bandwidth". Throws radio::ZeroCapacityError.
OrInfeasible<FeasibleInterval> feasible_interval(UserId user, const IntentLabel& intent, double snr_db,
                                                 const SliceConfig& slice, const RadioParams& radio,
                                                 UpperPolicy policy = UpperPolicy::RateCapped);

// Exact LP optimum of sum(c_n B_n) s.t. lower <= B <= upper, sum(B) <= budget.
// Everyone gets lower, the rest goes out in descending coefficient order (ties:
// ascending user id). Result is index-aligned with intervals; nullopt when the
// lowers alone exceed the budget. The left-to-right sum never exceeds budget.
std::optional<std::vector<double>> greedy_fill(std::span<const FeasibleInterval> intervals, double budget_mhz);

// Sum of c_n B_n.
double throughput(std::span<const FeasibleInterval> intervals, std::span<const double> bandwidths);

// Builds allocations (rate = c * B) from a fill.
std::vector<Allocation> make_allocations(SliceKind slice, std::span<const FeasibleInterval> intervals,
                                         std::span<const double> bandwidths);

// Admits a new user into a slice and re-fills everyone, or rejects with "capacity"
// when the lowers no longer fit. Existing users may shrink toward their lowers but
// are never evicted. Throws InvariantError if the user is already in the ledger.
OrInfeasible<SliceLedger> admit_sequential(const SliceLedger& ledger, const FeasibleInterval& interval);

// One arrival under ideal intent understanding: the user's ground truth picks the
// slice, the strict interval is computed and admit_sequential applied. Failures
// land in state.rejected ("infeasible-intent", "capacity" or "zero-capacity").
NetworkState rule_based_step(NetworkState state, const UserProfile& user, const SliceConfigs& configs,
                             const RadioParams& radio);

struct OracleResult {
    double throughput = 0.0;
    std::vector<double> bandwidths;
};

inline constexpr std::size_t kOracleMaxUsers = 6;
inline constexpr double kOracleMinGrid = 0.05;

// Exhaustive search over {lower + k*grid} ∪ {upper} per user under the budget,
// maximizing throughput. A Pareto frontier over (used bandwidth, throughput)
// prunes only provably dominated partial assignments. Throws ValidationError
// for more than 6 users or grid < 0.05 MHz.
OrInfeasible<OracleResult> brute_force_oracle(std::span<const FeasibleInterval> intervals, double budget_mhz,
                                              double grid_mhz);

// Every ledger and partition invariant of a network state; returns one message per
// violation (empty when valid). When required_rates is given, admitted users must
// also reach their required rate.
std::vector<std::string> check_network_state(const NetworkState& state, double alpha,
                                             std::span<const UserProfile> users,
                                             const std::map<UserId, double>* required_rates = nullptr);

struct LpInstance {
    std::vector<FeasibleInterval> intervals;
    double budget_mhz = 0.0;
};

// 1..max_users users with coefficients in [1, 20] and lowers in [1, 5] MHz; the
// budget lies between the lower sum and a little past the upper sum.
LpInstance random_lp_instance(std::mt19937_64& rng, std::size_t max_users = 5);

struct OracleCheckReport {
    std::size_t instances = 0;
    std::size_t within_grid = 0;    // |greedy - oracle| <= c_max * grid
    double max_deviation = 0.0;     // largest (oracle - greedy) / (c_max * grid)
    double worst_shortfall = 0.0;   // largest oracle - greedy in Mbps
    bool all_within_bound = true;   // greedy >= oracle - c_max * grid everywhere
};

OracleCheckReport oracle_check(std::size_t instances, double grid_mhz, std::uint64_t seed,
                               std::size_t max_users = 5);

}  // namespace slicegraph::optimizer
