// Copyright 2026 The SliceGraph Authors
// SPDX-License-Identifier: Apache-2.0

#include "slicegraph/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "slicegraph/error.hpp"
#include "slicegraph/radio.hpp"

namespace slicegraph::optimizer {

namespace {

double ordered_sum(std::span<const double> values) {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum;
}

bool close_relative(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

OrInfeasible<FeasibleInterval> feasible_interval(UserId user, const IntentLabel& intent, double snr_db,
                                                 const SliceConfig& slice, const RadioParams& radio,
                                                 UpperPolicy policy) {
    if (intent.required_latency_ms > slice.latency_max_ms) return Infeasible{"latency"};
    if (intent.required_rate_mbps > slice.rate_max_mbps) return Infeasible{"rate"};

    const double c = radio::spectral_coefficient(radio.alpha, snr_db);
    const double needed = std::max(slice.rate_min_mbps, intent.required_rate_mbps);
    FeasibleInterval interval;
    interval.user_id = user;
    interval.coefficient = c;
    interval.lower_mhz = std::max(slice.bw_min_mhz, radio::bw_for_rate(radio.alpha, needed, snr_db));
    interval.upper_mhz = slice.bw_max_mhz;
    if (policy == UpperPolicy::RateCapped)
        interval.upper_mhz = std::min(interval.upper_mhz, radio::bw_for_rate(radio.alpha, slice.rate_max_mbps, snr_db));
    if (interval.lower_mhz > interval.upper_mhz) return Infeasible{"bandwidth"};
    return interval;
}

std::optional<std::vector<double>> greedy_fill(std::span<const FeasibleInterval> intervals, double budget_mhz) {
    std::vector<double> fill(intervals.size());
    std::transform(intervals.begin(), intervals.end(), fill.begin(),
                   [](const FeasibleInterval& f) { return f.lower_mhz; });
    const double lowers = ordered_sum(fill);
    if (lowers > budget_mhz) return std::nullopt;

    std::vector<std::size_t> order(intervals.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (intervals[a].coefficient != intervals[b].coefficient)
            return intervals[a].coefficient > intervals[b].coefficient;
        return intervals[a].user_id < intervals[b].user_id;
    });

    double remaining = budget_mhz - lowers;
    std::optional<std::size_t> last_topped;
    for (std::size_t i : order) {
        if (!(remaining > 0.0)) break;
        const double give = std::min(intervals[i].upper_mhz - intervals[i].lower_mhz, remaining);
        if (give <= 0.0) continue;
        fill[i] += give;
        remaining -= give;
        last_topped = i;
    }
    // Rounding in the running remainder can push the ordered sum a few ulps past
    // the budget; take them back from the last user that received extra.
    if (last_topped) {
        if (const double over = ordered_sum(fill) - budget_mhz; over > 0.0) {
            auto& b = fill[*last_topped];
            b = std::max(intervals[*last_topped].lower_mhz, b - over);
        }
    }
    while (last_topped && ordered_sum(fill) > budget_mhz) {
        auto& b = fill[*last_topped];
        b = std::max(intervals[*last_topped].lower_mhz, std::nextafter(b, 0.0));
        if (b == intervals[*last_topped].lower_mhz) break;
    }
    return fill;
}

double throughput(std::span<const FeasibleInterval> intervals, std::span<const double> bandwidths) {
    double total = 0.0;
    for (std::size_t i = 0; i < intervals.size() && i < bandwidths.size(); ++i)
        total += intervals[i].coefficient * bandwidths[i];
    return total;
}

std::vector<Allocation> make_allocations(SliceKind slice, std::span<const FeasibleInterval> intervals,
                                         std::span<const double> bandwidths) {
    std::vector<Allocation> out;
    out.reserve(intervals.size());
    for (std::size_t i = 0; i < intervals.size(); ++i) {
        const auto& f = intervals[i];
        out.push_back({f.user_id, slice, bandwidths[i], f.coefficient * bandwidths[i], f.lower_mhz, f.upper_mhz,
                       f.coefficient});
    }
    return out;
}

OrInfeasible<SliceLedger> admit_sequential(const SliceLedger& ledger, const FeasibleInterval& interval) {
    if (ledger.contains(interval.user_id))
        throw InvariantError("user " + std::to_string(interval.user_id) + " already admitted");
    if (ledger.lower_sum_mhz() + interval.lower_mhz > ledger.config().budget_mhz) return Infeasible{"capacity"};

    std::vector<FeasibleInterval> intervals;
    intervals.reserve(ledger.allocations().size() + 1);
    for (const auto& a : ledger.allocations()) intervals.push_back(a.interval());
    intervals.push_back(interval);

    auto fill = greedy_fill(intervals, ledger.config().budget_mhz);
    if (!fill) return Infeasible{"capacity"};
    SliceLedger next(ledger.config());
    next.replace(make_allocations(ledger.config().kind, intervals, *fill));
    return next;
}

NetworkState rule_based_step(NetworkState state, const UserProfile& user, const SliceConfigs& configs,
                             const RadioParams& radio) {
    if (state.seen(user.id)) throw InvariantError("user " + std::to_string(user.id) + " processed twice");
    const auto& intent = user.ground_truth;
    const auto& slice = configs[intent.slice];

    OrInfeasible<FeasibleInterval> interval = Infeasible{"zero-capacity"};
    try {
        interval = feasible_interval(user.id, intent, user.snr_db, slice, radio, UpperPolicy::RateCapped);
    } catch (const radio::ZeroCapacityError&) {
        state.reject(user.id, "zero-capacity");
        return state;
    }
    if (std::holds_alternative<Infeasible>(interval)) {
        state.reject(user.id, "infeasible-intent");
        return state;
    }

    auto admitted = admit_sequential(state.ledger(intent.slice), std::get<FeasibleInterval>(interval));
    if (auto* rejected = std::get_if<Infeasible>(&admitted)) {
        state.reject(user.id, rejected->reason);
        return state;
    }
    state.ledger(intent.slice) = std::move(std::get<SliceLedger>(admitted));
    return state;
}

OrInfeasible<OracleResult> brute_force_oracle(std::span<const FeasibleInterval> intervals, double budget_mhz,
                                              double grid_mhz) {
    if (intervals.size() > kOracleMaxUsers) throw ValidationError("instance too large for the oracle");
    if (!(grid_mhz >= kOracleMinGrid)) throw ValidationError("oracle grid below 0.05 MHz");

    struct Partial {
        double used;
        double value;
        std::vector<double> bandwidths;
    };
    std::vector<Partial> frontier{{0.0, 0.0, {}}};

    for (const auto& f : intervals) {
        std::vector<double> points;
        for (long k = 0;; ++k) {
            const double b = f.lower_mhz + static_cast<double>(k) * grid_mhz;
            if (b > f.upper_mhz) break;
            points.push_back(b);
        }
        if (points.empty() || points.back() != f.upper_mhz) points.push_back(f.upper_mhz);

        std::vector<Partial> next;
        for (const auto& p : frontier)
            for (double b : points) {
                const double used = p.used + b;
                if (used > budget_mhz) break;
                auto bandwidths = p.bandwidths;
                bandwidths.push_back(b);
                next.push_back({used, p.value + f.coefficient * b, std::move(bandwidths)});
            }
        if (next.empty()) return Infeasible{"capacity"};

        // Keep the Pareto frontier: increasing used must buy strictly more value.
        std::sort(next.begin(), next.end(), [](const Partial& a, const Partial& b) {
            if (a.used != b.used) return a.used < b.used;
            return a.value > b.value;
        });
        frontier.clear();
        for (auto& p : next)
            if (frontier.empty() || p.value > frontier.back().value) frontier.push_back(std::move(p));
    }

    const auto best = std::max_element(frontier.begin(), frontier.end(),
                                       [](const Partial& a, const Partial& b) { return a.value < b.value; });
    return OracleResult{best->value, best->bandwidths};
}

std::vector<std::string> check_network_state(const NetworkState& state, double alpha,
                                             std::span<const UserProfile> users,
                                             const std::map<UserId, double>* required_rates) {
    std::vector<std::string> problems;
    std::map<UserId, const UserProfile*> by_id;
    for (const auto& u : users) by_id[u.id] = &u;

    std::set<UserId> seen;
    auto note_user = [&](UserId id, const char* where) {
        if (!seen.insert(id).second)
            problems.push_back("user " + std::to_string(id) + " appears more than once (" + where + ")");
    };

    for (SliceKind kind : kAllSlices) {
        const auto& ledger = state.ledger(kind);
        const auto& cfg = ledger.config();
        const std::string name(to_string(kind));
        if (cfg.kind != kind) problems.push_back(name + ": ledger carries the wrong config");
        if (ledger.allocated_mhz() > cfg.budget_mhz) problems.push_back(name + ": budget exceeded");
        for (const auto& a : ledger.allocations()) {
            const auto id = std::to_string(a.user_id);
            note_user(a.user_id, name.c_str());
            if (a.slice != kind) problems.push_back(name + ": user " + id + " carries the wrong slice");
            constexpr double tol = 1e-9;
            if (a.bandwidth_mhz < cfg.bw_min_mhz * (1 - tol) || a.bandwidth_mhz > cfg.bw_max_mhz * (1 + tol))
                problems.push_back(name + ": user " + id + " bandwidth outside slice bounds");
            if (a.bandwidth_mhz < a.lower_mhz * (1 - tol) || a.bandwidth_mhz > a.upper_mhz * (1 + tol))
                problems.push_back(name + ": user " + id + " bandwidth outside its interval");
            if (auto it = by_id.find(a.user_id); it != by_id.end()) {
                const double expected = radio::user_rate(alpha, a.bandwidth_mhz, it->second->snr_db);
                if (!close_relative(a.rate_mbps, expected, tol))
                    problems.push_back(name + ": user " + id + " rate disagrees with the rate formula");
            } else {
                problems.push_back(name + ": user " + id + " is not a known user");
            }
            if (required_rates) {
                if (auto it = required_rates->find(a.user_id); it != required_rates->end())
                    if (a.rate_mbps < it->second * (1 - 1e-12))
                        problems.push_back(name + ": user " + id + " below its required rate");
            }
        }
    }
    for (const auto& r : state.rejected) note_user(r.user_id, "rejected");
    return problems;
}

LpInstance random_lp_instance(std::mt19937_64& rng, std::size_t max_users) {
    if (max_users == 0) throw ValidationError("instances need at least one user");
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53); };
    LpInstance inst;
    const auto n = 1 + static_cast<std::size_t>(rng() % max_users);
    double lowers = 0.0;
    double uppers = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        FeasibleInterval f;
        f.user_id = i + 1;
        f.coefficient = uniform(1.0, 20.0);
        f.lower_mhz = uniform(1.0, 5.0);
        f.upper_mhz = f.lower_mhz + uniform(0.0, 10.0);
        lowers += f.lower_mhz;
        uppers += f.upper_mhz;
        inst.intervals.push_back(f);
    }
    inst.budget_mhz = uniform(lowers, uppers + 5.0);
    return inst;
}

OracleCheckReport oracle_check(std::size_t instances, double grid_mhz, std::uint64_t seed, std::size_t max_users) {
    if (instances == 0) throw ValidationError("instance count must be at least 1");
    if (!(grid_mhz >= kOracleMinGrid)) throw ValidationError("grid must be at least 0.05 MHz");
    if (max_users > kOracleMaxUsers) throw ValidationError("oracle handles at most 6 users");
    std::mt19937_64 rng(seed);
    OracleCheckReport report;
    for (std::size_t k = 0; k < instances; ++k) {
        const auto inst = random_lp_instance(rng, max_users);
        const auto fill = greedy_fill(inst.intervals, inst.budget_mhz);
        const auto oracle = brute_force_oracle(inst.intervals, inst.budget_mhz, grid_mhz);
        if (!fill || !std::holds_alternative<OracleResult>(oracle))
            throw InvariantError("random instance unexpectedly infeasible");
        double c_max = 0.0;
        for (const auto& f : inst.intervals) c_max = std::max(c_max, f.coefficient);
        const double bound = c_max * grid_mhz;
        const double gap = std::get<OracleResult>(oracle).throughput - throughput(inst.intervals, *fill);
        ++report.instances;
        if (std::abs(gap) <= bound) ++report.within_grid;
        if (gap > bound) report.all_within_bound = false;
        report.max_deviation = std::max(report.max_deviation, gap / bound);
        report.worst_shortfall = std::max(report.worst_shortfall, gap);
    }
    return report;
}

}  // namespace slicegraph::optimizer
