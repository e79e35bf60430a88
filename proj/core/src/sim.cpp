// Copyright 2026 The SliceGraph Authors
// SPDX-License-Identifier: Apache-2.0

#include "slicegraph/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <regex>

#include "slicegraph/optimizer.hpp"
#include "slicegraph/radio.hpp"

namespace slicegraph::sim {

namespace {

constexpr const char* kMetricNames[] = {"utilization_overall", "utilization_embb", "utilization_urllc",
                                        "idle_rate",           "final_utilization", "throughput_mbps",
                                        "supported_users",     "users_processed",  "intent_accuracy"};

double* fields(Metrics& m, std::size_t i) {
    double* all[] = {&m.utilization_overall, &m.utilization_embb, &m.utilization_urllc,
                     &m.idle_rate,           &m.final_utilization, &m.throughput_mbps,
                     &m.supported_users,     &m.users_processed,  &m.intent_accuracy};
    return all[i];
}

double capped_throughput(const NetworkState& network) {
    double total = 0.0;
    for (SliceKind kind : kAllSlices) {
        const auto& ledger = network.ledger(kind);
        for (const auto& a : ledger.allocations()) total += std::min(a.rate_mbps, ledger.config().rate_max_mbps);
    }
    return total;
}

SlotSnapshot snapshot(const NetworkState& network, UserId user) {
    SlotSnapshot s;
    s.slot = network.slot;
    s.user_id = user;
    s.embb_allocated_mhz = network.embb.allocated_mhz();
    s.embb_idle_mhz = network.embb.free_mhz();
    s.urllc_allocated_mhz = network.urllc.allocated_mhz();
    s.urllc_idle_mhz = network.urllc.free_mhz();
    s.admitted = network.admitted_count();
    return s;
}

Metrics summarize(const NetworkState& network, const SliceConfigs& slices, std::vector<SlotSnapshot> per_slot,
                  std::size_t correct) {
    Metrics m;
    const double total = slices.total_budget_mhz();
    for (const auto& s : per_slot) {
        m.utilization_overall += (s.embb_allocated_mhz + s.urllc_allocated_mhz) / total;
        m.utilization_embb += s.embb_allocated_mhz / slices.embb.budget_mhz;
        m.utilization_urllc += s.urllc_allocated_mhz / slices.urllc.budget_mhz;
    }
    const double slots = static_cast<double>(per_slot.size());
    if (!per_slot.empty()) {
        m.utilization_overall /= slots;
        m.utilization_embb /= slots;
        m.utilization_urllc /= slots;
        m.intent_accuracy = static_cast<double>(correct) / slots;
    }
    m.idle_rate = 1.0 - m.utilization_overall;
    m.final_utilization = (network.embb.allocated_mhz() + network.urllc.allocated_mhz()) / total;
    m.throughput_mbps = capped_throughput(network);
    m.supported_users = static_cast<double>(network.admitted_count());
    m.users_processed = static_cast<double>(network.processed_count());
    m.per_slot = std::move(per_slot);
    return m;
}

void require_processed(const NetworkState& network, UserId user) {
    if (!network.seen(user)) throw InvariantError("user " + std::to_string(user) + " left neither admitted nor rejected");
}

std::string fmt(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

}  // namespace

std::string_view to_string(Method method) noexcept {
    switch (method) {
        case Method::Rule:
            return "rule";
        case Method::Agent:
            return "agent";
        case Method::Prompt:
            return "prompt";
    }
    return "rule";
}

Method parse_method(std::string_view text) {
    for (Method m : kAllMethods)
        if (text == to_string(m)) return m;
    throw ValidationError("unknown method \"" + std::string(text) + "\"");
}

std::span<const char* const> metric_names() noexcept { return kMetricNames; }

std::vector<double> metric_values(const Metrics& metrics) {
    auto copy = metrics;
    std::vector<double> out;
    for (std::size_t i = 0; i < std::size(kMetricNames); ++i) out.push_back(*fields(copy, i));
    return out;
}

void to_json(nlohmann::json& j, const PoolRequest& r) { j = {{"text", r.text}, {"label", r.label}}; }

void from_json(const nlohmann::json& j, PoolRequest& r) {
    if (!j.is_object() || !j.contains("text") || !j.contains("label"))
        throw ParseError("request pool entry needs text and label");
    r.text = j.at("text").get<std::string>();
    r.label = j.at("label").get<IntentLabel>();
    if (r.text.empty()) throw ValidationError("request pool entry has empty text");
}

std::vector<PoolRequest> load_request_pool(const std::filesystem::path& path) {
    const auto j = read_json_file(path);
    if (!j.is_array()) throw ParseError(path.string() + ": request pool must be a JSON array");
    std::vector<PoolRequest> pool;
    try {
        pool = j.get<std::vector<PoolRequest>>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    if (pool.empty()) throw ValidationError(path.string() + ": request pool is empty");
    return pool;
}

double unit_uniform(std::uint64_t bits) noexcept { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

std::vector<UserProfile> generate_users(std::size_t n, std::uint64_t seed, const RadioParams& radio,
                                        std::span<const PoolRequest> pool, const UserGeneratorConfig& geometry) {
    if (n == 0) throw ValidationError("user count must be at least 1");
    if (pool.empty()) throw ValidationError("request pool is empty");
    if (!(geometry.min_radius_m >= 1.0) || !(geometry.max_radius_m >= geometry.min_radius_m))
        throw ValidationError("radius bounds must satisfy 1 <= min <= max");
    validate_radio(radio);

    std::mt19937_64 rng(seed);
    const double r0 = geometry.min_radius_m * geometry.min_radius_m;
    const double r1 = geometry.max_radius_m * geometry.max_radius_m;
    std::vector<UserProfile> users;
    users.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double distance = std::sqrt(r0 + unit_uniform(rng()) * (r1 - r0));
        const auto pick = std::min(pool.size() - 1, static_cast<std::size_t>(unit_uniform(rng()) * pool.size()));
        UserProfile u;
        u.id = i + 1;
        u.snr_db = radio::snr_from_geometry(radio, std::clamp(distance, geometry.min_radius_m, geometry.max_radius_m));
        u.request_text = pool[pick].text;
        u.ground_truth = pool[pick].label;
        users.push_back(std::move(u));
    }
    return users;
}

std::vector<UserProfile> scenario_users(const Scenario& scenario, std::uint64_t seed,
                                        std::span<const PoolRequest> pool) {
    if (!scenario.users.empty()) return scenario.users;
    if (!scenario.generate) throw ValidationError("scenario has no users and no generate block");
    return generate_users(scenario.generate->n, seed, scenario.radio, pool, *scenario.generate);
}

std::unique_ptr<llm::MockBackend> make_reference_mock(std::span<const UserProfile> users,
                                                      const SliceConfigs& configs) {
    std::map<UserId, UserProfile> by_id;
    for (const auto& u : users) by_id[u.id] = u;
    auto lookup = [by_id = std::move(by_id)](std::string_view text) -> const UserProfile* {
        static const std::regex id(R"(User ID: (\d+))");
        std::match_results<std::string_view::const_iterator> m;
        if (!std::regex_search(text.begin(), text.end(), m, id)) return nullptr;
        const auto it = by_id.find(std::stoull(m[1].str()));
        return it == by_id.end() ? nullptr : &it->second;
    };

    auto mock = std::make_unique<llm::MockBackend>();
    mock->on([lookup](std::string_view text) { return lookup(text) != nullptr; },
             [lookup, configs](std::string_view text) {
                 const auto& truth = lookup(text)->ground_truth;
                 if (text.find("bandwidth_mhz") != std::string_view::npos)
                     return nlohmann::json{{"slice", truth.slice}, {"bandwidth_mhz", configs[truth.slice].bw_max_mhz}}
                         .dump();
                 return llm::serialize_intent(truth);
             });
    mock->freeze();
    return mock;
}

BackendFactory reference_mock_factory(const SliceConfigs& configs) {
    return [configs](std::span<const UserProfile> users) -> std::shared_ptr<llm::Backend> {
        return make_reference_mock(users, configs);
    };
}

RunResult run_users(const SliceConfigs& slices, const RadioParams& radio, std::vector<UserProfile> users,
                    Method method, const RunOptions& options) {
    std::sort(users.begin(), users.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < users.size(); ++i)
        if (users[i].id == users[i - 1].id) throw ValidationError("duplicate user id " + std::to_string(users[i].id));

    std::shared_ptr<llm::Backend> backend;
    if (method != Method::Rule) {
        if (!options.backend) throw ValidationError(std::string(to_string(method)) + " method needs a backend");
        backend = options.backend(users);
    }
    agent::AgentContext ctx{options.kb, backend.get(), slices, radio, options.templates, knowledge::kDefaultRetrievalK};
    std::optional<graphflow::CompiledGraph> graph;
    if (method == Method::Agent) graph = agent::build_agent_graph(ctx);

    RunResult result;
    result.network = NetworkState(slices);
    std::vector<SlotSnapshot> per_slot;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < users.size(); ++i) {
        const auto& user = users[i];
        result.network.slot = i + 1;
        std::optional<SliceKind> recommended;
        try {
            switch (method) {
                case Method::Rule:
                    result.network = optimizer::rule_based_step(std::move(result.network), user, slices, radio);
                    recommended = user.ground_truth.slice;
                    break;
                case Method::Agent: {
                    graphflow::GlobalState state;
                    state.current_user = user;
                    state.network = result.network;
                    auto out = graph->run(std::move(state));
                    result.trace.insert(result.trace.end(), out.trace.begin(), out.trace.end());
                    recommended = agent::recommended_slice(out);
                    result.network = std::move(out.network);
                    break;
                }
                case Method::Prompt: {
                    auto step = agent::prompt_baseline_step(std::move(result.network), user, *backend, slices, radio,
                                                            options.templates);
                    result.network = std::move(step.network);
                    recommended = step.recommended;
                    break;
                }
            }
        } catch (const graphflow::NodeError& e) {
            result.trace.insert(result.trace.end(), e.trace().begin(), e.trace().end());
            try {
                std::rethrow_exception(e.cause());
            } catch (const InvariantError&) {
                throw;
            } catch (...) {
            }
            throw RunAborted(e.what(), std::move(result.trace), i, e.cause());
        } catch (const graphflow::CycleError& e) {
            throw InvariantError(e.what());
        } catch (const llm::BackendError& e) {
            throw RunAborted(e.what(), std::move(result.trace), i, std::current_exception());
        }
        require_processed(result.network, user.id);
        if (recommended && *recommended == user.ground_truth.slice) ++correct;
        per_slot.push_back(snapshot(result.network, user.id));
    }
    result.metrics = summarize(result.network, slices, std::move(per_slot), correct);
    return result;
}

RunResult run_scenario(const Scenario& scenario, Method method, const RunOptions& options,
                       std::span<const PoolRequest> pool) {
    validate_scenario(scenario);
    return run_users(scenario.slices, scenario.radio, scenario_users(scenario, scenario.seed, pool), method, options);
}

std::pair<Metrics, Metrics> aggregate(std::span<const Metrics> runs) {
    Metrics mean;
    Metrics sd;
    if (runs.empty()) return {mean, sd};
    const double n = static_cast<double>(runs.size());
    for (std::size_t f = 0; f < std::size(kMetricNames); ++f) {
        double sum = 0.0;
        for (auto r : runs) sum += *fields(r, f);
        const double mu = sum / n;
        double sq = 0.0;
        for (auto r : runs) sq += (*fields(r, f) - mu) * (*fields(r, f) - mu);
        *fields(mean, f) = mu;
        *fields(sd, f) = runs.size() > 1 ? std::sqrt(sq / (n - 1.0)) : 0.0;
    }
    return {mean, sd};
}

MonteCarloResult monte_carlo(const Scenario& scenario, Method method, std::size_t trials, std::uint64_t base_seed,
                             const RunOptions& options, std::span<const PoolRequest> pool) {
    if (trials == 0) throw ValidationError("trials must be at least 1");
    validate_scenario(scenario);
    MonteCarloResult out;
    for (std::size_t t = 0; t < trials; ++t) {
        const auto seed = base_seed + t;
        try {
            out.trials.push_back({seed, method,
                                  run_users(scenario.slices, scenario.radio, scenario_users(scenario, seed, pool),
                                            method, options)});
        } catch (const RunAborted& e) {
            throw MonteCarloAborted("trial with seed " + std::to_string(seed) + " aborted after " +
                                        std::to_string(t) + " completed trials: " + e.what(),
                                    t, e.cause());
        }
    }
    std::vector<Metrics> runs;
    for (const auto& t : out.trials) runs.push_back(t.result.metrics);
    std::tie(out.mean, out.stddev) = aggregate(runs);
    return out;
}

std::vector<CompareRow> compare(const SliceConfigs& slices, const RadioParams& radio,
                                std::span<const UserProfile> users, const RunOptions& options) {
    if (users.empty()) throw ValidationError("comparison needs at least one user");
    std::vector<UserProfile> sorted(users.begin(), users.end());
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    std::vector<CompareRow> rows;
    for (std::size_t n = 1; n <= sorted.size(); ++n) {
        CompareRow row;
        row.users = n;
        std::vector<UserProfile> prefix(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n));
        for (Method m : kAllMethods) {
            const auto r = run_users(slices, radio, prefix, m, options);
            row.throughput[static_cast<int>(m)] = r.metrics.throughput_mbps;
            row.idle[static_cast<int>(m)] = 1.0 - r.metrics.final_utilization;
        }
        rows.push_back(row);
    }
    return rows;
}

void write_metrics_csv_header(std::ostream& out) {
    out << "trial,seed,method";
    for (const char* name : kMetricNames) out << ',' << name;
    out << "\r\n";
}

void write_metrics_csv_row(std::ostream& out, std::size_t trial, const Trial& t) {
    out << trial << ',' << t.seed << ',' << to_string(t.method);
    for (double v : metric_values(t.result.metrics)) out << ',' << fmt(v);
    out << "\r\n";
}

void write_compare_csv(std::ostream& out, std::span<const CompareRow> rows) {
    out << "users";
    for (Method m : kAllMethods) out << ",throughput_" << to_string(m);
    for (Method m : kAllMethods) out << ",idle_" << to_string(m);
    out << "\r\n";
    for (const auto& r : rows) {
        out << r.users;
        for (double v : r.throughput) out << ',' << fmt(v);
        for (double v : r.idle) out << ',' << fmt(v);
        out << "\r\n";
    }
}

}  // namespace slicegraph::sim
