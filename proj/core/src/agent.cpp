// Copyright 2026 The SliceGraph Authors
// SPDX-License-Identifier: Apache-2.0

#include "slicegraph/agent.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>

#include "slicegraph/optimizer.hpp"
#include "slicegraph/radio.hpp"

namespace slicegraph::agent {

namespace {

using graphflow::Evaluation;
using graphflow::GlobalState;
using Kind = graphflow::Evaluation::Kind;

constexpr const char* kUrllcKeywords[] = {"surgery", "vehicle", "control", "robotic", "emergency"};

bool rejected(const GlobalState& s) { return s.evaluation && s.evaluation->is(Kind::Reject); }

const UserProfile& user_of(const GlobalState& s) {
    if (!s.current_user) throw InvariantError("workflow state has no current user");
    return *s.current_user;
}

std::string number(double value, const char* format = "%.2f") {
    char buf[48];
    std::snprintf(buf, sizeof buf, format, value);
    return buf;
}

// Largest p' <= p with allocated + p' <= budget under ledger summation order.
double fit_within(const SliceLedger& ledger, double p) {
    const double allocated = ledger.allocated_mhz();
    const double budget = ledger.config().budget_mhz;
    while (p > 0.0 && allocated + p > budget) p = std::nextafter(p, 0.0);
    return p;
}

bool fits_without_adjusting(const SliceLedger& ledger, double p) {
    return ledger.allocated_mhz() + p <= ledger.config().budget_mhz;
}

bool intent_fits_ranges(const IntentLabel& intent, const SliceConfig& slice) {
    return intent.required_latency_ms <= slice.latency_max_ms && intent.required_rate_mbps >= slice.rate_min_mbps &&
           intent.required_rate_mbps <= slice.rate_max_mbps;
}

optimizer::OrInfeasible<FeasibleInterval> agent_interval(const UserProfile& user, const IntentLabel& intent,
                                                         const SliceConfig& slice, const RadioParams& radio) {
    try {
        return optimizer::feasible_interval(user.id, intent, user.snr_db, slice, radio,
                                            optimizer::UpperPolicy::SliceMax);
    } catch (const radio::ZeroCapacityError&) {
        return optimizer::Infeasible{"zero-capacity"};
    }
}

// Whether the other slice could take the user once its own users shrink to their lowers.
bool handover_possible(const GlobalState& s, const SliceConfigs& configs, const RadioParams& radio) {
    if (s.handover_from) return false;
    const auto target = other(*s.chosen_slice);
    const auto& slice = configs[target];
    if (!intent_fits_ranges(*s.intent, slice)) return false;
    const auto interval = agent_interval(user_of(s), *s.intent, slice, radio);
    if (!std::holds_alternative<FeasibleInterval>(interval)) return false;
    const auto& ledger = s.network.ledger(target);
    return ledger.lower_sum_mhz() + std::get<FeasibleInterval>(interval).lower_mhz <= slice.budget_mhz;
}

GlobalState record_rejection(GlobalState s) {
    const auto& user = user_of(s);
    if (!s.network.seen(user.id)) s.network.reject(user.id, s.evaluation->reason);
    return s;
}

double propose(const SliceLedger& ledger, const FeasibleInterval& interval) {
    const double grant = fit_within(ledger, std::min(interval.upper_mhz, ledger.free_mhz()));
    return grant >= interval.lower_mhz ? grant : interval.lower_mhz;
}

}  // namespace

IntentLabel fallback_intent(std::string_view request, std::span<const knowledge::Hit> hits,
                            const SliceConfigs& configs) {
    std::string lower;
    std::transform(request.begin(), request.end(), std::back_inserter(lower),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });

    SliceKind kind = SliceKind::Embb;
    bool keyword = false;
    for (const char* k : kUrllcKeywords)
        if (lower.find(k) != std::string::npos) keyword = true;
    if (keyword) {
        kind = SliceKind::Urllc;
    } else if (!hits.empty()) {
        double embb = 0.0;
        double urllc = 0.0;
        for (const auto& h : hits) (h.entry->label.slice == SliceKind::Embb ? embb : urllc) += h.score;
        kind = urllc > embb ? SliceKind::Urllc : SliceKind::Embb;
    }
    const auto& slice = configs[kind];
    return {kind, (slice.rate_min_mbps + slice.rate_max_mbps) / 2.0, slice.latency_max_ms / 2.0};
}

GlobalState node_intent(GlobalState state, const AgentContext& ctx) {
    const auto& user = user_of(state);
    std::vector<knowledge::Hit> hits;
    if (ctx.kb) hits = ctx.kb->retrieve(user.request_text, ctx.retrieval_k);
    state.kb_hits.clear();
    std::string examples;
    for (const auto& h : hits) {
        state.kb_hits.push_back(h.entry->id);
        examples += "- \"" + h.entry->text + "\" -> " + llm::serialize_intent(h.entry->label) + "\n";
    }
    if (examples.empty()) examples = "(none)\n";

    if (!ctx.backend) {
        state.intent = fallback_intent(user.request_text, hits, ctx.configs);
        return state;
    }

    std::vector<llm::ChatMessage> messages{
        {llm::Role::System, ctx.templates.system},
        {llm::Role::User, render(ctx.templates.intent, {{"user_id", std::to_string(user.id)},
                                                        {"request", user.request_text},
                                                        {"kb_examples", examples},
                                                        {"cqi", number(user.snr_db)}})}};
    for (int attempt = 0; attempt < 2; ++attempt) {
        const auto reply = ctx.backend->complete(messages);
        try {
            state.intent = llm::parse_intent(reply);
            return state;
        } catch (const llm::IntentParseError& e) {
            messages.push_back({llm::Role::Assistant, reply});
            messages.push_back({llm::Role::User, std::string("Your reply could not be used (") + e.what() +
                                                     "). Reply with only the JSON object."});
        }
    }
    state.intent = fallback_intent(user.request_text, hits, ctx.configs);
    return state;
}

GlobalState node_slice_alloc(GlobalState state, const SliceConfigs& configs) {
    if (rejected(state)) return state;
    if (!state.intent) throw InvariantError("slice allocation without an intent");
    const auto& intent = *state.intent;
    const auto& own = configs[intent.slice];
    if (intent.required_latency_ms <= own.latency_max_ms && intent.required_rate_mbps <= own.rate_max_mbps) {
        state.chosen_slice = intent.slice;
    } else if (intent_fits_ranges(intent, configs[other(intent.slice)])) {
        state.chosen_slice = other(intent.slice);
    } else {
        state.evaluation = Evaluation::reject("no-fitting-slice");
    }
    return state;
}

GlobalState node_bw_alloc(GlobalState state, const SliceConfigs& configs, const RadioParams& radio) {
    if (rejected(state)) return state;
    if (!state.chosen_slice) throw InvariantError("bandwidth allocation without a slice");
    const auto interval = agent_interval(user_of(state), *state.intent, configs[*state.chosen_slice], radio);
    if (const auto* bad = std::get_if<optimizer::Infeasible>(&interval)) {
        state.evaluation = Evaluation::reject(bad->reason == "zero-capacity" ? bad->reason : "infeasible-intent");
        return state;
    }
    state.interval = std::get<FeasibleInterval>(interval);
    state.proposed_bw_mhz = propose(state.network.ledger(*state.chosen_slice), *state.interval);
    return state;
}

GlobalState node_qos_eval(GlobalState state, const SliceConfigs& configs, const RadioParams& radio) {
    if (rejected(state)) return record_rejection(std::move(state));
    if (!state.proposed_bw_mhz || !state.interval || !state.chosen_slice)
        throw InvariantError("QoS evaluation without a proposal");

    const auto& user = user_of(state);
    const auto kind = *state.chosen_slice;
    const auto& slice = configs[kind];
    const auto& interval = *state.interval;
    const double p = *state.proposed_bw_mhz;
    const double rate = radio::user_rate(radio.alpha, p, user.snr_db);
    const double reported = std::min(rate, slice.rate_max_mbps);

    const bool qos_ok = p >= interval.lower_mhz && p <= interval.upper_mhz && reported >= slice.rate_min_mbps &&
                        reported >= state.intent->required_rate_mbps * (1 - 1e-12) &&
                        state.intent->required_latency_ms <= slice.latency_max_ms;
    if (!qos_ok) {
        state.evaluation = Evaluation::reject("qos");
        return record_rejection(std::move(state));
    }

    auto& ledger = state.network.ledger(kind);
    if (fits_without_adjusting(ledger, p)) {
        ledger.admit({user.id, kind, p, rate, interval.lower_mhz, interval.upper_mhz, interval.coefficient});
        state.evaluation = Evaluation::pass();
        return state;
    }
    if (ledger.lower_sum_mhz() + interval.lower_mhz <= slice.budget_mhz) {
        state.evaluation = Evaluation::need_adjust();
    } else if (handover_possible(state, configs, radio)) {
        state.evaluation = Evaluation::need_handover();
    } else {
        state.evaluation = Evaluation::reject("capacity");
        return record_rejection(std::move(state));
    }
    return state;
}

GlobalState node_bw_adjust(GlobalState state, const SliceConfigs& configs, const RadioParams& radio) {
    if (!state.evaluation) throw InvariantError("adjustment without an evaluation");
    const auto& user = user_of(state);

    if (state.evaluation->is(Kind::NeedHandover)) {
        const auto target = other(*state.chosen_slice);
        const auto interval = agent_interval(user, *state.intent, configs[target], radio);
        if (!std::holds_alternative<FeasibleInterval>(interval)) {
            state.evaluation = Evaluation::reject("capacity");
            return state;
        }
        state.handover_from = state.chosen_slice;
        state.chosen_slice = target;
        state.interval = std::get<FeasibleInterval>(interval);
        state.proposed_bw_mhz = propose(state.network.ledger(target), *state.interval);
        state.evaluation = Evaluation::pass();
        return state;
    }
    if (!state.evaluation->is(Kind::NeedAdjust)) throw InvariantError("adjustment without a request to adjust");

    const auto kind = *state.chosen_slice;
    auto& ledger = state.network.ledger(kind);
    const auto& incoming = *state.interval;
    const double budget = ledger.config().budget_mhz;

    // Shrink toward lowers, least efficient users first, until the newcomer's lower fits.
    std::vector<Allocation> shrunk(ledger.allocations().begin(), ledger.allocations().end());
    std::vector<std::size_t> order(shrunk.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (shrunk[a].coefficient != shrunk[b].coefficient) return shrunk[a].coefficient < shrunk[b].coefficient;
        return shrunk[a].user_id < shrunk[b].user_id;
    });
    auto used = [&] {
        double sum = 0.0;
        for (const auto& a : shrunk) sum += a.bandwidth_mhz;
        return sum;
    };
    for (std::size_t i : order) {
        if (used() + incoming.lower_mhz <= budget) break;
        shrunk[i].bandwidth_mhz = shrunk[i].lower_mhz;
    }
    if (used() + incoming.lower_mhz > budget) {
        state.evaluation = Evaluation::reject("capacity");
        return state;
    }

    // Re-fill the slice with the newcomer included; it is committed by qos_eval.
    std::vector<FeasibleInterval> intervals;
    for (const auto& a : shrunk) intervals.push_back(a.interval());
    intervals.push_back(incoming);
    const auto fill = optimizer::greedy_fill(intervals, budget);
    if (!fill) {
        state.evaluation = Evaluation::reject("capacity");
        return state;
    }
    std::vector<Allocation> refilled;
    for (std::size_t i = 0; i + 1 < intervals.size(); ++i) {
        auto a = shrunk[i];
        a.bandwidth_mhz = (*fill)[i];
        a.rate_mbps = a.coefficient * a.bandwidth_mhz;
        refilled.push_back(a);
    }
    ledger.replace(std::move(refilled));
    state.proposed_bw_mhz = fill->back();
    state.evaluation = Evaluation::pass();
    return state;
}

std::string route_after_qos(const GlobalState& state) {
    if (!state.evaluation) throw InvariantError("qos_eval left no evaluation");
    switch (state.evaluation->kind) {
        case Kind::Pass:
        case Kind::Reject:
            return graphflow::kEnd;
        case Kind::NeedAdjust:
        case Kind::NeedHandover:
            return nodes::kBwAdjust;
    }
    return graphflow::kEnd;
}

std::optional<SliceKind> recommended_slice(const GlobalState& state) {
    if (state.handover_from) return state.handover_from;
    return state.chosen_slice;
}

graphflow::CompiledGraph build_agent_graph(const AgentContext& ctx) {
    validate(ctx.templates);
    const AgentContext* c = &ctx;
    graphflow::WorkflowGraph graph;
    graph.add_node(nodes::kIntent, [c](GlobalState s) { return node_intent(std::move(s), *c); })
        .add_node(nodes::kSliceAlloc, [c](GlobalState s) { return node_slice_alloc(std::move(s), c->configs); })
        .add_node(nodes::kBwAlloc, [c](GlobalState s) { return node_bw_alloc(std::move(s), c->configs, c->radio); })
        .add_node(nodes::kQosEval, [c](GlobalState s) { return node_qos_eval(std::move(s), c->configs, c->radio); })
        .add_node(nodes::kBwAdjust, [c](GlobalState s) { return node_bw_adjust(std::move(s), c->configs, c->radio); })
        .set_entry(nodes::kIntent)
        .add_edge(nodes::kIntent, nodes::kSliceAlloc)
        .add_edge(nodes::kSliceAlloc, nodes::kBwAlloc)
        .add_edge(nodes::kBwAlloc, nodes::kQosEval)
        .add_conditional_edges(nodes::kQosEval, route_after_qos, {graphflow::kEnd, nodes::kBwAdjust})
        .add_edge(nodes::kBwAdjust, nodes::kQosEval);
    return graphflow::compile(graph);
}

PromptStepResult prompt_baseline_step(NetworkState network, const UserProfile& user, llm::Backend& backend,
                                      const SliceConfigs& configs, const RadioParams& radio,
                                      const PromptTemplates& templates) {
    if (network.seen(user.id)) throw InvariantError("user " + std::to_string(user.id) + " processed twice");
    const std::vector<llm::ChatMessage> messages{
        {llm::Role::System, templates.system},
        {llm::Role::User, render(templates.allocation, {{"user_id", std::to_string(user.id)},
                                                        {"request", user.request_text},
                                                        {"cqi", number(user.snr_db)},
                                                        {"slice_state", describe_slices(network)}})}};
    const auto reply = backend.complete(messages);

    llm::AllocationReply choice;
    try {
        choice = llm::parse_allocation(reply);
    } catch (const llm::IntentParseError&) {
        network.reject(user.id, "llm-output-invalid");
        return {std::move(network), std::nullopt};
    }

    const auto& slice = configs[choice.slice];
    const double bw = choice.bandwidth_mhz;
    const double c = radio::spectral_coefficient(radio.alpha, user.snr_db);
    const double rate = radio::user_rate(radio.alpha, bw, user.snr_db);
    const auto& truth = user.ground_truth;
    auto& ledger = network.ledger(choice.slice);

    if (bw < slice.bw_min_mhz || bw > slice.bw_max_mhz) {
        network.reject(user.id, "bound-violation");
    } else if (rate < slice.rate_min_mbps || rate > slice.rate_max_mbps ||
               rate < truth.required_rate_mbps * (1 - 1e-12) ||
               truth.required_latency_ms > slice.latency_max_ms) {
        network.reject(user.id, "qos-violation");
    } else if (!fits_without_adjusting(ledger, bw)) {
        network.reject(user.id, "capacity");
    } else {
        ledger.admit({user.id, choice.slice, bw, rate, bw, bw, c});
    }
    return {std::move(network), choice.slice};
}

}  // namespace slicegraph::agent
