// Copyright 2026 The SliceGraph Authors
// SPDX-License-Identifier: Apache-2.0

#include "slicegraph/graphflow.hpp"

#include <deque>
#include <istream>
#include <set>

#include "slicegraph/digest.hpp"

namespace slicegraph::graphflow {

namespace {

template <typename T>
nlohmann::json optional_json(const std::optional<T>& value) {
    return value ? nlohmann::json(*value) : nlohmann::json(nullptr);
}

nlohmann::json delta_between(const nlohmann::json& before, const nlohmann::json& after) {
    auto delta = nlohmann::json::object();
    for (const auto& [key, value] : after.items())
        if (!before.contains(key) || before.at(key) != value) delta[key] = value;
    return delta;
}

}  // namespace

std::string_view to_string(Evaluation::Kind kind) noexcept {
    switch (kind) {
        case Evaluation::Kind::Pass:
            return "pass";
        case Evaluation::Kind::NeedAdjust:
            return "need_adjust";
        case Evaluation::Kind::NeedHandover:
            return "need_handover";
        case Evaluation::Kind::Reject:
            return "reject";
    }
    return "pass";
}

void to_json(nlohmann::json& j, const Evaluation& e) {
    j = {{"kind", std::string(to_string(e.kind))}};
    if (e.kind == Evaluation::Kind::Reject) j["reason"] = e.reason;
}

void from_json(const nlohmann::json& j, Evaluation& e) {
    const auto kind = j.at("kind").get<std::string>();
    for (auto k : {Evaluation::Kind::Pass, Evaluation::Kind::NeedAdjust, Evaluation::Kind::NeedHandover,
                   Evaluation::Kind::Reject})
        if (to_string(k) == kind) {
            e.kind = k;
            e.reason = j.value("reason", std::string{});
            return;
        }
    throw ParseError("unknown evaluation kind \"" + kind + "\"");
}

void to_json(nlohmann::json& j, const TraceEntry& t) {
    j = {{"slot", t.slot}, {"node", t.node}, {"digest", t.digest}, {"delta", t.delta}};
}

void from_json(const nlohmann::json& j, TraceEntry& t) {
    t.slot = j.at("slot").get<std::uint64_t>();
    t.node = j.at("node").get<std::string>();
    t.digest = j.at("digest").get<std::string>();
    t.delta = j.at("delta");
}

nlohmann::json state_json(const GlobalState& s) {
    return {{"current_user", optional_json(s.current_user)},
            {"intent", optional_json(s.intent)},
            {"chosen_slice", optional_json(s.chosen_slice)},
            {"handover_from", optional_json(s.handover_from)},
            {"interval", optional_json(s.interval)},
            {"proposed_bw_mhz", optional_json(s.proposed_bw_mhz)},
            {"evaluation", optional_json(s.evaluation)},
            {"network", s.network},
            {"kb_hits", s.kb_hits}};
}

std::string state_digest(const GlobalState& state) { return json_digest(state_json(state)); }

// ---------------------------------------------------------------------------

WorkflowGraph& WorkflowGraph::add_node(std::string name, NodeHandler handler) {
    nodes_.emplace_back(std::move(name), std::move(handler));
    return *this;
}

WorkflowGraph& WorkflowGraph::add_edge(std::string from, std::string to) {
    static_edges_.emplace_back(std::move(from), std::move(to));
    return *this;
}

WorkflowGraph& WorkflowGraph::add_conditional_edges(std::string from, Router router, std::vector<std::string> targets) {
    conditional_edges_.emplace_back(std::move(from), Conditional{std::move(router), std::move(targets)});
    return *this;
}

WorkflowGraph& WorkflowGraph::set_entry(std::string name) {
    entry_ = std::move(name);
    return *this;
}

CompiledGraph compile(const WorkflowGraph& graph) {
    CompiledGraph out;
    for (const auto& [name, handler] : graph.nodes_) {
        if (name.empty() || name == kEnd) throw GraphError("invalid node name \"" + name + "\"");
        if (!handler) throw GraphError("node " + name + " has no handler");
        if (!out.nodes_.emplace(name, CompiledGraph::Node{handler, std::nullopt, std::nullopt}).second)
            throw GraphError("duplicate node " + name);
    }
    if (graph.entry_.empty()) throw GraphError("missing entry");
    if (!out.nodes_.contains(graph.entry_)) throw GraphError("entry " + graph.entry_ + " is not a node");
    out.entry_ = graph.entry_;

    auto check_target = [&](const std::string& from, const std::string& to) {
        if (to != kEnd && !out.nodes_.contains(to))
            throw GraphError("edge " + from + " -> " + to + " targets unknown node " + to);
    };
    auto source = [&](const std::string& from, const std::string& to) -> CompiledGraph::Node& {
        auto it = out.nodes_.find(from);
        if (it == out.nodes_.end()) throw GraphError("edge " + from + " -> " + to + " starts at unknown node " + from);
        return it->second;
    };

    for (const auto& [from, to] : graph.static_edges_) {
        auto& node = source(from, to);
        check_target(from, to);
        if (node.next) throw GraphError("node " + from + " has more than one static edge");
        node.next = to;
    }
    for (const auto& [from, conditional] : graph.conditional_edges_) {
        auto& node = source(from, "<conditional>");
        if (!conditional.router) throw GraphError("node " + from + " has a conditional edge without a router");
        if (conditional.targets.empty()) throw GraphError("node " + from + " has a conditional edge without targets");
        for (const auto& to : conditional.targets) check_target(from, to);
        if (node.conditional) throw GraphError("node " + from + " has more than one conditional edge");
        node.conditional = conditional;
    }
    for (const auto& [name, node] : out.nodes_) {
        if (node.next && node.conditional) throw GraphError("node " + name + " has both a static and a conditional edge");
        if (!node.next && !node.conditional) throw GraphError("node " + name + " has no outgoing edge");
    }

    std::set<std::string> reached{out.entry_};
    std::deque<std::string> queue{out.entry_};
    while (!queue.empty()) {
        const auto current = queue.front();
        queue.pop_front();
        for (const auto& next : out.successors(current))
            if (next != kEnd && reached.insert(next).second) queue.push_back(next);
    }
    for (const auto& [name, node] : out.nodes_)
        if (!reached.contains(name)) throw GraphError("node " + name + " is unreachable from entry " + out.entry_);
    return out;
}

std::vector<std::string> CompiledGraph::node_names() const {
    std::vector<std::string> names;
    for (const auto& [name, node] : nodes_) names.push_back(name);
    return names;
}

std::vector<std::string> CompiledGraph::successors(const std::string& name) const {
    const auto& node = nodes_.at(name);
    if (node.next) return {*node.next};
    return node.conditional->targets;
}

GlobalState CompiledGraph::run(GlobalState state, std::size_t step_limit) const {
    if (step_limit == 0) throw GraphError("step_limit must be at least 1");
    std::string current = entry_;
    std::size_t steps = 0;
    auto before = state_json(state);
    while (current != kEnd) {
        if (steps == step_limit)
            throw CycleError("possible cycle: step limit " + std::to_string(step_limit) + " reached at node " + current,
                             state.trace);
        const auto& node = nodes_.at(current);
        auto trace = std::move(state.trace);
        try {
            state = node.handler(std::move(state));
        } catch (const std::exception& e) {
            throw NodeError(current, e.what(), std::move(trace), std::current_exception());
        }
        ++steps;

        auto after = state_json(state);
        state.trace = std::move(trace);
        state.trace.push_back({state.network.slot, current, json_digest(after), delta_between(before, after)});
        before = std::move(after);

        if (node.next) {
            current = *node.next;
            continue;
        }
        std::string next;
        try {
            next = node.conditional->router(state);
        } catch (const std::exception& e) {
            throw NodeError(current, std::string("router: ") + e.what(), state.trace, std::current_exception());
        }
        const auto& targets = node.conditional->targets;
        if (std::find(targets.begin(), targets.end(), next) == targets.end())
            throw NodeError(current, "router returned undeclared target \"" + next + "\"", state.trace, nullptr);
        current = std::move(next);
    }
    return state;
}

void write_trace_jsonl(std::span<const TraceEntry> trace, std::ostream& out) {
    for (const auto& entry : trace) out << nlohmann::json(entry).dump() << '\n';
}

std::vector<TraceEntry> read_trace_jsonl(std::istream& in) {
    std::vector<TraceEntry> trace;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.empty()) continue;
        try {
            trace.push_back(nlohmann::json::parse(line).get<TraceEntry>());
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("trace line " + std::to_string(number) + ": " + e.what(), number);
        }
    }
    return trace;
}

}  // namespace slicegraph::graphflow
