// Copyright 2026 The SliceGraph Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "slicegraph/domain.hpp"
#include "slicegraph/error.hpp"

namespace slicegraph::graphflow {

struct Evaluation {
    enum class Kind { Pass, NeedAdjust, NeedHandover, Reject };

    Kind kind = Kind::Pass;
    std::string reason;  // set for Reject

    static Evaluation pass() { return {Kind::Pass, {}}; }
    static Evaluation need_adjust() { return {Kind::NeedAdjust, {}}; }
    static Evaluation need_handover() { return {Kind::NeedHandover, {}}; }
    static Evaluation reject(std::string reason) { return {Kind::Reject, std::move(reason)}; }

    [[nodiscard]] bool is(Kind k) const noexcept { return kind == k; }
    bool operator==(const Evaluation&) const = default;
};

std::string_view to_string(Evaluation::Kind kind) noexcept;

struct TraceEntry {
    std::uint64_t slot = 0;
    std::string node;
    std::string digest;
    nlohmann::json delta;  // changed top-level fields of the state, with their new values

    bool operator==(const TraceEntry&) const = default;
};

// The record every node reads and writes. Nodes talk to each other only through it.
struct GlobalState {
    std::optional<UserProfile> current_user;
    std::optional<IntentLabel> intent;
    std::optional<SliceKind> chosen_slice;
    // Slice recommended before a handover moved the user.
    std::optional<SliceKind> handover_from;
    std::optional<FeasibleInterval> interval;
    std::optional<double> proposed_bw_mhz;
    std::optional<Evaluation> evaluation;
    NetworkState network;
    std::vector<std::uint64_t> kb_hits;
    // Append-only; excluded from digests.
    std::vector<TraceEntry> trace;

    bool operator==(const GlobalState&) const = default;
};

// Canonical JSON of everything except the trace.
nlohmann::json state_json(const GlobalState& state);
// json_digest(state_json(state)).
std::string state_digest(const GlobalState& state);

inline const std::string kEnd = "__end__";

using NodeHandler = std::function<GlobalState(GlobalState)>;
using Router = std::function<std::string(const GlobalState&)>;

class GraphError : public Error {
  public:
    using Error::Error;
};

// Run failure carrying the trace up to the failing point.
class RunError : public Error {
  public:
    RunError(const std::string& what, std::vector<TraceEntry> trace) : Error(what), trace_(std::move(trace)) {}
    [[nodiscard]] const std::vector<TraceEntry>& trace() const noexcept { return trace_; }

  private:
    std::vector<TraceEntry> trace_;
};

class CycleError : public RunError {
  public:
    using RunError::RunError;
};

// A node handler threw. cause() rethrows the original exception.
class NodeError : public RunError {
  public:
    NodeError(std::string node, const std::string& what, std::vector<TraceEntry> trace, std::exception_ptr cause)
        : RunError("node " + node + " failed: " + what, std::move(trace)), node_(std::move(node)), cause_(cause) {}
    [[nodiscard]] const std::string& node() const noexcept { return node_; }
    [[nodiscard]] std::exception_ptr cause() const noexcept { return cause_; }

  private:
    std::string node_;
    std::exception_ptr cause_;
};

class CompiledGraph;
class WorkflowGraph;
CompiledGraph compile(const WorkflowGraph& graph);

// Mutable description of a workflow. Problems are reported by compile(), not here.
class WorkflowGraph {
  public:
    struct Conditional {
        Router router;
        std::vector<std::string> targets;
    };

    WorkflowGraph& add_node(std::string name, NodeHandler handler);
    WorkflowGraph& add_edge(std::string from, std::string to);
    // targets lists every name the router may return (kEnd allowed).
    WorkflowGraph& add_conditional_edges(std::string from, Router router, std::vector<std::string> targets);
    WorkflowGraph& set_entry(std::string name);

  private:
    friend class CompiledGraph;
    friend CompiledGraph compile(const WorkflowGraph& graph);

    std::vector<std::pair<std::string, NodeHandler>> nodes_;
    std::vector<std::pair<std::string, std::string>> static_edges_;
    std::vector<std::pair<std::string, Conditional>> conditional_edges_;
    std::string entry_;
};

inline constexpr std::size_t kDefaultStepLimit = 64;

class CompiledGraph {
  public:
    // Executes from the entry until END. Trace entries are appended to the
    // returned state's trace. Throws CycleError after step_limit node executions
    // and NodeError when a handler or router throws.
    [[nodiscard]] GlobalState run(GlobalState initial, std::size_t step_limit = kDefaultStepLimit) const;

    [[nodiscard]] const std::string& entry() const noexcept { return entry_; }
    [[nodiscard]] std::vector<std::string> node_names() const;
    [[nodiscard]] std::size_t node_count() const noexcept { return nodes_.size(); }
    // Static target or the declared conditional targets of a node.
    [[nodiscard]] std::vector<std::string> successors(const std::string& node) const;

  private:
    friend CompiledGraph compile(const WorkflowGraph& graph);

    struct Node {
        NodeHandler handler;
        std::optional<std::string> next;
        std::optional<WorkflowGraph::Conditional> conditional;
    };
    std::map<std::string, Node> nodes_;
    std::string entry_;
};

// Validates entry, edge targets, one outgoing edge kind per node and
// reachability of every node from the entry. Throws GraphError.
CompiledGraph compile(const WorkflowGraph& graph);

// One JSON object per line: {"slot","node","digest","delta"}.
void write_trace_jsonl(std::span<const TraceEntry> trace, std::ostream& out);
std::vector<TraceEntry> read_trace_jsonl(std::istream& in);

void to_json(nlohmann::json& j, const Evaluation& evaluation);
void from_json(const nlohmann::json& j, Evaluation& evaluation);
void to_json(nlohmann::json& j, const TraceEntry& entry);
void from_json(const nlohmann::json& j, TraceEntry& entry);

}  // namespace slicegraph::graphflow
