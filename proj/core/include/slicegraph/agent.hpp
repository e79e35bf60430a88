// Copyright 2026 The SliceGraph Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "slicegraph/domain.hpp"
#include "slicegraph/graphflow.hpp"
#include "slicegraph/knowledge.hpp"
#include "slicegraph/llm.hpp"

namespace slicegraph::agent {

// Prompt texts with {request}, {kb_examples}, {slice_state}, {cqi} and {user_id}
// placeholders. Other braces (JSON examples) are left alone by render().
struct PromptTemplates {
    std::string system;
    std::string intent;
    std::string allocation;
    std::string adjustment;

    static PromptTemplates defaults();
};

// Throws ValidationError when a template lacks a placeholder its node fills:
// intent needs {request} and {kb_examples}; allocation needs {user_id}, {request},
// {cqi} and {slice_state}; adjustment needs {slice_state}; system must be non-empty.
void validate(const PromptTemplates& templates);

// Sections introduced by lines "[system]", "[intent]", "[allocation]" and
// "[adjustment]"; missing sections keep their defaults.
PromptTemplates load_prompt_templates(const std::filesystem::path& path);

std::string render(std::string_view tmpl, const std::map<std::string, std::string>& values);

// Human-readable ledger summary placed into prompts.
std::string describe_slices(const NetworkState& network);

// Keyword rule (surgery, vehicle, control, robotic, emergency -> URLLC), then a
// score-weighted vote of the retrieved examples, then eMBB. Rate and latency are
// the chosen slice's midpoints.
IntentLabel fallback_intent(std::string_view request, std::span<const knowledge::Hit> hits,
                            const SliceConfigs& configs);

struct AgentContext {
    const knowledge::KnowledgeBase* kb = nullptr;
    llm::Backend* backend = nullptr;
    SliceConfigs configs;
    RadioParams radio;
    PromptTemplates templates = PromptTemplates::defaults();
    std::size_t retrieval_k = knowledge::kDefaultRetrievalK;
};

namespace nodes {
inline constexpr const char* kIntent = "intent";
inline constexpr const char* kSliceAlloc = "slice_alloc";
inline constexpr const char* kBwAlloc = "bw_alloc";
inline constexpr const char* kQosEval = "qos_eval";
inline constexpr const char* kBwAdjust = "bw_adjust";
}  // namespace nodes

// Fills state.intent from the backend (one retry on unparseable output) and
// falls back to fallback_intent. Backend errors propagate.
graphflow::GlobalState node_intent(graphflow::GlobalState state, const AgentContext& ctx);

// Picks the intent's slice if its latency and rate ceiling fit, else the other
// slice if the intent fits that slice's ranges, else Reject("no-fitting-slice").
graphflow::GlobalState node_slice_alloc(graphflow::GlobalState state, const SliceConfigs& configs);

// Grant policy: as much as fits up to the slice maximum, otherwise the lower
// bound (left for adjustment).
graphflow::GlobalState node_bw_alloc(graphflow::GlobalState state, const SliceConfigs& configs,
                                     const RadioParams& radio);

// Checks the proposal; commits it on Pass and records rejections.
graphflow::GlobalState node_qos_eval(graphflow::GlobalState state, const SliceConfigs& configs,
                                     const RadioParams& radio);

// Shrinks existing users (ascending coefficient) and re-fills the slice, or
// moves the user to the other slice once.
graphflow::GlobalState node_bw_adjust(graphflow::GlobalState state, const SliceConfigs& configs,
                                      const RadioParams& radio);

// qos_eval router: Pass and Reject end the run, the rest go to bw_adjust.
std::string route_after_qos(const graphflow::GlobalState& state);

// The five-node slicing workflow. ctx (and what it points to) must outlive the graph.
graphflow::CompiledGraph build_agent_graph(const AgentContext& ctx);

// Slice the workflow recommended for this user (before any handover), if any.
std::optional<SliceKind> recommended_slice(const graphflow::GlobalState& state);

struct PromptStepResult {
    NetworkState network;
    std::optional<SliceKind> recommended;
};

// Single-shot allocation: one backend call, reply applied as-is. Only the slice
// budget, per-user bounds, slice rate bounds and the user's true needs are
// checked afterwards; no existing user is ever adjusted.
PromptStepResult prompt_baseline_step(NetworkState network, const UserProfile& user, llm::Backend& backend,
                                      const SliceConfigs& configs, const RadioParams& radio,
                                      const PromptTemplates& templates = PromptTemplates::defaults());

}  // namespace slicegraph::agent
