// Copyright 2026 The SliceGraph Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <fstream>
#include <sstream>

#include "slicegraph/agent.hpp"

namespace slicegraph::agent {

namespace {

constexpr const char* kSystem = R"(You manage network slices at a 5G base station.
Two slices exist: eMBB serves high-rate traffic such as video and downloads, URLLC serves traffic that needs very low latency and high reliability such as machine control.
Users arrive one at a time. For each user you read the request and the channel quality, choose a slice and a bandwidth that respect the slice budget, the per-user bandwidth range and the rate and latency ranges of the slice.
Compute rates with the Shannon capacity: rate [Mbps] = bandwidth [MHz] * log2(1 + SNR), SNR taken from dB.
Keep the slices well utilized while every admitted user keeps at least its required rate.
Answer with a single JSON object and nothing else.)";

constexpr const char* kIntent = R"(TASK: intent
User ID: {user_id}
Request: "{request}"

Labeled examples of similar requests:
{kb_examples}

Classify the request into a slice and estimate its needs. Reply with JSON:
{"slice": "eMBB" or "URLLC", "required_rate_mbps": <number>, "required_latency_ms": <number>})";

constexpr const char* kAllocation = R"(TASK: allocation
User ID: {user_id}
Channel quality (SNR): {cqi} dB
Request: "{request}"

Current slices:
{slice_state}

Choose a slice and a bandwidth for this user. Reply with JSON:
{"slice": "eMBB" or "URLLC", "bandwidth_mhz": <number>})";

constexpr const char* kAdjustment = R"(TASK: adjustment
The target slice cannot hold the new user at its current allocations.
Current slices:
{slice_state}

Reduce the bandwidth of existing users toward their minimum needs, lowest spectral efficiency first, so the new user fits.)";

void require(const std::string& text, const char* section, std::initializer_list<const char*> placeholders) {
    for (const char* p : placeholders)
        if (text.find(p) == std::string::npos)
            throw ValidationError(std::string("prompt template [") + section + "] lacks placeholder " + p);
}

std::string trim_block(const std::string& text) {
    const auto first = text.find_first_not_of("\n\r");
    if (first == std::string::npos) return {};
    const auto last = text.find_last_not_of("\n\r \t");
    return text.substr(first, last - first + 1);
}

std::string mhz(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", value);
    return buf;
}

}  // namespace

PromptTemplates PromptTemplates::defaults() { return {kSystem, kIntent, kAllocation, kAdjustment}; }

void validate(const PromptTemplates& t) {
    if (t.system.empty()) throw ValidationError("prompt template [system] is empty");
    require(t.intent, "intent", {"{request}", "{kb_examples}"});
    require(t.allocation, "allocation", {"{user_id}", "{request}", "{cqi}", "{slice_state}"});
    require(t.adjustment, "adjustment", {"{slice_state}"});
}

PromptTemplates load_prompt_templates(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open prompt templates " + path.string());
    auto templates = PromptTemplates::defaults();
    std::string* target = nullptr;
    std::map<std::string, std::string> sections;
    std::string line;
    std::string current;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.size() > 2 && line.front() == '[' && line.back() == ']' && line.find(' ') == std::string::npos) {
            current = line.substr(1, line.size() - 2);
            if (current != "system" && current != "intent" && current != "allocation" && current != "adjustment")
                throw ParseError(path.string() + ":" + std::to_string(number) + ": unknown section [" + current + "]",
                                 number);
            sections[current].clear();
            continue;
        }
        if (current.empty()) {
            if (line.find_first_not_of(" \t") != std::string::npos)
                throw ParseError(path.string() + ":" + std::to_string(number) + ": text before the first section",
                                 number);
            continue;
        }
        sections[current] += line + "\n";
    }
    for (auto& [name, text] : sections) {
        target = name == "system"       ? &templates.system
                 : name == "intent"     ? &templates.intent
                 : name == "allocation" ? &templates.allocation
                                        : &templates.adjustment;
        *target = trim_block(text);
    }
    validate(templates);
    return templates;
}

std::string render(std::string_view tmpl, const std::map<std::string, std::string>& values) {
    // Single pass, so substituted text is never scanned for placeholders again.
    std::string out;
    out.reserve(tmpl.size());
    std::size_t pos = 0;
    while (pos < tmpl.size()) {
        const auto open = tmpl.find('{', pos);
        if (open == std::string_view::npos) break;
        const auto close = tmpl.find('}', open);
        if (close == std::string_view::npos) break;
        out.append(tmpl.substr(pos, open - pos));
        if (auto it = values.find(std::string(tmpl.substr(open + 1, close - open - 1))); it != values.end()) {
            out += it->second;
            pos = close + 1;
        } else {
            out += '{';
            pos = open + 1;
        }
    }
    out.append(tmpl.substr(pos));
    return out;
}

std::string describe_slices(const NetworkState& network) {
    std::ostringstream out;
    for (SliceKind kind : kAllSlices) {
        const auto& ledger = network.ledger(kind);
        const auto& c = ledger.config();
        out << to_string(kind) << ": budget " << mhz(c.budget_mhz) << " MHz, allocated " << mhz(ledger.allocated_mhz())
            << " MHz, free " << mhz(ledger.free_mhz()) << " MHz; per-user bandwidth [" << mhz(c.bw_min_mhz) << ", "
            << mhz(c.bw_max_mhz) << "] MHz, rate [" << mhz(c.rate_min_mbps) << ", " << mhz(c.rate_max_mbps)
            << "] Mbps, latency <= " << mhz(c.latency_max_ms) << " ms; users:";
        if (ledger.allocations().empty()) out << " none";
        for (const auto& a : ledger.allocations())
            out << " " << a.user_id << "=" << mhz(a.bandwidth_mhz) << "MHz/" << mhz(a.rate_mbps) << "Mbps";
        out << "\n";
    }
    return out.str();
}

}  // namespace slicegraph::agent
