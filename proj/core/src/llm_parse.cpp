// Copyright 2026 The SliceGraph Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cctype>
#include <regex>

#include "slicegraph/llm.hpp"

namespace slicegraph::llm {

namespace {

using Kind = IntentParseError::Kind;

// Text between the first ``` fence (minus its info string) and the next fence.
std::string_view fenced_region(std::string_view text) {
    const auto open = text.find("```");
    if (open == std::string_view::npos) return text;
    auto body = text.find('\n', open + 3);
    if (body == std::string_view::npos) return text;
    ++body;
    const auto close = text.find("```", body);
    return text.substr(body, close == std::string_view::npos ? std::string_view::npos : close - body);
}

std::optional<std::string> first_balanced_object(std::string_view text) {
    const auto start = text.find('{');
    if (start == std::string_view::npos) return std::nullopt;
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = start; i < text.size(); ++i) {
        const char ch = text[i];
        if (in_string) {
            if (escaped)
                escaped = false;
            else if (ch == '\\')
                escaped = true;
            else if (ch == '"')
                in_string = false;
            continue;
        }
        if (ch == '"')
            in_string = true;
        else if (ch == '{')
            ++depth;
        else if (ch == '}' && --depth == 0)
            return std::string(text.substr(start, i - start + 1));
    }
    return std::nullopt;
}

std::string strip_trailing_commas(const std::string& text) {
    static const std::regex trailing(R"(,\s*([}\]]))");
    return std::regex_replace(text, trailing, "$1");
}

std::optional<SliceKind> slice_from(const std::string& name, bool lenient) {
    if (name == "eMBB") return SliceKind::Embb;
    if (name == "URLLC") return SliceKind::Urllc;
    if (!lenient) return std::nullopt;
    std::string lower;
    std::transform(name.begin(), name.end(), std::back_inserter(lower),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "embb") return SliceKind::Embb;
    if (lower == "urllc") return SliceKind::Urllc;
    return std::nullopt;
}

nlohmann::json extract_object(std::string_view text) {
    const auto object = first_balanced_object(fenced_region(text));
    if (!object) {
        // A fence without an object inside may still precede one outside it.
        if (auto anywhere = first_balanced_object(text)) return extract_object(*anywhere);
        throw IntentParseError(Kind::NoJson, {}, "no JSON object in model output");
    }
    auto parsed = nlohmann::json::parse(*object, nullptr, false);
    if (!parsed.is_discarded() && parsed.is_object()) return parsed;
    parsed = nlohmann::json::parse(strip_trailing_commas(*object), nullptr, false);
    if (!parsed.is_discarded() && parsed.is_object()) return parsed;
    throw IntentParseError(Kind::NoJson, {}, "model output holds no parseable JSON object");
}

double positive_number(const nlohmann::json& j, const char* field) {
    if (!j.contains(field) || !j.at(field).is_number())
        throw IntentParseError(Kind::MissingField, field, std::string("missing numeric field \"") + field + "\"");
    const double value = j.at(field).get<double>();
    if (!(value > 0.0))
        throw IntentParseError(Kind::BadValue, field, std::string("field \"") + field + "\" must be positive");
    return value;
}

SliceKind slice_field(const nlohmann::json& j) {
    if (!j.contains("slice") || !j.at("slice").is_string())
        throw IntentParseError(Kind::MissingField, "slice", "missing string field \"slice\"");
    const auto name = j.at("slice").get<std::string>();
    // Case normalization is part of the single repair pass.
    if (auto kind = slice_from(name, true)) return *kind;
    throw IntentParseError(Kind::BadSliceName, "slice", "unknown slice name \"" + name + "\"");
}

}  // namespace

IntentLabel parse_intent(std::string_view text) {
    const auto j = extract_object(text);
    IntentLabel intent;
    intent.slice = slice_field(j);
    intent.required_rate_mbps = positive_number(j, "required_rate_mbps");
    intent.required_latency_ms = positive_number(j, "required_latency_ms");
    return intent;
}

AllocationReply parse_allocation(std::string_view text) {
    const auto j = extract_object(text);
    AllocationReply reply;
    reply.slice = slice_field(j);
    reply.bandwidth_mhz = positive_number(j, "bandwidth_mhz");
    return reply;
}

std::string serialize_intent(const IntentLabel& intent) { return nlohmann::json(intent).dump(); }

}  // namespace slicegraph::llm
