// Copyright 2026 The SliceGraph Authors
// SPDX-License-Identifier: Apache-2.0

#include "slicegraph/knowledge.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

#include "slicegraph/error.hpp"

namespace slicegraph::knowledge {

void to_json(nlohmann::json& j, const KbEntry& e) { j = {{"id", e.id}, {"text", e.text}, {"label", e.label}}; }

void from_json(const nlohmann::json& j, KbEntry& e) {
    if (!j.is_object() || !j.contains("id") || !j.contains("text") || !j.contains("label"))
        throw ParseError("knowledge-base entry needs id, text and label");
    e.id = j.at("id").get<std::uint64_t>();
    e.text = j.at("text").get<std::string>();
    e.label = j.at("label").get<IntentLabel>();
}

std::vector<std::string> tokenize(std::string_view text) {
    std::string cleaned;
    cleaned.reserve(text.size());
    for (unsigned char ch : text) {
        if (std::ispunct(ch)) continue;
        cleaned.push_back(static_cast<char>(std::tolower(ch)));
    }
    std::istringstream in(cleaned);
    std::vector<std::string> tokens;
    for (std::string token; in >> token;) tokens.push_back(std::move(token));
    return tokens;
}

KnowledgeBase::KnowledgeBase(std::vector<KbEntry> entries) : entries_(std::move(entries)) {
    std::set<std::uint64_t> ids;
    for (const auto& e : entries_) {
        if (e.text.empty()) throw ValidationError("knowledge-base entry " + std::to_string(e.id) + " has empty text");
        if (!ids.insert(e.id).second) throw ValidationError("duplicate knowledge-base id " + std::to_string(e.id));
    }

    std::map<std::string, std::size_t> df;
    std::vector<std::vector<std::string>> tokenized;
    for (const auto& e : entries_) {
        tokenized.push_back(tokenize(e.text));
        for (const auto& t : std::set<std::string>(tokenized.back().begin(), tokenized.back().end())) ++df[t];
    }
    const auto n = static_cast<double>(entries_.size());
    for (const auto& [token, count] : df) idf_[token] = std::log(1.0 + n / (1.0 + static_cast<double>(count)));

    for (const auto& tokens : tokenized) {
        vectors_.push_back(weigh(tokens));
        double norm = 0.0;
        for (const auto& [t, w] : vectors_.back()) norm += w * w;
        norms_.push_back(std::sqrt(norm));
    }
}

KnowledgeBase::Vector KnowledgeBase::weigh(const std::vector<std::string>& tokens) const {
    Vector v;
    for (const auto& t : tokens) v[t] += 1.0;
    const auto n = static_cast<double>(entries_.size());
    for (auto& [t, w] : v) {
        auto it = idf_.find(t);
        // Unseen query tokens: df = 0.
        w *= it != idf_.end() ? it->second : std::log(1.0 + n);
    }
    return v;
}

const KbEntry* KnowledgeBase::find(std::uint64_t id) const noexcept {
    auto it = std::find_if(entries_.begin(), entries_.end(), [id](const KbEntry& e) { return e.id == id; });
    return it == entries_.end() ? nullptr : &*it;
}

std::vector<Hit> KnowledgeBase::retrieve(std::string_view query, std::size_t k,
                                         std::optional<std::uint64_t> exclude_id) const {
    if (k == 0) throw ValidationError("retrieval k must be at least 1");
    const auto q = weigh(tokenize(query));
    double q_norm = 0.0;
    for (const auto& [t, w] : q) q_norm += w * w;
    q_norm = std::sqrt(q_norm);
    if (q_norm == 0.0) return {};

    std::vector<Hit> hits;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (exclude_id && entries_[i].id == *exclude_id) continue;
        if (norms_[i] == 0.0) continue;
        double dot = 0.0;
        for (const auto& [t, w] : q)
            if (auto it = vectors_[i].find(t); it != vectors_[i].end()) dot += w * it->second;
        if (dot > 0.0) hits.push_back({&entries_[i], dot / (q_norm * norms_[i])});
    }
    std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.entry->id < b.entry->id;
    });
    if (hits.size() > k) hits.resize(k);
    return hits;
}

KnowledgeBase load_kb(const std::filesystem::path& path) {
    const auto j = read_json_file(path);
    if (!j.is_array()) throw ParseError(path.string() + ": knowledge base must be a JSON array");
    std::vector<KbEntry> entries;
    for (std::size_t i = 0; i < j.size(); ++i) {
        try {
            entries.push_back(j[i].get<KbEntry>());
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(path.string() + ": entry " + std::to_string(i) + ": " + e.what());
        } catch (const ParseError& e) {
            throw ParseError(path.string() + ": entry " + std::to_string(i) + ": " + e.what());
        }
    }
    return KnowledgeBase(std::move(entries));
}

}  // namespace slicegraph::knowledge
