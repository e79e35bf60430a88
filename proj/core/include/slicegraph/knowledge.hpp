// Copyright 2026 The SliceGraph Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "slicegraph/domain.hpp"

namespace slicegraph::knowledge {

struct KbEntry {
    std::uint64_t id = 0;
    std::string text;
    IntentLabel label;

    bool operator==(const KbEntry&) const = default;
};

void to_json(nlohmann::json& j, const KbEntry& entry);
void from_json(const nlohmann::json& j, KbEntry& entry);

struct Hit {
    const KbEntry* entry = nullptr;
    double score = 0.0;
};

// Lowercase, ASCII punctuation removed, split on whitespace.
std::vector<std::string> tokenize(std::string_view text);

// Labeled request examples with TF-IDF retrieval. Immutable after construction.
class KnowledgeBase {
  public:
    KnowledgeBase() = default;
    // Throws ValidationError on a duplicate id or empty text.
    explicit KnowledgeBase(std::vector<KbEntry> entries);

    [[nodiscard]] std::span<const KbEntry> entries() const noexcept { return entries_; }
    [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
    [[nodiscard]] const KbEntry* find(std::uint64_t id) const noexcept;

    // Top min(k, #positive) entries by cosine of raw-count TF times
    // idf = ln(1 + N / (1 + df)); ties by ascending id. exclude_id drops one entry
    // (leave-one-out evaluation).
    [[nodiscard]] std::vector<Hit> retrieve(std::string_view query, std::size_t k,
                                            std::optional<std::uint64_t> exclude_id = std::nullopt) const;

  private:
    using Vector = std::map<std::string, double>;
    [[nodiscard]] Vector weigh(const std::vector<std::string>& tokens) const;

    std::vector<KbEntry> entries_;
    std::map<std::string, double> idf_;
    std::vector<Vector> vectors_;
    std::vector<double> norms_;
};

inline constexpr std::size_t kDefaultRetrievalK = 3;

// JSON array of KbEntry. Throws ParseError (with line) or ValidationError.
KnowledgeBase load_kb(const std::filesystem::path& path);

}  // namespace slicegraph::knowledge
