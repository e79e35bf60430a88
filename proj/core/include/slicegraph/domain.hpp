// Copyright 2026 The SliceGraph Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace slicegraph {

using UserId = std::uint64_t;

enum class SliceKind { Embb, Urllc };

inline constexpr SliceKind kAllSlices[] = {SliceKind::Embb, SliceKind::Urllc};

std::string_view to_string(SliceKind kind) noexcept;
// Accepts "eMBB" / "URLLC" exactly; throws ValidationError otherwise.
SliceKind parse_slice_kind(std::string_view text);
constexpr SliceKind other(SliceKind kind) noexcept {
    return kind == SliceKind::Embb ? SliceKind::Urllc : SliceKind::Embb;
}

struct SliceConfig {
    SliceKind kind = SliceKind::Embb;
    double budget_mhz = 0.0;
    double bw_min_mhz = 0.0;
    double bw_max_mhz = 0.0;
    double rate_min_mbps = 0.0;
    double rate_max_mbps = 0.0;
    double latency_max_ms = 0.0;

    bool operator==(const SliceConfig&) const = default;
};

// One config per slice kind. Built by validate_scenario or case_study_slices().
struct SliceConfigs {
    SliceConfig embb;
    SliceConfig urllc;

    [[nodiscard]] const SliceConfig& operator[](SliceKind kind) const noexcept {
        return kind == SliceKind::Embb ? embb : urllc;
    }
    [[nodiscard]] double total_budget_mhz() const noexcept { return embb.budget_mhz + urllc.budget_mhz; }

    bool operator==(const SliceConfigs&) const = default;
};

// alpha = 1/log10(2) turns alpha*B*log10(1+snr) into Shannon capacity B*log2(1+snr).
inline const double kShannonAlpha = 1.0 / std::log10(2.0);

struct RadioParams {
    double alpha = kShannonAlpha;
    double tx_power_dbm = 30.0;
    double noise_dbm = -106.0;
    double pathloss_exponent = 3.0;
    double ref_loss_db = 40.0;

    bool operator==(const RadioParams&) const = default;
};

struct IntentLabel {
    SliceKind slice = SliceKind::Embb;
    double required_rate_mbps = 0.0;
    double required_latency_ms = 0.0;

    bool operator==(const IntentLabel&) const = default;
};

struct UserProfile {
    UserId id = 0;
    double snr_db = 0.0;
    std::string request_text;
    IntentLabel ground_truth;

    bool operator==(const UserProfile&) const = default;
};

// Bandwidth range [lower, upper] that satisfies a user's rate need and the
// slice's per-user bounds, plus the rate per MHz on the user's channel.
struct FeasibleInterval {
    UserId user_id = 0;
    double lower_mhz = 0.0;
    double upper_mhz = 0.0;
    double coefficient = 0.0;

    bool operator==(const FeasibleInterval&) const = default;
};

struct Allocation {
    UserId user_id = 0;
    SliceKind slice = SliceKind::Embb;
    double bandwidth_mhz = 0.0;
    double rate_mbps = 0.0;
    // The interval the allocation was granted under; re-fills shrink toward lower_mhz.
    double lower_mhz = 0.0;
    double upper_mhz = 0.0;
    double coefficient = 0.0;

    [[nodiscard]] FeasibleInterval interval() const noexcept {
        return {user_id, lower_mhz, upper_mhz, coefficient};
    }

    bool operator==(const Allocation&) const = default;
};

class SliceLedger {
  public:
    SliceLedger() = default;
    explicit SliceLedger(SliceConfig config) : config_(config) {}

    [[nodiscard]] const SliceConfig& config() const noexcept { return config_; }
    [[nodiscard]] std::span<const Allocation> allocations() const noexcept { return allocations_; }
    [[nodiscard]] bool contains(UserId user) const noexcept;
    [[nodiscard]] const Allocation* find(UserId user) const noexcept;

    // Left-to-right sum in ledger order. Every budget check in the project uses this sum.
    [[nodiscard]] double allocated_mhz() const noexcept;
    [[nodiscard]] double free_mhz() const noexcept { return config_.budget_mhz - allocated_mhz(); }
    [[nodiscard]] double lower_sum_mhz() const noexcept;

    // Throws InvariantError on a duplicate user, wrong slice or budget overflow.
    void admit(const Allocation& allocation);
    // Replaces every allocation; same checks as admit, applied to the whole set.
    void replace(std::vector<Allocation> allocations);

    bool operator==(const SliceLedger&) const = default;

  private:
    SliceConfig config_;
    std::vector<Allocation> allocations_;
};

struct Rejection {
    UserId user_id = 0;
    std::string reason;

    bool operator==(const Rejection&) const = default;
};

struct NetworkState {
    SliceLedger embb;
    SliceLedger urllc;
    std::vector<Rejection> rejected;
    std::uint64_t slot = 0;

    NetworkState() = default;
    explicit NetworkState(const SliceConfigs& configs) : embb(configs.embb), urllc(configs.urllc) {}

    [[nodiscard]] SliceLedger& ledger(SliceKind kind) noexcept { return kind == SliceKind::Embb ? embb : urllc; }
    [[nodiscard]] const SliceLedger& ledger(SliceKind kind) const noexcept {
        return kind == SliceKind::Embb ? embb : urllc;
    }
    [[nodiscard]] bool seen(UserId user) const noexcept;
    [[nodiscard]] std::size_t admitted_count() const noexcept {
        return embb.allocations().size() + urllc.allocations().size();
    }
    [[nodiscard]] std::size_t processed_count() const noexcept { return admitted_count() + rejected.size(); }

    // Throws InvariantError if the user was already processed.
    void reject(UserId user, std::string reason);

    bool operator==(const NetworkState&) const = default;
};

// Users are drawn on a disc around the base station when a scenario carries no explicit user list.
struct UserGeneratorConfig {
    std::size_t n = 30;
    double min_radius_m = 1.0;
    double max_radius_m = 1000.0;

    bool operator==(const UserGeneratorConfig&) const = default;
};

struct Scenario {
    RadioParams radio;
    SliceConfigs slices;
    std::vector<UserProfile> users;
    std::uint64_t seed = 0;
    std::optional<UserGeneratorConfig> generate;

    bool operator==(const Scenario&) const = default;
};

// Budgets and ranges of the two-slice case study: URLLC 30 MHz, [1,5] MHz,
// [1,100] Mbps, 10 ms; eMBB 90 MHz, [6,20] MHz, [100,400] Mbps, 100 ms.
SliceConfigs case_study_slices();

// Checks every type invariant; throws ValidationError naming the first violation.
void validate_slice(const SliceConfig& slice);
void validate_radio(const RadioParams& radio);
void validate_user(const UserProfile& user);
Scenario validate_scenario(std::span<const SliceConfig> slices, const RadioParams& radio,
                           std::vector<UserProfile> users);
void validate_scenario(const Scenario& scenario);

// JSON conversions (field names in snake_case, slice kinds as "eMBB"/"URLLC").
void to_json(nlohmann::json& j, SliceKind kind);
void from_json(const nlohmann::json& j, SliceKind& kind);
void to_json(nlohmann::json& j, const SliceConfig& slice);
void from_json(const nlohmann::json& j, SliceConfig& slice);
void to_json(nlohmann::json& j, const RadioParams& radio);
void from_json(const nlohmann::json& j, RadioParams& radio);
void to_json(nlohmann::json& j, const IntentLabel& intent);
void from_json(const nlohmann::json& j, IntentLabel& intent);
void to_json(nlohmann::json& j, const UserProfile& user);
void from_json(const nlohmann::json& j, UserProfile& user);
void to_json(nlohmann::json& j, const FeasibleInterval& interval);
void from_json(const nlohmann::json& j, FeasibleInterval& interval);
void to_json(nlohmann::json& j, const Allocation& allocation);
void from_json(const nlohmann::json& j, Allocation& allocation);
void to_json(nlohmann::json& j, const SliceLedger& ledger);
void from_json(const nlohmann::json& j, SliceLedger& ledger);
void to_json(nlohmann::json& j, const Rejection& rejection);
void from_json(const nlohmann::json& j, Rejection& rejection);
void to_json(nlohmann::json& j, const NetworkState& state);
void from_json(const nlohmann::json& j, NetworkState& state);
void to_json(nlohmann::json& j, const UserGeneratorConfig& generator);
void from_json(const nlohmann::json& j, UserGeneratorConfig& generator);
void to_json(nlohmann::json& j, const Scenario& scenario);
void from_json(const nlohmann::json& j, Scenario& scenario);

// File I/O. Parse failures throw ParseError (with a line number when known);
// invariant failures throw ValidationError.
nlohmann::json read_json_file(const std::filesystem::path& path);
Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);
std::vector<UserProfile> load_users_jsonl(const std::filesystem::path& path);
void save_users_jsonl(std::span<const UserProfile> users, const std::filesystem::path& path);

}  // namespace slicegraph
