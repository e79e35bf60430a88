// Copyright 2026 The SliceGraph Authors
// SPDX-License-Identifier: Apache-2.0

#include "slicegraph/domain.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "slicegraph/error.hpp"

namespace slicegraph {

namespace {

std::string slice_prefix(const SliceConfig& slice) { return std::string(to_string(slice.kind)) + ": "; }

std::size_t line_of_offset(const std::string& text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

template <typename T>
T required(const nlohmann::json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field \"") + key + "\"");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad field \"") + key + "\": " + e.what());
    }
}

}  // namespace

std::string_view to_string(SliceKind kind) noexcept { return kind == SliceKind::Embb ? "eMBB" : "URLLC"; }

SliceKind parse_slice_kind(std::string_view text) {
    if (text == "eMBB") return SliceKind::Embb;
    if (text == "URLLC") return SliceKind::Urllc;
    throw ValidationError("unknown slice kind \"" + std::string(text) + "\"");
}

// ---------------------------------------------------------------------------
// SliceLedger / NetworkState

bool SliceLedger::contains(UserId user) const noexcept { return find(user) != nullptr; }

const Allocation* SliceLedger::find(UserId user) const noexcept {
    auto it = std::find_if(allocations_.begin(), allocations_.end(),
                           [user](const Allocation& a) { return a.user_id == user; });
    return it == allocations_.end() ? nullptr : &*it;
}

double SliceLedger::allocated_mhz() const noexcept {
    double sum = 0.0;
    for (const auto& a : allocations_) sum += a.bandwidth_mhz;
    return sum;
}

double SliceLedger::lower_sum_mhz() const noexcept {
    double sum = 0.0;
    for (const auto& a : allocations_) sum += a.lower_mhz;
    return sum;
}

void SliceLedger::admit(const Allocation& allocation) {
    auto next = allocations_;
    next.push_back(allocation);
    replace(std::move(next));
}

void SliceLedger::replace(std::vector<Allocation> allocations) {
    std::set<UserId> ids;
    double sum = 0.0;
    for (const auto& a : allocations) {
        if (a.slice != config_.kind)
            throw InvariantError("allocation for user " + std::to_string(a.user_id) + " filed in the wrong slice");
        if (!ids.insert(a.user_id).second)
            throw InvariantError("user " + std::to_string(a.user_id) + " allocated twice in " +
                                 std::string(to_string(config_.kind)));
        if (!(a.bandwidth_mhz >= 0.0))
            throw InvariantError("negative bandwidth for user " + std::to_string(a.user_id));
        sum += a.bandwidth_mhz;
    }
    if (sum > config_.budget_mhz)
        throw InvariantError(std::string(to_string(config_.kind)) + " budget exceeded");
    allocations_ = std::move(allocations);
}

bool NetworkState::seen(UserId user) const noexcept {
    return embb.contains(user) || urllc.contains(user) ||
           std::any_of(rejected.begin(), rejected.end(), [user](const Rejection& r) { return r.user_id == user; });
}

void NetworkState::reject(UserId user, std::string reason) {
    if (seen(user)) throw InvariantError("user " + std::to_string(user) + " processed twice");
    rejected.push_back({user, std::move(reason)});
}

// ---------------------------------------------------------------------------
// Validation

SliceConfigs case_study_slices() {
    SliceConfigs configs;
    configs.urllc = {SliceKind::Urllc, 30.0, 1.0, 5.0, 1.0, 100.0, 10.0};
    configs.embb = {SliceKind::Embb, 90.0, 6.0, 20.0, 100.0, 400.0, 100.0};
    return configs;
}

void validate_slice(const SliceConfig& s) {
    if (!(s.budget_mhz > 0.0)) throw ValidationError(slice_prefix(s) + "non-positive budget");
    if (!(s.bw_min_mhz > 0.0)) throw ValidationError(slice_prefix(s) + "non-positive bandwidth minimum");
    if (s.bw_min_mhz > s.bw_max_mhz) throw ValidationError(slice_prefix(s) + "inverted bandwidth bounds");
    if (s.bw_max_mhz > s.budget_mhz) throw ValidationError(slice_prefix(s) + "bandwidth maximum exceeds budget");
    if (!(s.rate_min_mbps > 0.0)) throw ValidationError(slice_prefix(s) + "non-positive rate minimum");
    if (s.rate_min_mbps > s.rate_max_mbps) throw ValidationError(slice_prefix(s) + "inverted rate bounds");
    if (!(s.latency_max_ms > 0.0)) throw ValidationError(slice_prefix(s) + "non-positive latency bound");
}

void validate_radio(const RadioParams& radio) {
    if (!(radio.alpha > 0.0)) throw ValidationError("radio: non-positive alpha");
    if (!(radio.pathloss_exponent >= 1.0)) throw ValidationError("radio: pathloss exponent below 1");
}

void validate_user(const UserProfile& user) {
    const auto id = std::to_string(user.id);
    if (user.id == 0) throw ValidationError("user id must be positive");
    if (user.request_text.empty()) throw ValidationError("empty request text for user " + id);
    if (!std::isfinite(user.snr_db)) throw ValidationError("non-finite snr for user " + id);
    if (!(user.ground_truth.required_rate_mbps > 0.0))
        throw ValidationError("non-positive required rate for user " + id);
    if (!(user.ground_truth.required_latency_ms > 0.0))
        throw ValidationError("non-positive required latency for user " + id);
}

Scenario validate_scenario(std::span<const SliceConfig> slices, const RadioParams& radio,
                           std::vector<UserProfile> users) {
    for (const auto& s : slices) validate_slice(s);
    Scenario scenario;
    bool have_embb = false;
    bool have_urllc = false;
    for (const auto& s : slices) {
        bool& have = s.kind == SliceKind::Embb ? have_embb : have_urllc;
        if (have) throw ValidationError(slice_prefix(s) + "duplicate slice");
        have = true;
        (s.kind == SliceKind::Embb ? scenario.slices.embb : scenario.slices.urllc) = s;
    }
    if (!have_embb) throw ValidationError("missing eMBB slice");
    if (!have_urllc) throw ValidationError("missing URLLC slice");
    validate_radio(radio);
    std::set<UserId> ids;
    for (const auto& u : users) {
        validate_user(u);
        if (!ids.insert(u.id).second) throw ValidationError("duplicate user id " + std::to_string(u.id));
    }
    scenario.radio = radio;
    scenario.users = std::move(users);
    return scenario;
}

void validate_scenario(const Scenario& scenario) {
    const SliceConfig slices[] = {scenario.slices.embb, scenario.slices.urllc};
    if (scenario.slices.embb.kind != SliceKind::Embb || scenario.slices.urllc.kind != SliceKind::Urllc)
        throw ValidationError("slice configs filed under the wrong kind");
    (void)validate_scenario(slices, scenario.radio, scenario.users);
    if (scenario.generate) {
        const auto& g = *scenario.generate;
        if (g.n == 0) throw ValidationError("generate: n must be at least 1");
        if (!(g.min_radius_m >= 1.0)) throw ValidationError("generate: min_radius_m below 1 m");
        if (!(g.max_radius_m >= g.min_radius_m)) throw ValidationError("generate: inverted radius bounds");
    }
}

// ---------------------------------------------------------------------------
// JSON

void to_json(nlohmann::json& j, SliceKind kind) { j = std::string(to_string(kind)); }

void from_json(const nlohmann::json& j, SliceKind& kind) {
    if (!j.is_string()) throw ParseError("slice kind must be a string");
    try {
        kind = parse_slice_kind(j.get<std::string>());
    } catch (const ValidationError& e) {
        throw ParseError(e.what());
    }
}

void to_json(nlohmann::json& j, const SliceConfig& s) {
    j = {{"kind", s.kind},
         {"budget_mhz", s.budget_mhz},
         {"bw_min_mhz", s.bw_min_mhz},
         {"bw_max_mhz", s.bw_max_mhz},
         {"rate_min_mbps", s.rate_min_mbps},
         {"rate_max_mbps", s.rate_max_mbps},
         {"latency_max_ms", s.latency_max_ms}};
}

void from_json(const nlohmann::json& j, SliceConfig& s) {
    s.kind = required<SliceKind>(j, "kind");
    s.budget_mhz = required<double>(j, "budget_mhz");
    s.bw_min_mhz = required<double>(j, "bw_min_mhz");
    s.bw_max_mhz = required<double>(j, "bw_max_mhz");
    s.rate_min_mbps = required<double>(j, "rate_min_mbps");
    s.rate_max_mbps = required<double>(j, "rate_max_mbps");
    s.latency_max_ms = required<double>(j, "latency_max_ms");
}

void to_json(nlohmann::json& j, const RadioParams& r) {
    j = {{"alpha", r.alpha},
         {"tx_power_dbm", r.tx_power_dbm},
         {"noise_dbm", r.noise_dbm},
         {"pathloss_exponent", r.pathloss_exponent},
         {"ref_loss_db", r.ref_loss_db}};
}

// Missing radio fields fall back to the defaults.
void from_json(const nlohmann::json& j, RadioParams& r) {
    if (!j.is_object()) throw ParseError("radio must be an object");
    r = RadioParams{};
    if (j.contains("alpha")) r.alpha = required<double>(j, "alpha");
    if (j.contains("tx_power_dbm")) r.tx_power_dbm = required<double>(j, "tx_power_dbm");
    if (j.contains("noise_dbm")) r.noise_dbm = required<double>(j, "noise_dbm");
    if (j.contains("pathloss_exponent")) r.pathloss_exponent = required<double>(j, "pathloss_exponent");
    if (j.contains("ref_loss_db")) r.ref_loss_db = required<double>(j, "ref_loss_db");
}

void to_json(nlohmann::json& j, const IntentLabel& i) {
    j = {{"slice", i.slice}, {"required_rate_mbps", i.required_rate_mbps}, {"required_latency_ms", i.required_latency_ms}};
}

void from_json(const nlohmann::json& j, IntentLabel& i) {
    i.slice = required<SliceKind>(j, "slice");
    i.required_rate_mbps = required<double>(j, "required_rate_mbps");
    i.required_latency_ms = required<double>(j, "required_latency_ms");
}

void to_json(nlohmann::json& j, const UserProfile& u) {
    j = {{"id", u.id}, {"snr_db", u.snr_db}, {"request_text", u.request_text}, {"ground_truth", u.ground_truth}};
}

void from_json(const nlohmann::json& j, UserProfile& u) {
    u.id = required<UserId>(j, "id");
    u.snr_db = required<double>(j, "snr_db");
    u.request_text = required<std::string>(j, "request_text");
    u.ground_truth = required<IntentLabel>(j, "ground_truth");
}

void to_json(nlohmann::json& j, const FeasibleInterval& f) {
    j = {{"user_id", f.user_id}, {"lower_mhz", f.lower_mhz}, {"upper_mhz", f.upper_mhz}, {"coefficient", f.coefficient}};
}

void from_json(const nlohmann::json& j, FeasibleInterval& f) {
    f.user_id = required<UserId>(j, "user_id");
    f.lower_mhz = required<double>(j, "lower_mhz");
    f.upper_mhz = required<double>(j, "upper_mhz");
    f.coefficient = required<double>(j, "coefficient");
}

void to_json(nlohmann::json& j, const Allocation& a) {
    j = {{"user_id", a.user_id},         {"slice", a.slice},         {"bandwidth_mhz", a.bandwidth_mhz},
         {"rate_mbps", a.rate_mbps},     {"lower_mhz", a.lower_mhz}, {"upper_mhz", a.upper_mhz},
         {"coefficient", a.coefficient}};
}

void from_json(const nlohmann::json& j, Allocation& a) {
    a.user_id = required<UserId>(j, "user_id");
    a.slice = required<SliceKind>(j, "slice");
    a.bandwidth_mhz = required<double>(j, "bandwidth_mhz");
    a.rate_mbps = required<double>(j, "rate_mbps");
    a.lower_mhz = required<double>(j, "lower_mhz");
    a.upper_mhz = required<double>(j, "upper_mhz");
    a.coefficient = required<double>(j, "coefficient");
}

void to_json(nlohmann::json& j, const SliceLedger& l) {
    j = {{"config", l.config()}, {"allocations", nlohmann::json(std::vector<Allocation>(l.allocations().begin(), l.allocations().end()))}};
}

void from_json(const nlohmann::json& j, SliceLedger& l) {
    SliceLedger ledger(required<SliceConfig>(j, "config"));
    try {
        ledger.replace(required<std::vector<Allocation>>(j, "allocations"));
    } catch (const InvariantError& e) {
        throw ValidationError(e.what());
    }
    l = std::move(ledger);
}

void to_json(nlohmann::json& j, const Rejection& r) { j = {{"user_id", r.user_id}, {"reason", r.reason}}; }

void from_json(const nlohmann::json& j, Rejection& r) {
    r.user_id = required<UserId>(j, "user_id");
    r.reason = required<std::string>(j, "reason");
}

void to_json(nlohmann::json& j, const NetworkState& s) {
    j = {{"embb", s.embb}, {"urllc", s.urllc}, {"rejected", s.rejected}, {"slot", s.slot}};
}

void from_json(const nlohmann::json& j, NetworkState& s) {
    s.embb = required<SliceLedger>(j, "embb");
    s.urllc = required<SliceLedger>(j, "urllc");
    s.rejected = required<std::vector<Rejection>>(j, "rejected");
    s.slot = required<std::uint64_t>(j, "slot");
}

void to_json(nlohmann::json& j, const UserGeneratorConfig& g) {
    j = {{"n", g.n}, {"min_radius_m", g.min_radius_m}, {"max_radius_m", g.max_radius_m}};
}

void from_json(const nlohmann::json& j, UserGeneratorConfig& g) {
    if (!j.is_object()) throw ParseError("generate must be an object");
    g = UserGeneratorConfig{};
    g.n = required<std::size_t>(j, "n");
    if (j.contains("min_radius_m")) g.min_radius_m = required<double>(j, "min_radius_m");
    if (j.contains("max_radius_m")) g.max_radius_m = required<double>(j, "max_radius_m");
}

void to_json(nlohmann::json& j, const Scenario& s) {
    j = {{"radio", s.radio},
         {"slices", std::vector<SliceConfig>{s.slices.embb, s.slices.urllc}},
         {"users", s.users},
         {"seed", s.seed}};
    if (s.generate) j["generate"] = *s.generate;
}

void from_json(const nlohmann::json& j, Scenario& s) {
    if (!j.is_object()) throw ParseError("scenario must be a JSON object");
    const auto radio = j.contains("radio") ? j.at("radio").get<RadioParams>() : RadioParams{};
    const auto slices = required<std::vector<SliceConfig>>(j, "slices");
    auto users = j.contains("users") ? required<std::vector<UserProfile>>(j, "users") : std::vector<UserProfile>{};
    s = validate_scenario(slices, radio, std::move(users));
    s.seed = j.contains("seed") ? required<std::uint64_t>(j, "seed") : 0;
    if (j.contains("generate")) s.generate = required<UserGeneratorConfig>(j, "generate");
    validate_scenario(s);
}

// ---------------------------------------------------------------------------
// Files

nlohmann::json read_json_file(const std::filesystem::path& path) {
    const auto text = slurp(path);
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        const auto line = line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1);
        throw ParseError(path.string() + ":" + std::to_string(line) + ": " + e.what(), line);
    }
}

Scenario load_scenario(const std::filesystem::path& path) {
    return read_json_file(path).get<Scenario>();
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << nlohmann::json(scenario).dump(2) << '\n';
}

std::vector<UserProfile> load_users_jsonl(const std::filesystem::path& path) {
    std::istringstream in(slurp(path));
    std::vector<UserProfile> users;
    std::set<UserId> ids;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        UserProfile user;
        try {
            user = nlohmann::json::parse(line).get<UserProfile>();
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(path.string() + ":" + std::to_string(number) + ": " + e.what(), number);
        } catch (const ParseError& e) {
            throw ParseError(path.string() + ":" + std::to_string(number) + ": " + e.what(), number);
        }
        validate_user(user);
        if (!ids.insert(user.id).second) throw ValidationError("duplicate user id " + std::to_string(user.id));
        users.push_back(std::move(user));
    }
    return users;
}

void save_users_jsonl(std::span<const UserProfile> users, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path.string());
    for (const auto& u : users) out << nlohmann::json(u).dump() << '\n';
}

}  // namespace slicegraph
