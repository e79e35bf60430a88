// Copyright 2026 The SliceGraph Authors
// SPDX-License-Identifier: Apache-2.0

#include "slicegraph/radio.hpp"

#include <cmath>
#include <string>

namespace slicegraph::radio {

double spectral_coefficient(double alpha, double snr_db) {
    // log1p keeps precision when 10^(snr/10) underflows toward zero.
    return alpha * std::log1p(std::pow(10.0, snr_db / 10.0)) / std::log(10.0);
}

double user_rate(double alpha, double bw_mhz, double snr_db) { return spectral_coefficient(alpha, snr_db) * bw_mhz; }

double bw_for_rate(double alpha, double rate_mbps, double snr_db) {
    const double c = spectral_coefficient(alpha, snr_db);
    if (!(c > kZeroCapacity)) throw ZeroCapacityError();
    return rate_mbps / c;
}

double snr_for_coefficient(double alpha, double coefficient) {
    // 10^(c/alpha) - 1 via expm1 for small efficiencies.
    return 10.0 * std::log10(std::expm1(coefficient / alpha * std::log(10.0)));
}

double snr_from_geometry(const RadioParams& radio, double distance_m) {
    if (!(distance_m >= 1.0)) throw ValidationError("distance below 1 m: " + std::to_string(distance_m));
    const double path_loss = radio.ref_loss_db + 10.0 * radio.pathloss_exponent * std::log10(distance_m);
    return radio.tx_power_dbm - path_loss - radio.noise_dbm;
}

CqiTable::CqiTable(const std::array<double, 15>& efficiencies) : efficiencies_(efficiencies) {
    if (!(efficiencies_[0] > 0.0)) throw ValidationError("CQI table: non-positive efficiency");
    for (std::size_t i = 1; i < efficiencies_.size(); ++i)
        if (!(efficiencies_[i] > efficiencies_[i - 1]))
            throw ValidationError("CQI table: efficiencies must be strictly increasing");
}

CqiTable CqiTable::geometric_default() {
    constexpr double first = 1.0;
    constexpr double last = 15.133;
    std::array<double, 15> e{};
    const double ratio = std::pow(last / first, 1.0 / 14.0);
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = first * std::pow(ratio, static_cast<double>(i));
    e.back() = last;
    return CqiTable(e);
}

double CqiTable::efficiency(int index) const {
    if (index < kMinIndex || index > kMaxIndex)
        throw ValidationError("CQI index out of range: " + std::to_string(index));
    return efficiencies_[static_cast<std::size_t>(index - kMinIndex)];
}

double cqi_index_to_snr(int index, const CqiTable& table, double alpha) {
    return snr_for_coefficient(alpha, table.efficiency(index));
}

std::map<UserId, double> load_snr_overrides(const std::filesystem::path& path) {
    const auto j = read_json_file(path);
    if (!j.is_object()) throw ParseError(path.string() + ": SNR overrides must be a JSON object");
    std::map<UserId, double> overrides;
    for (const auto& [key, value] : j.items()) {
        std::size_t used = 0;
        UserId id = 0;
        try {
            id = std::stoull(key, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != key.size() || id == 0) throw ParseError(path.string() + ": bad user id \"" + key + "\"");
        if (!value.is_number()) throw ParseError(path.string() + ": snr for user " + key + " is not a number");
        overrides[id] = value.get<double>();
    }
    return overrides;
}

void apply_snr_overrides(std::span<UserProfile> users, const std::map<UserId, double>& overrides) {
    for (auto& u : users)
        if (auto it = overrides.find(u.id); it != overrides.end()) u.snr_db = it->second;
}

}  // namespace slicegraph::radio
