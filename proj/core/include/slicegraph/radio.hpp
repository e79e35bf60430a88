// Copyright 2026 The SliceGraph Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <span>

#include "slicegraph/domain.hpp"
#include "slicegraph/error.hpp"

namespace slicegraph::radio {

// Coefficients at or below this are treated as a dead channel.
inline constexpr double kZeroCapacity = 1e-30;

// Rate per MHz on a channel: alpha * log10(1 + 10^(snr_db/10)), in Mbps/MHz.
double spectral_coefficient(double alpha, double snr_db);

// alpha * bw * log10(1 + 10^(snr_db/10)) in Mbps. Exact, no clamping.
double user_rate(double alpha, double bw_mhz, double snr_db);

// Smallest bandwidth reaching rate_mbps. Throws ZeroCapacityError on a dead channel.
double bw_for_rate(double alpha, double rate_mbps, double snr_db);

// Inverse of spectral_coefficient: the SNR (dB) whose coefficient is the given efficiency.
double snr_for_coefficient(double alpha, double coefficient);

// Log-distance link budget: tx - (ref_loss + 10 n log10(d)) - noise. Requires d >= 1 m.
double snr_from_geometry(const RadioParams& radio, double distance_m);

class ZeroCapacityError : public Error {
  public:
    ZeroCapacityError() : Error("zero-capacity channel") {}
};

// CQI index 1..15 -> spectral efficiency in Mbps/MHz, strictly increasing.
class CqiTable {
  public:
    static constexpr int kMinIndex = 1;
    static constexpr int kMaxIndex = 15;

    // Throws ValidationError unless efficiencies are positive and strictly increasing.
    explicit CqiTable(const std::array<double, 15>& efficiencies);

    // 15 geometrically spaced efficiencies from 1.0 to 15.133 Mbps/MHz.
    static CqiTable geometric_default();

    // Throws ValidationError for an index outside 1..15.
    [[nodiscard]] double efficiency(int index) const;
    [[nodiscard]] std::span<const double> efficiencies() const noexcept { return efficiencies_; }

  private:
    std::array<double, 15> efficiencies_;
};

double cqi_index_to_snr(int index, const CqiTable& table, double alpha);

// JSON object {"<user id>": snr_db, ...} overriding geometry-derived SNRs.
std::map<UserId, double> load_snr_overrides(const std::filesystem::path& path);
void apply_snr_overrides(std::span<UserProfile> users, const std::map<UserId, double>& overrides);

}  // namespace slicegraph::radio
