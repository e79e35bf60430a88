// Copyright 2026 The SliceGraph Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <fstream>
#include <random>

#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace slicegraph;
using doctest::Approx;

namespace {
constexpr double kA = 3.3219;  // the rounded alpha the worked examples use
}

TEST_SUITE("radio") {
    TEST_CASE("user rate examples") {
        CHECK(radio::user_rate(kA, 0.0, 17.0) == 0.0);
        CHECK(std::abs(radio::user_rate(kA, 20.0, 30.0) - 199.35) <= 0.01);
        // Frozen from an independent 30-digit evaluation.
        CHECK(radio::user_rate(kA, 20.0, 30.0) == Approx(199.342839239571).epsilon(1e-12));
        CHECK(radio::user_rate(kShannonAlpha, 20.0, 30.0) == Approx(199.344525176720).epsilon(1e-12));
    }

    TEST_CASE("spectral coefficient examples") {
        CHECK(radio::spectral_coefficient(kA, 0.0) == Approx(1.0).epsilon(1e-4));
        CHECK(radio::spectral_coefficient(kShannonAlpha, 0.0) == Approx(1.0).epsilon(1e-15));
        CHECK(std::abs(radio::spectral_coefficient(kA, 30.0) - 9.9674) <= 0.001);
        CHECK(radio::spectral_coefficient(kA, 30.0) == Approx(9.96714196197855).epsilon(1e-12));
        CHECK(radio::spectral_coefficient(1.0, -300.0) < 1e-30);
        CHECK(radio::spectral_coefficient(1.0, -400.0) >= 0.0);
    }

    TEST_CASE("bandwidth for rate examples") {
        CHECK(std::abs(radio::bw_for_rate(kA, 199.35, 30.0) - 20.0) <= 0.01);
        CHECK(radio::bw_for_rate(kA, 0.0, 12.0) == 0.0);
        CHECK(radio::bw_for_rate(kShannonAlpha, 0.0, -10.0) == 0.0);
        // User 18 on a 41 dB channel; frozen from the independent evaluation.
        CHECK(radio::spectral_coefficient(kA, 41.0) == Approx(13.6199045918202).epsilon(1e-12));
        CHECK(radio::bw_for_rate(kA, 123.87, 41.0) == Approx(9.09477736535640).epsilon(1e-12));
        CHECK(radio::bw_for_rate(kA, 400.0, 41.0) == Approx(29.3687813525677).epsilon(1e-12));
        CHECK_THROWS_WITH_AS(radio::bw_for_rate(1.0, 10.0, -400.0), "zero-capacity channel", radio::ZeroCapacityError);
    }

    TEST_CASE("log-distance geometry examples") {
        const RadioParams r;
        CHECK(radio::snr_from_geometry(r, 1.0) == Approx(96.0).epsilon(1e-15));
        CHECK(radio::snr_from_geometry(r, 100.0) == Approx(36.0).epsilon(1e-14));
        CHECK(radio::snr_from_geometry(r, 1000.0) == Approx(6.0).epsilon(1e-13));
        CHECK_THROWS_AS(radio::snr_from_geometry(r, 0.5), ValidationError);
        double previous = radio::snr_from_geometry(r, 1.0);
        for (double d = 1.5; d < 2000.0; d *= 1.5) {
            const double now = radio::snr_from_geometry(r, d);
            CHECK(now < previous);
            previous = now;
        }
    }

    TEST_CASE("CQI table") {
        const auto table = radio::CqiTable::geometric_default();
        CHECK(table.efficiency(1) == 1.0);
        CHECK(table.efficiency(15) == Approx(15.133).epsilon(1e-12));
        CHECK(table.efficiency(8) == Approx(3.890115679513914).epsilon(1e-12));
        for (int i = 2; i <= 15; ++i) CHECK(table.efficiency(i) > table.efficiency(i - 1));
        CHECK_THROWS_AS((void)table.efficiency(0), ValidationError);
        CHECK_THROWS_AS((void)table.efficiency(16), ValidationError);

        // Inversion: exact value is 45.555 dB; the worked example rounds it to about 45.
        const double snr15 = radio::cqi_index_to_snr(15, table, kA);
        CHECK(snr15 == Approx(45.5551336679363).epsilon(1e-10));
        CHECK(std::abs(snr15 - 45.0) < 1.0);
        CHECK(std::abs(radio::cqi_index_to_snr(1, table, kA)) < 1e-3);
        CHECK(radio::cqi_index_to_snr(1, table, kShannonAlpha) == Approx(0.0).epsilon(1e-12));
        CHECK_THROWS_AS(radio::cqi_index_to_snr(0, table, kA), ValidationError);

        std::array<double, 15> bad{};
        for (std::size_t i = 0; i < bad.size(); ++i) bad[i] = 1.0 + static_cast<double>(i);
        bad[7] = bad[6];
        CHECK_THROWS_AS(radio::CqiTable{bad}, ValidationError);
    }

    TEST_CASE("User 9 coefficient matches 227 Mbps in 15 MHz") {
        const double c = 227.0 / 15.0;
        const double snr = radio::snr_for_coefficient(kA, c);
        CHECK(radio::spectral_coefficient(kA, snr) == Approx(c).epsilon(1e-13));
        CHECK(radio::user_rate(kA, 15.0, snr) == Approx(227.0).epsilon(1e-13));
    }

    TEST_CASE("rate agrees with the long-double oracle") {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> bw(0.0, 50.0);
        std::uniform_real_distribution<double> snr(-20.0, 100.0);
        for (int i = 0; i < 500; ++i) {
            const double b = bw(rng);
            const double s = snr(rng);
            const auto expected = static_cast<double>(oracle::rate(kShannonAlpha, b, s));
            CHECK(radio::user_rate(kShannonAlpha, b, s) == Approx(expected).epsilon(1e-13));
        }
    }

    TEST_CASE("linearity, monotonicity and inversion properties") {
        std::mt19937_64 rng(12);
        std::uniform_real_distribution<double> bw(0.01, 40.0);
        std::uniform_real_distribution<double> snr(-10.0, 90.0);
        std::uniform_real_distribution<double> k(0.0, 10.0);
        for (int i = 0; i < 1000; ++i) {
            const double b = bw(rng);
            const double s = snr(rng);
            const double kk = k(rng);
            const double r = radio::user_rate(kShannonAlpha, b, s);
            CHECK(radio::user_rate(kShannonAlpha, kk * b, s) == Approx(kk * r).epsilon(1e-9));
            CHECK(radio::user_rate(kShannonAlpha, b, s + 0.5) > r);
            CHECK(radio::bw_for_rate(kShannonAlpha, r, s) == Approx(b).epsilon(1e-9));
            CHECK(radio::user_rate(kShannonAlpha, b, s) ==
                  radio::spectral_coefficient(kShannonAlpha, s) * b);
        }
    }

    TEST_CASE("SNR overrides") {
        const auto path = std::filesystem::temp_directory_path() / "slicegraph_snr_overrides.json";
        {
            std::ofstream out(path);
            out << R"({"18": 41.0, "9": 45.555})";
        }
        const auto overrides = radio::load_snr_overrides(path);
        CHECK(overrides.size() == 2);
        CHECK(overrides.at(18) == 41.0);
        auto users = fixtures::walkthrough_users();
        for (auto& u : users) u.snr_db = 0.0;
        radio::apply_snr_overrides(users, overrides);
        CHECK(users[5].snr_db == 41.0);
        CHECK(users[3].snr_db == 45.555);
        CHECK(users[0].snr_db == 0.0);
        {
            std::ofstream out(path);
            out << R"({"abc": 1.0})";
        }
        CHECK_THROWS_AS(radio::load_snr_overrides(path), ParseError);
    }
}
