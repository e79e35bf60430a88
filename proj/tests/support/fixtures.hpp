// Copyright 2026 The SliceGraph Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "slicegraph/agent.hpp"
#include "slicegraph/domain.hpp"
#include "slicegraph/llm.hpp"
#include "slicegraph/radio.hpp"

#ifndef SLICEGRAPH_DATA_DIR
#error "SLICEGRAPH_DATA_DIR must be defined"
#endif
#ifndef SLICEGRAPH_TEST_DIR
#error "SLICEGRAPH_TEST_DIR must be defined"
#endif

namespace fixtures {

using namespace slicegraph;

inline std::filesystem::path data_dir() { return SLICEGRAPH_DATA_DIR; }
inline std::filesystem::path test_dir() { return SLICEGRAPH_TEST_DIR; }

inline UserProfile user(UserId id, double snr_db, SliceKind slice, double rate, double latency,
                        std::string text = "generic request") {
    return {id, snr_db, std::move(text), {slice, rate, latency}};
}

// SNR whose coefficient under the default alpha is exactly c (to rounding).
inline double snr_for(double c) { return radio::snr_for_coefficient(kShannonAlpha, c); }

inline std::string intent_json(const IntentLabel& intent) { return llm::serialize_intent(intent); }

// Users from the eMBB walkthrough: 2, 4, 6, 9 and 11 fill the slice, then 18 arrives.
inline std::vector<UserProfile> walkthrough_users() {
    return {
        user(2, 50.0, SliceKind::Embb, 150.0, 50.0, "HD sports streaming on a tablet"),
        user(4, 50.0, SliceKind::Embb, 150.0, 50.0, "4K video streaming of a live concert"),
        user(6, 50.0, SliceKind::Embb, 150.0, 50.0, "Virtual reality video streaming"),
        user(9, snr_for(227.0 / 15.0), SliceKind::Embb, 227.0, 100.0, "HD sports streaming in the stadium"),
        user(11, 45.0, SliceKind::Embb, 120.0, 60.0, "Video conference with screen sharing"),
        user(18, 41.0, SliceKind::Embb, 123.87, 40.0, "Cloud gaming session with high definition video"),
    };
}

inline std::unique_ptr<llm::MockBackend> intent_mock(const std::vector<UserProfile>& users) {
    auto mock = std::make_unique<llm::MockBackend>();
    for (const auto& u : users)
        mock->on_contains("User ID: " + std::to_string(u.id) + "\n", intent_json(u.ground_truth));
    mock->freeze();
    return mock;
}

}  // namespace fixtures
