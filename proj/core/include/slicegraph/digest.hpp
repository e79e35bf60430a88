// Copyright 2026 The SliceGraph Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace slicegraph {

// 64-bit FNV-1a. Stable across platforms and runs.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

// 16 lowercase hex digits.
std::string to_hex(std::uint64_t value);

// fnv1a64 over the compact dump of j. nlohmann objects keep keys sorted, so the
// dump is canonical for a given value.
std::string json_digest(const nlohmann::json& j);

}  // namespace slicegraph
