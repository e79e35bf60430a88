// Copyright 2026 The SliceGraph Authors
// SPDX-License-Identifier: Apache-2.0

#include "slicegraph/digest.hpp"

namespace slicegraph {

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char byte : bytes) {
        hash ^= byte;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::string to_hex(std::uint64_t value) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = kDigits[value & 0xf];
        value >>= 4;
    }
    return out;
}

std::string json_digest(const nlohmann::json& j) { return to_hex(fnv1a64(j.dump())); }

}  // namespace slicegraph
