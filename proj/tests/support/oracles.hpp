// Copyright 2026 The SliceGraph Authors
// SPDX-License-Identifier: Apache-2.0

// Independent reference computations for the tests. Nothing here calls into the
// library's solver or rate code.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "slicegraph/domain.hpp"

namespace oracle {

// Rate by direct evaluation in long double with pow, no log1p.
inline long double rate(long double alpha, long double bw, long double snr_db) {
    return alpha * bw * std::log10(1.0L + std::pow(10.0L, snr_db / 10.0L));
}

inline long double coefficient(long double alpha, long double snr_db) { return rate(alpha, 1.0L, snr_db); }

struct LpSolution {
    bool feasible = false;
    long double objective = 0.0L;
    std::vector<long double> bandwidths;
};

// Exact LP optimum of max sum c_i b_i, lower <= b <= upper, sum b <= budget, by
// enumerating basic solutions: every user at a bound except at most one.
inline LpSolution lp_vertices(const std::vector<slicegraph::FeasibleInterval>& users, long double budget) {
    const std::size_t n = users.size();
    LpSolution best;
    std::size_t combos = 1;
    for (std::size_t i = 0; i < n; ++i) combos *= 2;
    for (std::size_t mask = 0; mask < combos; ++mask) {
        for (std::size_t free = 0; free <= n; ++free) {  // free == n: no fractional user
            std::vector<long double> b(n);
            long double fixed = 0.0L;
            for (std::size_t i = 0; i < n; ++i) {
                if (i == free) continue;
                b[i] = (mask >> i) & 1 ? users[i].upper_mhz : users[i].lower_mhz;
                fixed += b[i];
            }
            if (free < n) {
                if ((mask >> free) & 1) continue;  // one labelling per fractional user
                const long double rest = budget - fixed;
                b[free] = std::clamp<long double>(rest, users[free].lower_mhz, users[free].upper_mhz);
            }
            long double sum = 0.0L;
            long double obj = 0.0L;
            for (std::size_t i = 0; i < n; ++i) {
                sum += b[i];
                obj += users[i].coefficient * b[i];
            }
            if (sum > budget * (1.0L + 1e-15L)) continue;
            if (!best.feasible || obj > best.objective) best = {true, obj, b};
        }
    }
    return best;
}

}  // namespace oracle
