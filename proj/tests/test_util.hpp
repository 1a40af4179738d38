// Copyright 2026 The qpe-bench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

namespace qpe::testing {

/// Deterministic generator for property-style tests.
inline std::mt19937_64 &test_rng() {
    static std::mt19937_64 rng(0x5eed1234u);
    return rng;
}

inline double uniform01() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(test_rng());
}

/// Pearson chi-squared p-value of observed counts against expected
/// probabilities. Cells with expected count below 5 are pooled.
inline double chi_squared_pvalue(const std::vector<double> &probs, const std::vector<std::int64_t> &counts,
                                 std::int64_t draws) {
    double stat = 0.0;
    int cells = 0;
    double pooled_e = 0.0;
    double pooled_o = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const double e = probs[i] * static_cast<double>(draws);
        if (e < 5.0) {
            pooled_e += e;
            pooled_o += static_cast<double>(counts[i]);
            continue;
        }
        const double d = static_cast<double>(counts[i]) - e;
        stat += d * d / e;
        ++cells;
    }
    if (pooled_e > 0.0) {
        const double d = pooled_o - pooled_e;
        stat += d * d / std::max(pooled_e, 1e-300);
        ++cells;
    }
    boost::math::chi_squared dist(cells - 1);
    return boost::math::cdf(boost::math::complement(dist, stat));
}

}  // namespace qpe::testing
