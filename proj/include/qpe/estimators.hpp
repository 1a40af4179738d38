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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qpe/phase_model.hpp"

namespace qpe {

/// x successes observed in nu shots.
struct SuccessCount {
    std::int64_t x = 0;
    std::int64_t nu = 0;
};

/// Candidates closer than this (circularly) are treated as one.
inline constexpr double kCandidateDedupTolerance = 1e-12;

inline double mle_p(SuccessCount c) {
    if (c.nu <= 0) {
        throw std::invalid_argument("mle_p: shot count must be positive");
    }
    if (c.x < 0 || c.x > c.nu) {
        throw std::invalid_argument("mle_p: successes must lie in [0, nu]");
    }
    return static_cast<double>(c.x) / static_cast<double>(c.nu);
}

/// arccos with the argument clamped into [-1, 1]; sampled estimates of
/// 2p - 1 can land on or just past the boundary.
inline double clamped_acos(double c) {
    return std::acos(std::clamp(c, -1.0, 1.0));
}

/// Every theta in [0, 2pi) with p0(N, theta) = p_hat: the 2N values
/// +/- arccos(2p - 1)/N + 2 pi l / N, with coincident branches merged.
inline std::vector<Phase> candidate_phases(double p_hat, std::int64_t depth) {
    if (depth < 1) {
        throw std::invalid_argument("candidate_phases: depth must be >= 1");
    }
    const double base = clamped_acos(2.0 * std::clamp(p_hat, 0.0, 1.0) - 1.0);
    const double n = static_cast<double>(depth);
    std::vector<Phase> out;
    out.reserve(2 * static_cast<std::size_t>(depth));
    auto push_unique = [&](Phase c) {
        for (const auto &seen : out) {
            if (circular_dist(seen, c) < kCandidateDedupTolerance) {
                return;
            }
        }
        out.push_back(c);
    };
    for (std::int64_t l = 0; l < depth; ++l) {
        const double shift = kTwoPi * static_cast<double>(l) / n;
        push_unique(Phase(base / n + shift));
        push_unique(Phase(-base / n + shift));
    }
    std::sort(out.begin(), out.end(), [](Phase a, Phase b) { return a.radians() < b.radians(); });
    return out;
}

/// t_1 from the shifted circuit: 0 when theta is in [0, pi).
/// Ties (p_hat == 1/2) go to 1.
inline std::uint8_t decide_first_bit(double p_hat_shifted) {
    return p_hat_shifted < 0.5 ? 0 : 1;
}

/// t_{i+2} from the depth-2^i survival estimate and t_{i+1}.
inline std::uint8_t decide_bit(double p_hat, std::uint8_t t_prev) {
    const std::uint8_t below = p_hat < 0.5 ? 1 : 0;
    return below ^ (t_prev & 1u);
}

/// Inverts p0(2^m, theta) = (1 +/- cos theta_FT)/2 for theta_FT in [0, pi];
/// the sign is + when t_{m+1} = 0.
inline double invert_finetune(double p_hat, std::uint8_t t_mp1) {
    const double c = 2.0 * p_hat - 1.0;
    return clamped_acos(t_mp1 == 0 ? c : -c);
}

}  // namespace qpe
