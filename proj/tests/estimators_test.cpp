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

#include "qpe/estimators.hpp"

#include <cmath>

#include "gtest/gtest.h"
#include "test_util.hpp"

using namespace qpe;
using qpe::testing::uniform01;

TEST(MleP, examples) {
    EXPECT_EQ(mle_p({0, 10}), 0.0);
    EXPECT_EQ(mle_p({10, 10}), 1.0);
    EXPECT_EQ(mle_p({3, 4}), 0.75);
    EXPECT_THROW(mle_p({0, 0}), std::invalid_argument);
    EXPECT_THROW(mle_p({5, 4}), std::invalid_argument);
}

TEST(CandidatePhases, examples) {
    auto c = candidate_phases(1.0, 1);
    ASSERT_EQ(c.size(), 1u);
    EXPECT_NEAR(c[0].radians(), 0.0, 1e-15);

    c = candidate_phases(0.5, 1);
    ASSERT_EQ(c.size(), 2u);
    EXPECT_NEAR(c[0].radians(), kPi / 2, 1e-12);
    EXPECT_NEAR(c[1].radians(), 3 * kPi / 2, 1e-12);

    c = candidate_phases(1.0, 2);
    ASSERT_EQ(c.size(), 2u);
    EXPECT_NEAR(c[0].radians(), 0.0, 1e-12);
    EXPECT_NEAR(c[1].radians(), kPi, 1e-12);

    EXPECT_EQ(candidate_phases(0.3, 5).size(), 10u);
    EXPECT_THROW(candidate_phases(0.3, 0), std::invalid_argument);
}

TEST(CandidatePhases, every_candidate_reproduces_probability) {
    for (int i = 0; i < 200; ++i) {
        const double p = uniform01();
        const auto depth = static_cast<std::int64_t>(1 + 31 * uniform01());
        for (const Phase &c : candidate_phases(p, depth)) {
            EXPECT_NEAR(p0(depth, c), p, 1e-9);
        }
    }
}

TEST(CandidatePhases, contains_true_phase) {
    for (int i = 0; i < 1000; ++i) {
        const Phase theta(kTwoPi * uniform01());
        const auto depth = static_cast<std::int64_t>(1 + 32 * uniform01());
        double best = kPi;
        for (const Phase &c : candidate_phases(p0(depth, theta), depth)) {
            best = std::min(best, circular_dist(c, theta));
        }
        EXPECT_LT(best, 1e-9) << "theta=" << theta.radians() << " N=" << depth;
    }
}

TEST(DecideFirstBit, rule_and_tie) {
    EXPECT_EQ(decide_first_bit(0.1), 0);
    EXPECT_EQ(decide_first_bit(0.9), 1);
    EXPECT_EQ(decide_first_bit(0.5), 1);
}

TEST(DecideBit, examples) {
    // theta = 2pi * 0.011b: p0(1) = (1 + cos(3pi/4)) / 2
    EXPECT_NEAR(p0(1, Phase::from_fraction(0.375)), 0.1464466, 1e-6);
    EXPECT_EQ(decide_bit(0.146, 0), 1);
    EXPECT_EQ(decide_bit(0.9, 0), 0);
    EXPECT_EQ(decide_bit(0.9, 1), 1);
    EXPECT_EQ(decide_bit(0.5, 0), 0);
    EXPECT_EQ(decide_bit(0.5, 1), 1);
}

// Every (i+2)-bit pattern, i <= 6, at the exact probability.
TEST(DecideBit, exhaustive_against_true_bits) {
    for (int i = 0; i <= 6; ++i) {
        const int width = i + 2;
        for (int pattern = 0; pattern < (1 << width); ++pattern) {
            const double T = std::ldexp(static_cast<double>(pattern), -width);
            const BitString truth = bits_of(T, width);
            const Phase theta = Phase::from_fraction(T);
            if (std::fabs(std::cos(std::ldexp(theta.radians(), i))) >= 1e-6) {
                EXPECT_EQ(decide_bit(p0(std::int64_t{1} << i, theta), truth[i]), truth[i + 1]);
            }
            // Same prefix, pushed off the decision boundary by a quarter cell.
            const Phase nudged = Phase::from_fraction(T + std::ldexp(1.0, -width - 2));
            EXPECT_EQ(decide_bit(p0(std::int64_t{1} << i, nudged), truth[i]), truth[i + 1]) << "i=" << i
                                                                                             << " pattern=" << pattern;
        }
    }
}

TEST(InvertFinetune, examples) {
    EXPECT_NEAR(invert_finetune(0.75, 0), kPi / 3, 1e-15);
    EXPECT_EQ(invert_finetune(1.0, 0), 0.0);
    EXPECT_NEAR(invert_finetune(0.75, 1), 2 * kPi / 3, 1e-15);
    // Out-of-domain inputs are clamped.
    EXPECT_EQ(invert_finetune(1.0 + 1e-12, 0), 0.0);
    EXPECT_NEAR(invert_finetune(-1e-12, 0), kPi, 1e-15);
}

TEST(InvertFinetune, inverts_fine_tuning_probability) {
    for (int i = 0; i < 1000; ++i) {
        const Phase theta(kTwoPi * uniform01());
        const int m = static_cast<int>(21 * uniform01());
        const std::uint8_t t_mp1 = bits_of(theta.fraction(), m + 1)[m];
        EXPECT_NEAR(invert_finetune(p0(std::int64_t{1} << m, theta), t_mp1), theta_ft(theta, m), 1e-9);
    }
}

TEST(InvertFinetune, monotone_in_probability) {
    double prev0 = invert_finetune(0.0, 0);
    double prev1 = invert_finetune(0.0, 1);
    for (int k = 1; k <= 1000; ++k) {
        const double p = k / 1000.0;
        const double v0 = invert_finetune(p, 0);
        const double v1 = invert_finetune(p, 1);
        EXPECT_LE(v0, prev0);
        EXPECT_GE(v1, prev1);
        prev0 = v0;
        prev1 = v1;
    }
}
