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

#include "qpe/phase_model.hpp"

#include <cmath>
#include <vector>

#include <boost/math/distributions/binomial.hpp>

#include "gtest/gtest.h"
#include "test_util.hpp"

using namespace qpe;
using qpe::testing::uniform01;

TEST(Phase, reduces_onto_circle) {
    EXPECT_DOUBLE_EQ(Phase(-0.5).radians(), kTwoPi - 0.5);
    EXPECT_NEAR(Phase(kTwoPi + 1.0).radians(), 1.0, 1e-15);
    EXPECT_EQ(Phase(kTwoPi).radians(), 0.0);
    EXPECT_EQ(Phase::from_fraction(0.6875).fraction(), 0.6875);
    for (int i = 0; i < 1000; ++i) {
        const double theta = kTwoPi * uniform01();
        const Phase p(theta);
        EXPECT_GE(p.radians(), 0.0);
        EXPECT_LT(p.radians(), kTwoPi);
        EXPECT_NEAR(p.radians(), theta, 4e-16 * kTwoPi);
        EXPECT_NEAR(p.fraction() * kTwoPi, theta, 4e-16 * kTwoPi);
    }
}

TEST(BitString, rejects_non_binary_digits) {
    EXPECT_THROW(BitString({0, 2}), std::invalid_argument);
    EXPECT_DOUBLE_EQ(BitString({1, 0, 1}).value(), 0.625);
    EXPECT_EQ(BitString({1, 0, 1}).as_integer(), 5u);
}

TEST(P0, examples) {
    EXPECT_DOUBLE_EQ(p0(1, Phase(0.0)), 1.0);
    EXPECT_NEAR(p0(2, Phase(kPi / 2)), 0.0, 1e-15);
    EXPECT_NEAR(p0(4, Phase(kPi / 6)), 0.25, 1e-15);
    EXPECT_THROW(p0(0, Phase(1.0)), std::invalid_argument);
    EXPECT_THROW(p0(-3, Phase(1.0)), std::invalid_argument);
}

TEST(P0, shifted_examples) {
    EXPECT_DOUBLE_EQ(p0_shifted(Phase(0.0)), 0.5);
    EXPECT_NEAR(p0_shifted(Phase(kPi / 2)), 0.0, 1e-15);
    EXPECT_NEAR(p0_shifted(Phase(3 * kPi / 2)), 1.0, 1e-15);
    // Exact at dyadic phases.
    EXPECT_EQ(p0_shifted(Phase::from_fraction(0.5)), 0.5);
    EXPECT_EQ(p0(2, Phase::from_fraction(0.625)), 0.5);
}

TEST(P0, bounded_parity_and_depth_folding) {
    for (int i = 0; i < 2000; ++i) {
        const double theta = kTwoPi * uniform01();
        const auto depth = static_cast<std::int64_t>(1 + 200 * uniform01());
        const double p = p0(depth, Phase(theta));
        EXPECT_GE(p, 0.0);
        EXPECT_LE(p, 1.0);
        EXPECT_NEAR(p, p0(depth, Phase(kTwoPi - theta)), 1e-9);
        // N applications equal one application of N theta.
        EXPECT_NEAR(p, p0(1, Phase(std::fmod(depth * theta, kTwoPi))), 1e-9);
        EXPECT_NEAR(p, 0.5 * (1 + std::cos(depth * theta)), 1e-9);
    }
}

TEST(Trig, turns_match_library_and_quarter_turns_are_exact) {
    for (int i = 0; i < 2000; ++i) {
        const double x = 4.0 * uniform01() - 2.0;
        EXPECT_NEAR(cos_turns(x), std::cos(kTwoPi * x), 1e-14);
        EXPECT_NEAR(sin_turns(x), std::sin(kTwoPi * x), 1e-14);
    }
    for (int q = -8; q <= 8; ++q) {
        const double x = q / 4.0;
        const double c = (q % 2 != 0) ? 0.0 : ((q / 2) % 2 == 0 ? 1.0 : -1.0);
        EXPECT_EQ(cos_turns(x), c) << x;
        EXPECT_EQ(std::fabs(sin_turns(x)), std::fabs(cos_turns(x - 0.25))) << x;
    }
    EXPECT_EQ(sin_turns(0.5), 0.0);
    EXPECT_EQ(sin_turns(0.25), 1.0);
    EXPECT_EQ(sin_turns(-0.25), -1.0);
}

TEST(SampleSuccesses, edge_probabilities) {
    RngStream rng(1, 0);
    EXPECT_EQ(sample_successes(0.0, 100, rng), 0);
    EXPECT_EQ(sample_successes(1.0, 10, rng), 10);
    EXPECT_EQ(sample_successes(0.3, 0, rng), 0);
    EXPECT_THROW(sample_successes(-0.1, 10, rng), std::invalid_argument);
    EXPECT_THROW(sample_successes(1.5, 10, rng), std::invalid_argument);
    EXPECT_THROW(sample_successes(0.5, -1, rng), std::invalid_argument);
}

TEST(SampleSuccesses, large_nu_concentrates) {
    // 0.002 is 4 standard deviations of x/nu at nu = 1e6.
    int inside = 0;
    constexpr int kSeeds = 1000;
    for (int s = 0; s < kSeeds; ++s) {
        RngStream rng(77, s);
        const double frac = static_cast<double>(sample_successes(0.5, 1'000'000, rng)) / 1e6;
        inside += std::fabs(frac - 0.5) <= 0.002;
    }
    EXPECT_GE(inside, static_cast<int>(std::ceil(0.997 * kSeeds)));
}

TEST(SampleSuccesses, mean_of_binomial_100_03) {
    RngStream rng(5, 9);
    double total = 0.0;
    for (int i = 0; i < 10000; ++i) {
        total += static_cast<double>(sample_successes(0.3, 100, rng));
    }
    EXPECT_NEAR(total / 10000.0, 30.0, 1.5);
}

// Goodness of fit against the exact binomial law, small- and large-nu regimes.
TEST(SampleSuccesses, matches_exact_binomial_pmf) {
    struct Case {
        std::int64_t nu;
        double p;
    };
    for (const Case c : {Case{20, 0.3}, Case{7, 0.9}, Case{1000, 0.41}, Case{50000, 0.02}}) {
        boost::math::binomial_distribution<double> law(static_cast<double>(c.nu), c.p);
        std::vector<double> probs(c.nu + 1);
        for (std::int64_t k = 0; k <= c.nu; ++k) {
            probs[k] = boost::math::pdf(law, static_cast<double>(k));
        }
        std::vector<std::int64_t> counts(c.nu + 1, 0);
        constexpr std::int64_t kDraws = 100000;
        RngStream rng(2024, static_cast<std::uint64_t>(c.nu));
        for (std::int64_t i = 0; i < kDraws; ++i) {
            ++counts[sample_successes(c.p, c.nu, rng)];
        }
        EXPECT_GT(qpe::testing::chi_squared_pvalue(probs, counts, kDraws), 1e-3) << "nu=" << c.nu << " p=" << c.p;
    }
}

TEST(RngStream, reproducible_and_distinct) {
    RngStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
    for (int i = 0; i < 100; ++i) {
        const auto va = a.engine()();
        EXPECT_EQ(va, b.engine()());
        EXPECT_NE(va, c.engine()());
        EXPECT_NE(va, d.engine()());
    }
}

TEST(RngStream, neighbouring_streams_uncorrelated) {
    constexpr int kN = 20000;
    double sxy = 0, sx = 0, sy = 0, sxx = 0, syy = 0;
    for (int i = 0; i < kN; ++i) {
        RngStream a(3, i), b(3, i + 1);
        const double x = a.uniform(), y = b.uniform();
        sx += x;
        sy += y;
        sxy += x * y;
        sxx += x * x;
        syy += y * y;
    }
    const double cov = sxy / kN - (sx / kN) * (sy / kN);
    const double corr = cov / std::sqrt((sxx / kN - sx * sx / kN / kN) * (syy / kN - sy * sy / kN / kN));
    // 4 / sqrt(N) ~ 0.028
    EXPECT_LT(std::fabs(corr), 0.03);
}

TEST(BitsOf, examples) {
    EXPECT_EQ(bits_of(5.0 / 8, 3), BitString({1, 0, 1}));
    EXPECT_EQ(bits_of(0.0, 4), BitString({0, 0, 0, 0}));
    EXPECT_EQ(bits_of(11.0 / 16, 3), BitString({1, 0, 1}));
    EXPECT_THROW(bits_of(0.3, 0), std::invalid_argument);
}

TEST(BitsOf, truncation_brackets_fraction) {
    for (int i = 0; i < 2000; ++i) {
        const double T = uniform01();
        const int k = 1 + static_cast<int>(40 * uniform01());
        const double v = bits_of(T, k).value();
        EXPECT_LE(v, T);
        EXPECT_LT(T, v + std::ldexp(1.0, -k));
    }
}

TEST(ThetaFt, examples) {
    EXPECT_NEAR(theta_ft(Phase::from_fraction(11.0 / 16), 2), kPi / 2, 1e-15);
    EXPECT_EQ(theta_ft(Phase(0.0), 5), 0.0);
    EXPECT_EQ(theta_ft(Phase::from_fraction(5.0 / 8), 2), 0.0);
}

// Oracle: draw the bits first, then build T from them.
TEST(ThetaFt, equals_weighted_tail_bits) {
    for (int trial = 0; trial < 1000; ++trial) {
        const int m = static_cast<int>(20 * uniform01());
        const int r = 1 + static_cast<int>(20 * uniform01());
        std::vector<int> bits(m + 1 + r);
        double T = 0.0;
        for (std::size_t j = 0; j < bits.size(); ++j) {
            bits[j] = uniform01() < 0.5;
            T += bits[j] * std::ldexp(1.0, -static_cast<int>(j + 1));
        }
        double expected = 0.0;
        for (int j = m + 2; j <= m + 1 + r; ++j) {
            expected += kTwoPi * bits[j - 1] * std::ldexp(1.0, m - j);
        }
        EXPECT_NEAR(theta_ft(Phase::from_fraction(T), m), expected, 1e-12);
    }
}

TEST(Combine, examples) {
    EXPECT_NEAR(combine(kTwoPi * 5 / 8, kPi / 2, 2).radians(), kTwoPi * 11 / 16, 1e-12);
    EXPECT_EQ(combine(0.0, 0.0, 3).radians(), 0.0);
    const Phase wrapped = combine(kTwoPi * (1 - 1.0 / 16), kPi, 3);
    EXPECT_NEAR(circular_dist(wrapped, Phase(0.0)), 0.0, 1e-12);
}

TEST(Combine, decomposition_round_trip) {
    for (int i = 0; i < 1000; ++i) {
        const Phase theta(kTwoPi * uniform01());
        const int m = static_cast<int>(30 * uniform01());
        const double theta_pi = kTwoPi * bits_of(theta.fraction(), m + 1).value();
        const Phase back = combine(theta_pi, theta_ft(theta, m), m);
        EXPECT_LT(circular_dist(back, theta), 1e-12);
    }
}

TEST(CircularDist, examples) {
    EXPECT_EQ(circular_dist(Phase(0.0), Phase(0.0)), 0.0);
    EXPECT_NEAR(circular_dist(Phase(0.1), Phase(kTwoPi - 0.1)), 0.2, 1e-12);
    EXPECT_NEAR(circular_dist(Phase(0.0), Phase(kPi)), kPi, 1e-15);
}
