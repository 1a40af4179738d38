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
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace qpe {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Reduces x into [0, period).
inline double wrap(double x, double period) {
    double r = std::fmod(x, period);
    if (r < 0) {
        r += period;
    }
    if (r >= period) {
        r = 0.0;
    }
    return r;
}

/// An angle on the circle, always held in [0, 2pi).
///
/// The binary fraction T = theta / 2pi is the stored quantity so that dyadic
/// phases (and their bit expansions) are exact.
class Phase {
   public:
    constexpr Phase() = default;
    explicit Phase(double radians) : turns_(wrap(radians / kTwoPi, 1.0)) {
    }

    /// Builds the phase 2pi * T from a binary fraction T (reduced mod 1).
    static Phase from_fraction(double fraction) {
        Phase p;
        p.turns_ = wrap(fraction, 1.0);
        return p;
    }

    double radians() const {
        return kTwoPi * turns_;
    }
    /// T = theta / 2pi, in [0, 1).
    double fraction() const {
        return turns_;
    }

   private:
    double turns_ = 0.0;
};

/// Binary digits t_1 .. t_k of a fraction, most significant first.
class BitString {
   public:
    BitString() = default;
    explicit BitString(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
        for (auto b : bits_) {
            if (b > 1) {
                throw std::invalid_argument("BitString: digit must be 0 or 1");
            }
        }
    }

    std::size_t size() const {
        return bits_.size();
    }
    std::uint8_t operator[](std::size_t j) const {
        return bits_[j];
    }
    const std::vector<std::uint8_t> &digits() const {
        return bits_;
    }
    void push_back(std::uint8_t b) {
        bits_.push_back(b & 1u);
    }

    /// sum_j t_j 2^{-j}
    double value() const {
        double v = 0.0;
        double w = 0.5;
        for (auto b : bits_) {
            v += w * b;
            w *= 0.5;
        }
        return v;
    }

    /// The bits read as an unsigned integer (t_1 is the top bit).
    std::uint64_t as_integer() const {
        std::uint64_t v = 0;
        for (auto b : bits_) {
            v = (v << 1) | b;
        }
        return v;
    }

    bool operator==(const BitString &) const = default;

   private:
    std::vector<std::uint8_t> bits_;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// A reproducible random stream addressed by (master seed, stream index).
///
/// Each index gets its own Mersenne Twister whose seed words are a
/// splitmix64 hash of the pair, so streams can be handed to workers in any
/// order without changing what any one of them draws.
class RngStream {
   public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
        : master_seed_(master_seed), stream_index_(stream_index) {
        std::uint64_t s = splitmix64(master_seed ^ splitmix64(stream_index + 0x632BE59BD9B4E019ull));
        std::uint32_t words[8];
        for (auto &w : words) {
            s = splitmix64(s);
            w = static_cast<std::uint32_t>(s >> 32);
        }
        std::seed_seq seq(std::begin(words), std::end(words));
        engine_.seed(seq);
    }

    std::uint64_t master_seed() const {
        return master_seed_;
    }
    std::uint64_t stream_index() const {
        return stream_index_;
    }
    std::mt19937_64 &engine() {
        return engine_;
    }

    /// Uniform double in [0, 1).
    double uniform() {
        return std::generate_canonical<double, 53>(engine_);
    }

   private:
    std::uint64_t master_seed_;
    std::uint64_t stream_index_;
    std::mt19937_64 engine_;
};

/// cos(2 pi x) and sin(2 pi x) with the argument folded into one octant, so
/// quarter turns give exact zeros.
inline double cos_turns(double x) {
    const double a = std::fabs(x - std::nearbyint(x));
    if (a <= 0.125) {
        return std::cos(kTwoPi * a);
    }
    if (a <= 0.375) {
        return std::sin(kTwoPi * (0.25 - a));
    }
    return -std::cos(kTwoPi * (0.5 - a));
}

inline double sin_turns(double x) {
    const double r = x - std::nearbyint(x);
    const double a = std::fabs(r);
    double s;
    if (a <= 0.125) {
        s = std::sin(kTwoPi * a);
    } else if (a <= 0.375) {
        s = std::cos(kTwoPi * (0.25 - a));
    } else {
        s = std::sin(kTwoPi * (0.5 - a));
    }
    return r < 0.0 ? -s : s;
}

/// Probability that the probe survives N sequential applications:
/// (1 + cos(N theta)) / 2.
inline double p0(std::int64_t depth, Phase theta) {
    if (depth < 1) {
        throw std::invalid_argument("p0: depth must be >= 1, got " + std::to_string(depth));
    }
    // N*T mod 1 keeps the argument small; exact when N is a power of two.
    return 0.5 * (1.0 + cos_turns(wrap(static_cast<double>(depth) * theta.fraction(), 1.0)));
}

/// Survival probability of the circuit followed by the known pi/2 shift:
/// (1 - sin theta) / 2.
inline double p0_shifted(Phase theta) {
    return 0.5 * (1.0 - sin_turns(theta.fraction()));
}

/// Number of successes in nu independent shots with success probability p.
inline std::int64_t sample_successes(double p, std::int64_t nu, RngStream &rng) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("sample_successes: probability outside [0, 1]");
    }
    if (nu < 0) {
        throw std::invalid_argument("sample_successes: negative shot count");
    }
    if (nu == 0 || p == 0.0) {
        return 0;
    }
    if (p == 1.0) {
        return nu;
    }
    std::binomial_distribution<std::int64_t> dist(nu, p);
    return dist(rng.engine());
}

/// Truncated binary expansion t_1 .. t_k of T in [0, 1).
inline BitString bits_of(double fraction, int k) {
    if (k < 1) {
        throw std::invalid_argument("bits_of: need at least one bit");
    }
    fraction = wrap(fraction, 1.0);
    BitString out;
    double scaled = fraction;
    for (int j = 1; j <= k; ++j) {
        // Doubling a double is exact, so floor(2^j T) mod 2 is the exact digit.
        scaled *= 2.0;
        double digit = std::floor(scaled);
        out.push_back(static_cast<std::uint8_t>(digit));
        scaled -= digit;
    }
    return out;
}

/// Fine-tuning residual (2^m theta) mod pi, in [0, pi).
inline double theta_ft(Phase theta, int m) {
    if (m < 0) {
        throw std::invalid_argument("theta_ft: level must be >= 0");
    }
    double scaled = std::ldexp(theta.fraction(), m + 1);
    return kPi * (scaled - std::floor(scaled));
}

/// theta_PI + 2^{-m} theta_FT, reduced onto the circle.
inline Phase combine(double theta_pi, double theta_ft_est, int m) {
    return Phase(theta_pi + std::ldexp(theta_ft_est, -m));
}

/// Shortest arc between two phases, in [0, pi].
inline double circular_dist(Phase a, Phase b) {
    double d = std::fabs(a.radians() - b.radians());
    return std::min(d, kTwoPi - d);
}

}  // namespace qpe
