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
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "qpe/iterative.hpp"
#include "qpe/phase_model.hpp"
#include "qpe/protocol.hpp"

namespace qpe {

/// Register and readout sizes for the textbook QPE circuit.
struct QpeConfig {
    int t = 1;  // counting qubits
    int b = 1;  // reported bits
    double epsilon = 0.5;
};

inline constexpr int kMaxQpeQubits = 50;

/// ceil(log2(2 + 1/(2 eps))), computed without floating log rounding.
inline int qpe_extra_qubits(double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw std::invalid_argument("qpe_extra_qubits: epsilon must lie in (0, 1)");
    }
    const double target = 2.0 + 1.0 / (2.0 * epsilon);
    int c = 0;
    while (std::ldexp(1.0, c) < target) {
        ++c;
    }
    return c;
}

inline int qpe_qubits(int b, double epsilon) {
    if (b < 1) {
        throw std::invalid_argument("qpe_qubits: need at least one reported bit");
    }
    return b + qpe_extra_qubits(epsilon);
}

inline QpeConfig make_qpe_config(int b, double epsilon) {
    return QpeConfig{qpe_qubits(b, epsilon), b, epsilon};
}

namespace detail {

/// sin^2(pi x) / (P^2 sin^2(pi x / P)): the QPE outcome law as a function of
/// the offset x = T*P - k, for register size P = 2^t.
inline double fejer(double x, double P) {
    const double r = x - std::nearbyint(x);
    if (r == 0.0) {
        const double q = x / P;
        return q == std::nearbyint(q) ? 1.0 : 0.0;
    }
    const double s_num = std::sin(kPi * r);
    const double s_den = std::sin(kPi * (x / P));
    return (s_num * s_num) / (P * P * s_den * s_den);
}

inline void check_register(int t) {
    if (t < 1 || t > kMaxQpeQubits) {
        throw std::invalid_argument("QPE register size must lie in [1, " + std::to_string(kMaxQpeQubits) +
                                    "], got " + std::to_string(t));
    }
}

}  // namespace detail

/// Probability that the t-qubit register reads k when T is the phase fraction.
inline double qpe_pmf(int t, double T, std::int64_t k) {
    detail::check_register(t);
    const double P = std::ldexp(1.0, t);
    if (k < 0 || static_cast<double>(k) >= P) {
        throw std::invalid_argument("qpe_pmf: outcome outside [0, 2^t)");
    }
    // T*P is exact (power-of-two scaling), so the offset carries no rounding.
    double x = wrap(T, 1.0) * P - static_cast<double>(k);
    x -= P * std::nearbyint(x / P);
    return detail::fejer(x, P);
}

/// Draws a register readout distributed exactly as qpe_pmf.
///
/// Outcomes within kWindow of floor(T 2^t) are drawn by inverse CDF; the
/// remaining tail mass is drawn by rejection against the envelope
/// sin^2(pi f) / (4 (j - f)^2), which dominates because
/// sin^2(pi y) >= 4 y^2 for |y| <= 1/2.
inline std::int64_t sample_qpe(int t, double T, RngStream &rng) {
    detail::check_register(t);
    constexpr std::int64_t kWindow = 64;
    const double P = std::ldexp(1.0, t);
    const auto P_int = static_cast<std::int64_t>(P);
    const double scaled = wrap(T, 1.0) * P;
    const auto k0 = static_cast<std::int64_t>(std::floor(scaled));
    const double f = scaled - static_cast<double>(k0);
    if (f == 0.0) {
        return k0 % P_int;
    }
    auto outcome = [&](std::int64_t j) { return ((k0 + j) % P_int + P_int) % P_int; };

    // Representatives j with j - f in (-P/2, P/2].
    const std::int64_t j_min = -P_int / 2 + 1;
    const std::int64_t j_max = P_int / 2;
    const std::int64_t lo = std::max(j_min, -kWindow);
    const std::int64_t hi = std::min(j_max, kWindow);

    const double u = rng.uniform();
    double acc = 0.0;
    std::int64_t last_positive = 0;
    for (std::int64_t j = lo; j <= hi; ++j) {
        const double w = detail::fejer(static_cast<double>(j) - f, P);
        if (w > 0.0) {
            last_positive = j;
        }
        acc += w;
        if (u < acc) {
            return outcome(j);
        }
    }
    const bool has_tail = lo > j_min || hi < j_max;
    if (!has_tail) {
        // u landed in the rounding gap above the summed mass.
        return outcome(last_positive);
    }

    const double sin_f = std::sin(kPi * f);
    const double A = 0.25 * sin_f * sin_f;
    // Envelope masses of the two tails: A * integral of 1/y^2.
    const double right_near = static_cast<double>(kWindow) - f;
    const double right_far = static_cast<double>(j_max) - f;
    const double left_near = static_cast<double>(kWindow) + f;
    const double left_far = f - static_cast<double>(j_min);
    const double mass_right = A * (1.0 / right_near - 1.0 / right_far);
    const double mass_left = A * (1.0 / left_near - 1.0 / left_far);
    if (!(mass_right + mass_left > 0.0)) {
        return outcome(last_positive);
    }

    for (;;) {
        const bool right = rng.uniform() * (mass_right + mass_left) < mass_right;
        const double near = right ? right_near : left_near;
        const double far = right ? right_far : left_far;
        const double inv_y = 1.0 / near - rng.uniform() * (1.0 / near - 1.0 / far);
        const double y = 1.0 / inv_y;
        std::int64_t j;
        double cell;
        if (right) {
            j = static_cast<std::int64_t>(std::ceil(y + f));
            if (j <= kWindow || j > j_max) {
                continue;
            }
            const double jf = static_cast<double>(j) - f;
            cell = 1.0 / (jf - 1.0) - 1.0 / jf;
        } else {
            j = static_cast<std::int64_t>(std::floor(f - y));
            if (j >= -kWindow || j < j_min) {
                continue;
            }
            const double fj = f - static_cast<double>(j);
            cell = 1.0 / (fj - 1.0) - 1.0 / fj;
        }
        const double target = detail::fejer(static_cast<double>(j) - f, P);
        if (rng.uniform() * A * cell < target) {
            return outcome(j);
        }
    }
}

/// Top-b-bit truncation of the readout, as an integer in [0, 2^b).
inline std::int64_t qpe_reported_bits(std::int64_t k, int t, int b) {
    return k >> (t - b);
}

/// True when the b-bit readout is more than 2^{-b} (circularly) away from
/// the b-bit truncation of T.
inline bool qpe_readout_failed(std::int64_t reported, int b, double T) {
    const std::int64_t cells = std::int64_t{1} << b;
    const auto truth = static_cast<std::int64_t>(std::floor(std::ldexp(wrap(T, 1.0), b)));
    const std::int64_t diff = ((reported - truth) % cells + cells) % cells;
    return std::min(diff, cells - diff) > 1;
}

/// Failure probability of a (t, b) readout at fixed T, by summing the pmf
/// over every failing outcome.
inline double qpe_failure_probability(int t, int b, double T) {
    detail::check_register(t);
    if (b < 1 || b > t) {
        throw std::invalid_argument("qpe_failure_probability: need 1 <= b <= t");
    }
    const std::int64_t P = std::int64_t{1} << t;
    double fail = 0.0;
    for (std::int64_t k = 0; k < P; ++k) {
        if (qpe_readout_failed(qpe_reported_bits(k, t, b), b, T)) {
            fail += qpe_pmf(t, T, k);
        }
    }
    return fail;
}

namespace detail {

inline constexpr std::array<double, 8> kGl8Nodes = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363,
};
inline constexpr std::array<double, 8> kGl8Weights = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763,
};

template <class F>
double gauss_legendre(F &&fn, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t i = 0; i < kGl8Nodes.size(); ++i) {
        acc += kGl8Weights[i] * fn(mid + half * kGl8Nodes[i]);
    }
    return acc * half;
}

/// sum_{c=lo}^{hi} |x - c| for integers lo <= hi.
inline double sum_abs_offsets(double x, double lo, double hi) {
    if (hi < lo) {
        return 0.0;
    }
    auto sum_c = [](double a, double b) { return b < a ? 0.0 : 0.5 * (a + b) * (b - a + 1.0); };
    const double q = std::floor(x);
    const double below_hi = std::min(hi, q);
    const double above_lo = std::max(lo, q + 1.0);
    double s = 0.0;
    if (below_hi >= lo) {
        s += x * (below_hi - lo + 1.0) - sum_c(lo, below_hi);
    }
    if (above_lo <= hi) {
        s += sum_c(above_lo, hi) - x * (hi - above_lo + 1.0);
    }
    return s;
}

/// Mean circular distance between x and the cell offsets c = 0 .. s-1 on a
/// circle of circumference P, for x in [-P/2, P/2].
inline double mean_cell_distance(double x, double s, double P) {
    const double half = 0.5 * P;
    const double last_unwrapped = std::min(s - 1.0, std::floor(x + half));
    double total = sum_abs_offsets(x, 0.0, last_unwrapped);
    // Offsets c > x + P/2 wrap: distance P + x - c.
    const double first_wrapped = last_unwrapped + 1.0;
    if (first_wrapped <= s - 1.0) {
        const double n = s - first_wrapped;
        total += n * (P + x) - 0.5 * (first_wrapped + s - 1.0) * n;
    }
    return total / s;
}

}  // namespace detail

/// Mean circular error, in radians, of the b-bit QPE readout when T is
/// uniform on [0, 1).
///
/// Averaging over uniform T turns the sum over outcomes into an integral
/// of the outcome law over a continuous offset; the integral is done with
/// Gauss-Legendre on unit cells near the peak and on geometrically growing
/// cells in the far tails, where sin^2 is replaced by its mean 1/2.
inline double qpe_expected_error(int t, int b) {
    detail::check_register(t);
    if (b < 1 || b > t) {
        throw std::invalid_argument("qpe_expected_error: need 1 <= b <= t");
    }
    if (t - b > 12) {
        throw std::invalid_argument("qpe_expected_error: at most 12 discarded bits supported");
    }
    constexpr double kUnitRange = 4096.0;
    const double P = std::ldexp(1.0, t);
    const double half = 0.5 * P;
    const double s = std::ldexp(1.0, t - b);

    auto exact = [&](double x) { return detail::fejer(x, P) * detail::mean_cell_distance(x, s, P); };
    auto averaged = [&](double x) {
        const double d = std::sin(kPi * x / P);
        return 0.5 * detail::mean_cell_distance(x, s, P) / (P * P * d * d);
    };

    double integral = 0.0;
    const double H = std::min(half, kUnitRange);
    for (double a = -H; a < H; a += 1.0) {
        integral += detail::gauss_legendre(exact, a, a + 1.0);
    }
    if (half > kUnitRange) {
        for (double a = kUnitRange; a < half; a *= 2.0) {
            const double b_end = std::min(2.0 * a, half);
            for (int piece = 0; piece < 4; ++piece) {
                const double x0 = a + (b_end - a) * piece / 4.0;
                const double x1 = a + (b_end - a) * (piece + 1) / 4.0;
                integral += detail::gauss_legendre(averaged, x0, x1);
            }
        }
        // Left tail: cells near -P/2 carry wrap kinks, so do them exactly.
        const double kink_end = -half + s;
        for (double a = -half; a < kink_end; a += 1.0) {
            integral += detail::gauss_legendre(exact, a, a + 1.0);
        }
        for (double a = kUnitRange; a < -kink_end; a *= 2.0) {
            const double b_end = std::min(2.0 * a, -kink_end);
            for (int piece = 0; piece < 4; ++piece) {
                const double x0 = a + (b_end - a) * piece / 4.0;
                const double x1 = a + (b_end - a) * (piece + 1) / 4.0;
                integral += detail::gauss_legendre(averaged, -x1, -x0);
            }
        }
    }
    return kTwoPi * integral / P;
}

/// Plain QPE: read t qubits and report the top b bits.
inline TrialResult run_qpe_alone(Phase theta, int t, int b, RngStream &rng) {
    detail::check_register(t);
    if (b < 1 || b > t) {
        throw std::invalid_argument("run_qpe_alone: need 1 <= b <= t");
    }
    const std::int64_t k = sample_qpe(t, theta.fraction(), rng);
    const std::int64_t reported = qpe_reported_bits(k, t, b);
    const Phase est = Phase::from_fraction(std::ldexp(static_cast<double>(reported), -b));
    const bool ok = !qpe_readout_failed(reported, b, theta.fraction());
    return make_trial(theta, est, ok, (std::int64_t{1} << t) - 1, std::int64_t{1} << (t - 1));
}

inline BitString integer_to_bits(std::int64_t value, int width) {
    BitString bits;
    for (int j = width - 1; j >= 0; --j) {
        bits.push_back(static_cast<std::uint8_t>((value >> j) & 1));
    }
    return bits;
}

/// QPE point identification with b = m + 1 followed by depth-2^m fine-tuning.
template <Measurement M>
TrialResult run_two_step_qpe(Phase theta, int m, const QpeConfig &cfg, std::int64_t nu_ft, RngStream &rng,
                             M &&measure_ft) {
    if (nu_ft < 1) {
        throw std::invalid_argument("run_two_step_qpe: nu_FT must be >= 1");
    }
    if (cfg.b != m + 1 || cfg.t < cfg.b) {
        throw std::invalid_argument("run_two_step_qpe: config must report m+1 bits");
    }
    detail::check_register(cfg.t);
    const std::int64_t k = sample_qpe(cfg.t, theta.fraction(), rng);
    const BitString bits = integer_to_bits(qpe_reported_bits(k, cfg.t, cfg.b), cfg.b);
    const bool ok = bits == bits_of(theta.fraction(), cfg.b);
    const Phase est = fine_tune(theta, bits, m, nu_ft, measure_ft);
    const std::int64_t n_pi = (std::int64_t{1} << cfg.t) - 1;
    const std::int64_t n_max = std::max(std::int64_t{1} << (cfg.t - 1), std::int64_t{1} << m);
    return make_trial(theta, est, ok, n_pi + (nu_ft << m), n_max);
}

inline TrialResult run_two_step_qpe(Phase theta, int m, double epsilon, std::int64_t nu_ft, RngStream &rng) {
    return run_two_step_qpe(theta, m, make_qpe_config(m + 1, epsilon), nu_ft, rng, BinomialMeasurement(rng));
}

}  // namespace qpe
