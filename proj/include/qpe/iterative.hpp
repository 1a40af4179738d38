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

#include <cmath>
#include <concepts>
#include <numbers>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qpe/estimators.hpp"
#include "qpe/phase_model.hpp"
#include "qpe/protocol.hpp"

namespace qpe {

inline constexpr double kDefaultAlpha = 32.0;

/// Something that turns (true probability, shot count) into an estimate of
/// the probability. Protocols are written against this so the same code
/// runs with binomial sampling or with exact expectations.
template <class M>
concept Measurement = requires(M m, double p, std::int64_t nu) {
    { m(p, nu) } -> std::convertible_to<double>;
};

/// Binomial shot noise: returns x / nu.
class BinomialMeasurement {
   public:
    explicit BinomialMeasurement(RngStream &rng) : rng_(&rng) {
    }
    double operator()(double p, std::int64_t nu) {
        return mle_p({sample_successes(p, nu, *rng_), nu});
    }

   private:
    RngStream *rng_;
};

/// The infinite-shot limit: every estimate equals its expectation.
struct ExactMeasurement {
    double operator()(double p, std::int64_t) const {
        return p;
    }
};

/// Smallest nu with 2 exp(-nu delta^2 / 2) <= eps_i.
inline std::int64_t min_shots_chernoff(double delta, double eps_i) {
    if (!(delta > 0.0 && delta <= 0.5)) {
        throw std::invalid_argument("min_shots_chernoff: gap must lie in (0, 1/2]");
    }
    if (!(eps_i > 0.0 && eps_i < 1.0)) {
        throw std::invalid_argument("min_shots_chernoff: failure probability must lie in (0, 1)");
    }
    return static_cast<std::int64_t>(std::ceil(2.0 * std::log(2.0 / eps_i) / (delta * delta)));
}

/// Shot schedule for iterative point identification at level m.
///
/// The t_1 circuit and the depth-2^i circuits get failure budgets
/// 2^{-m} eps and 2^{i-m} eps, which sum to eps. Shot counts are
/// alpha ln(2 / eps_stage), rounded up.
struct IterativeAllocation {
    int m = 1;
    double epsilon = 0.1;
    double alpha = kDefaultAlpha;
    std::int64_t nu_first = 0;
    std::vector<std::int64_t> nu;  // nu[i] shots at depth 2^i, i = 0 .. m-1
    std::int64_t n_pi = 0;          // applications of U(theta) over all stages

    /// Failure budget of the t_1 circuit.
    double epsilon_first() const {
        return std::ldexp(epsilon, -m);
    }
    /// Failure budget of the depth-2^i circuit.
    double epsilon_stage(int i) const {
        return std::ldexp(epsilon, i - m);
    }
    /// The pre-ceiling shot total nu_first + sum 2^i nu_i.
    double n_pi_real() const {
        double total = alpha * std::log(2.0 / epsilon_first());
        for (int i = 0; i < m; ++i) {
            total += std::ldexp(alpha * std::log(2.0 / epsilon_stage(i)), i);
        }
        return total;
    }
};

/// alpha 2^m ln(8/eps) - 2 alpha ln 2.
inline double point_id_cost_closed_form(int m, double epsilon, double alpha) {
    return std::ldexp(alpha * std::log(8.0 / epsilon), m) - 2.0 * alpha * std::numbers::ln2;
}

inline IterativeAllocation allocate_iterative(int m, double epsilon, double alpha = kDefaultAlpha) {
    if (m < 1) {
        throw std::invalid_argument("allocate_iterative: level must be >= 1");
    }
    if (m > 60) {
        throw std::invalid_argument("allocate_iterative: level too large");
    }
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw std::invalid_argument("allocate_iterative: epsilon must lie in (0, 1)");
    }
    if (!(alpha > 0.0)) {
        throw std::invalid_argument("allocate_iterative: alpha must be positive");
    }
    IterativeAllocation a;
    a.m = m;
    a.epsilon = epsilon;
    a.alpha = alpha;
    auto shots = [&](double eps_stage) {
        return static_cast<std::int64_t>(std::ceil(alpha * std::log(2.0 / eps_stage)));
    };
    a.nu_first = shots(a.epsilon_first());
    a.n_pi = a.nu_first;
    a.nu.reserve(m);
    for (int i = 0; i < m; ++i) {
        a.nu.push_back(shots(a.epsilon_stage(i)));
        a.n_pi += a.nu.back() << i;
    }
    return a;
}

struct PointIdResult {
    BitString bits;  // t_1 .. t_{m+1}
    bool success = false;
    std::int64_t shots_used = 0;
};

/// Estimates t_1 .. t_{m+1}: the shifted circuit fixes t_1, then each
/// depth-2^i circuit fixes t_{i+2} from t_{i+1}.
template <Measurement M>
PointIdResult run_point_identification(Phase theta, const IterativeAllocation &alloc, M &&measure) {
    PointIdResult r;
    std::uint8_t prev = decide_first_bit(measure(p0_shifted(theta), alloc.nu_first));
    r.bits.push_back(prev);
    for (int i = 0; i < alloc.m; ++i) {
        const double p_hat = measure(p0(std::int64_t{1} << i, theta), alloc.nu[i]);
        prev = decide_bit(p_hat, prev);
        r.bits.push_back(prev);
    }
    r.success = r.bits == bits_of(theta.fraction(), alloc.m + 1);
    r.shots_used = alloc.n_pi;
    return r;
}

inline PointIdResult run_point_identification(Phase theta, const IterativeAllocation &alloc, RngStream &rng) {
    return run_point_identification(theta, alloc, BinomialMeasurement(rng));
}

/// Point identification alone; the estimate is theta_PI itself.
template <Measurement M>
TrialResult run_iterative_alone(Phase theta, const IterativeAllocation &alloc, M &&measure) {
    const PointIdResult pi = run_point_identification(theta, alloc, measure);
    return make_trial(theta, Phase::from_fraction(pi.bits.value()), pi.success, pi.shots_used,
                      std::int64_t{1} << (alloc.m - 1));
}

inline TrialResult run_iterative_alone(Phase theta, int m, double epsilon, double alpha, RngStream &rng) {
    return run_iterative_alone(theta, allocate_iterative(m, epsilon, alpha), BinomialMeasurement(rng));
}

/// Depth-2^m fine-tuning on top of an already identified bit string.
template <Measurement M>
Phase fine_tune(Phase theta, const BitString &bits, int m, std::int64_t nu_ft, M &&measure) {
    const double p_hat = measure(p0(std::int64_t{1} << m, theta), nu_ft);
    const double ft = invert_finetune(p_hat, bits[static_cast<std::size_t>(m)]);
    return combine(kTwoPi * bits.value(), ft, m);
}

template <Measurement M>
TrialResult run_two_step_iterative(Phase theta, const IterativeAllocation &alloc, std::int64_t nu_ft, M &&measure) {
    if (nu_ft < 1) {
        throw std::invalid_argument("run_two_step_iterative: nu_FT must be >= 1");
    }
    const PointIdResult pi = run_point_identification(theta, alloc, measure);
    const Phase est = fine_tune(theta, pi.bits, alloc.m, nu_ft, measure);
    return make_trial(theta, est, pi.success, pi.shots_used + (nu_ft << alloc.m), std::int64_t{1} << alloc.m);
}

inline TrialResult run_two_step_iterative(Phase theta, int m, double epsilon, double alpha, std::int64_t nu_ft,
                                          RngStream &rng) {
    return run_two_step_iterative(theta, allocate_iterative(m, epsilon, alpha), nu_ft, BinomialMeasurement(rng));
}

}  // namespace qpe
