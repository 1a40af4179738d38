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
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "qpe/iterative.hpp"
#include "qpe/protocol.hpp"
#include "qpe/qpe.hpp"

namespace qpe {

/// Raised when a budget cannot host any admissible schedule.
class NoFeasiblePlan : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Fine-tuning needs at least this many shots for its error model to mean
/// anything.
inline constexpr std::int64_t kMinFineTuneShots = 8;

/// A complete shot schedule for one protocol under one budget.
struct ShotAllocation {
    ProtocolKind protocol = ProtocolKind::ClassicalSQL;
    std::int64_t budget = 0;
    std::optional<int> m;
    std::optional<double> epsilon;
    double alpha = kDefaultAlpha;
    std::int64_t nu_ft = 0;
    std::int64_t nu_classical = 0;  // per circuit, classical baseline only
    std::optional<IterativeAllocation> iterative;
    std::optional<QpeConfig> qpe;
    std::int64_t n_pi = 0;
    std::int64_t n_tot_used = 0;
    std::int64_t n_max = 0;
    double predicted_mae = 0.0;
};

/// (1 + m eps) pi / 2^m
inline double predict_mae_iterative_alone(int m, double epsilon) {
    return (1.0 + m * epsilon) * std::ldexp(kPi, -m);
}

/// Standard-deviation bound sqrt(ln 2 / (2^m dN_PI/dm)) at the optimal level.
inline double sigma_bound(int m, double dnpi_dm) {
    if (!(dnpi_dm > 0.0)) {
        throw std::invalid_argument("sigma_bound: derivative must be positive");
    }
    return std::sqrt(std::numbers::ln2 / std::ldexp(dnpi_dm, m));
}

/// dN_PI/dm for iterative point identification: alpha 2^m ln2 ln(8/eps).
inline double dnpi_dm_iterative(int m, double epsilon, double alpha) {
    return std::ldexp(alpha * std::numbers::ln2 * std::log(8.0 / epsilon), m);
}

/// The budget at which level m is optimal: N_PI + (1/ln 2) dN_PI/dm.
inline double optimal_budget_iterative(int m, double epsilon, double alpha) {
    return point_id_cost_closed_form(m, epsilon, alpha) + dnpi_dm_iterative(m, epsilon, alpha) / std::numbers::ln2;
}

/// Real-valued optimal level log2[(N + 2 alpha ln2) / (2 alpha ln(8/eps))].
inline double optimal_m_real(double budget, double epsilon, double alpha) {
    return std::log2((budget + 2.0 * alpha * std::numbers::ln2) / (2.0 * alpha * std::log(8.0 / epsilon)));
}

inline int optimal_m_iterative(double budget, double epsilon, double alpha = kDefaultAlpha) {
    const long m = std::lround(optimal_m_real(budget, epsilon, alpha));
    if (m < 1) {
        throw NoFeasiblePlan("optimal_m_iterative: budget " + std::to_string(budget) + " too small for m >= 1");
    }
    return static_cast<int>(m);
}

/// Two-step error at the optimal level:
/// (1 - eps) 2^{-m} / sqrt(alpha ln(8/eps)) + (m + 1) pi eps / 2^m.
inline double predict_mae_two_step(int m, double epsilon, double alpha) {
    return (1.0 - epsilon) * std::ldexp(1.0, -m) / std::sqrt(alpha * std::log(8.0 / epsilon)) +
           (m + 1) * kPi * epsilon * std::ldexp(1.0, -m);
}

/// Two-step error for a concrete budget, using the pre-floor fine-tuning
/// shot count (budget - N_PI) / 2^m in place of its optimal-level value.
inline double predict_mae_two_step_budgeted(int m, double epsilon, std::int64_t n_pi, std::int64_t budget) {
    const double nu_real = std::ldexp(static_cast<double>(budget - n_pi), -m);
    return (1.0 - epsilon) * std::ldexp(1.0, -m) / std::sqrt(nu_real) + (m + 1) * kPi * epsilon * std::ldexp(1.0, -m);
}

/// Classical two-circuit estimate: the atan2 error has variance
/// (sin^4 + cos^4) / nu, whose mean over theta is 3 / (4 nu).
inline double predict_mae_classical(std::int64_t nu_per_circuit) {
    return std::sqrt(2.0 / kPi) * std::sqrt(0.75 / static_cast<double>(nu_per_circuit));
}

/// 25 log-spaced failure budgets from 1e-6 to 0.5.
inline std::vector<double> default_epsilon_grid() {
    constexpr int kPoints = 25;
    const double lo = std::log10(1e-6);
    const double hi = std::log10(0.5);
    std::vector<double> grid;
    grid.reserve(kPoints);
    for (int i = 0; i < kPoints; ++i) {
        grid.push_back(std::pow(10.0, lo + (hi - lo) * i / (kPoints - 1)));
    }
    return grid;
}

/// Asymptotic failure-budget schedules: eps = 1/m for iterative point
/// identification alone, eps = m^{-3/2} for the two-step protocols.
inline double asymptotic_epsilon(ProtocolKind kind, int m) {
    const double eps = kind == ProtocolKind::IterativeAlone ? 1.0 / m : std::pow(static_cast<double>(m), -1.5);
    return std::min(eps, 0.5);
}

namespace detail {

inline int max_level(std::int64_t budget) {
    int m = 0;
    while (m < 60 && (std::int64_t{1} << (m + 1)) <= budget) {
        ++m;
    }
    return m;
}

inline std::optional<ShotAllocation> allocate_classical(std::int64_t budget) {
    if (budget < 2) {
        return std::nullopt;
    }
    ShotAllocation a;
    a.protocol = ProtocolKind::ClassicalSQL;
    a.budget = budget;
    a.nu_classical = budget / 2;
    a.n_tot_used = 2 * a.nu_classical;
    a.n_max = 1;
    a.predicted_mae = predict_mae_classical(a.nu_classical);
    return a;
}

inline std::optional<ShotAllocation> allocate_qpe_alone(std::int64_t budget, std::optional<int> forced_b) {
    int t = 0;
    while (t < kMaxQpeQubits && (std::int64_t{1} << (t + 1)) - 1 <= budget) {
        ++t;
    }
    if (t < 1) {
        return std::nullopt;
    }
    int best_b = 0;
    double best = std::numeric_limits<double>::infinity();
    if (forced_b) {
        if (*forced_b < 1 || *forced_b > t || t - *forced_b > 12) {
            return std::nullopt;
        }
        best_b = *forced_b;
        best = qpe_expected_error(t, best_b);
    } else {
        for (int b = std::max(1, t - 10); b <= t; ++b) {
            const double e = qpe_expected_error(t, b);
            if (e < best) {
                best = e;
                best_b = b;
            }
        }
    }
    ShotAllocation a;
    a.protocol = ProtocolKind::QpeAlone;
    a.budget = budget;
    a.qpe = QpeConfig{t, best_b, 0.0};
    a.n_pi = (std::int64_t{1} << t) - 1;
    a.n_tot_used = a.n_pi;
    a.n_max = std::int64_t{1} << (t - 1);
    a.predicted_mae = best;
    return a;
}

/// Integer allocation for one (m, eps) of an m-indexed protocol, or nothing
/// when it does not fit the budget.
inline std::optional<ShotAllocation> allocate_level(ProtocolKind kind, std::int64_t budget, int m, double epsilon,
                                                    double alpha) {
    ShotAllocation a;
    a.protocol = kind;
    a.budget = budget;
    a.m = m;
    a.epsilon = epsilon;
    a.alpha = alpha;
    if (kind == ProtocolKind::IterativeAlone || kind == ProtocolKind::TwoStepIterative) {
        a.iterative = allocate_iterative(m, epsilon, alpha);
        a.n_pi = a.iterative->n_pi;
    } else {
        const QpeConfig cfg = make_qpe_config(m + 1, epsilon);
        if (cfg.t > kMaxQpeQubits) {
            return std::nullopt;
        }
        a.qpe = cfg;
        a.n_pi = (std::int64_t{1} << cfg.t) - 1;
    }
    if (a.n_pi > budget) {
        return std::nullopt;
    }
    switch (kind) {
        case ProtocolKind::IterativeAlone:
            a.n_tot_used = a.n_pi;
            a.n_max = std::int64_t{1} << (m - 1);
            a.predicted_mae = predict_mae_iterative_alone(m, epsilon);
            return a;
        case ProtocolKind::TwoStepIterative:
        case ProtocolKind::TwoStepQpe: {
            a.nu_ft = (budget - a.n_pi) >> m;
            if (a.nu_ft < kMinFineTuneShots) {
                return std::nullopt;
            }
            a.n_tot_used = a.n_pi + (a.nu_ft << m);
            a.n_max = std::int64_t{1} << m;
            if (a.qpe) {
                a.n_max = std::max(a.n_max, std::int64_t{1} << (a.qpe->t - 1));
            }
            // TwoStepQpe reuses the iterative failure weighting (m + 1) pi eps / 2^m.
            a.predicted_mae = predict_mae_two_step_budgeted(m, epsilon, a.n_pi, budget);
            return a;
        }
        default:
            throw std::logic_error("allocate_level: protocol has no level");
    }
}

inline bool better(const ShotAllocation &a, const ShotAllocation &b) {
    return std::tuple(a.predicted_mae, a.n_max, a.m.value_or(0)) < std::tuple(b.predicted_mae, b.n_max, b.m.value_or(0));
}

}  // namespace detail

/// The schedule for one protocol with m and eps pinned; nothing if it does
/// not fit. For QpeAlone, m (when given) selects b = m + 1 reported bits.
inline std::optional<ShotAllocation> plan_fixed(std::int64_t budget, ProtocolKind kind, std::optional<int> m,
                                                std::optional<double> epsilon, double alpha = kDefaultAlpha) {
    switch (kind) {
        case ProtocolKind::ClassicalSQL:
            return detail::allocate_classical(budget);
        case ProtocolKind::QpeAlone:
            return detail::allocate_qpe_alone(budget, m ? std::optional<int>(*m + 1) : std::nullopt);
        default:
            break;
    }
    if (!m || !epsilon) {
        throw std::invalid_argument("plan_fixed: level and epsilon are both required");
    }
    if (*m < 1 || *m > 60 || !(*epsilon > 0.0 && *epsilon < 1.0)) {
        throw std::invalid_argument("plan_fixed: need m >= 1 and 0 < epsilon < 1");
    }
    return detail::allocate_level(kind, budget, *m, *epsilon, alpha);
}

/// Grid search over (m, eps) for the schedule with the smallest predicted
/// error; ties go to the smaller N_max, then the smaller m.
inline std::optional<ShotAllocation> plan(std::int64_t budget, ProtocolKind kind, double alpha = kDefaultAlpha,
                                          std::span<const double> epsilon_grid = {}) {
    if (!(alpha > 0.0)) {
        throw std::invalid_argument("plan: alpha must be positive");
    }
    if (budget < 2) {
        return std::nullopt;
    }
    if (kind == ProtocolKind::ClassicalSQL || kind == ProtocolKind::QpeAlone) {
        return plan_fixed(budget, kind, std::nullopt, std::nullopt, alpha);
    }
    std::vector<double> grid_storage;
    if (epsilon_grid.empty()) {
        grid_storage = default_epsilon_grid();
        epsilon_grid = grid_storage;
    }
    std::optional<ShotAllocation> best;
    const int m_top = detail::max_level(budget);
    for (double eps : epsilon_grid) {
        if (!(eps > 0.0 && eps < 1.0)) {
            throw std::invalid_argument("plan: epsilon grid values must lie in (0, 1)");
        }
        for (int m = 1; m <= m_top; ++m) {
            auto cand = detail::allocate_level(kind, budget, m, eps, alpha);
            if (!cand) {
                continue;
            }
            if (!best || detail::better(*cand, *best)) {
                best = std::move(cand);
            }
        }
    }
    return best;
}

/// Like plan(), but eps follows asymptotic_epsilon(kind, m) instead of a grid.
inline std::optional<ShotAllocation> plan_asymptotic(std::int64_t budget, ProtocolKind kind,
                                                     double alpha = kDefaultAlpha) {
    if (kind == ProtocolKind::ClassicalSQL || kind == ProtocolKind::QpeAlone) {
        return plan(budget, kind, alpha);
    }
    std::optional<ShotAllocation> best;
    const int m_top = detail::max_level(budget);
    for (int m = 1; m <= m_top; ++m) {
        auto cand = detail::allocate_level(kind, budget, m, asymptotic_epsilon(kind, m), alpha);
        if (cand && (!best || detail::better(*cand, *best))) {
            best = std::move(cand);
        }
    }
    return best;
}

}  // namespace qpe
