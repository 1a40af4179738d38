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
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "qpe/iterative.hpp"
#include "qpe/planner.hpp"
#include "qpe/protocol.hpp"
#include "qpe/qpe.hpp"

namespace qpe {

/// Classical two-circuit estimate: half the budget on p0(1, .), half on the
/// pi/2-shifted circuit, recombined with atan2.
template <Measurement M>
TrialResult run_classical_sql(Phase theta, std::int64_t budget, M &&measure) {
    if (budget < 2) {
        throw std::invalid_argument("run_classical_sql: budget must be >= 2");
    }
    const std::int64_t nu = budget / 2;
    const double pc = measure(p0(1, theta), nu);
    const double ps = measure(p0_shifted(theta), nu);
    const Phase est(std::atan2(1.0 - 2.0 * ps, 2.0 * pc - 1.0));
    return make_trial(theta, est, true, 2 * nu, 1);
}

inline TrialResult run_classical_sql(Phase theta, std::int64_t budget, RngStream &rng) {
    return run_classical_sql(theta, budget, BinomialMeasurement(rng));
}

/// Runs one trial of whatever protocol the allocation describes.
inline TrialResult run_trial(const ShotAllocation &plan, Phase theta, RngStream &rng) {
    switch (plan.protocol) {
        case ProtocolKind::ClassicalSQL:
            return run_classical_sql(theta, plan.budget, rng);
        case ProtocolKind::IterativeAlone:
            return run_iterative_alone(theta, *plan.iterative, BinomialMeasurement(rng));
        case ProtocolKind::TwoStepIterative:
            return run_two_step_iterative(theta, *plan.iterative, plan.nu_ft, BinomialMeasurement(rng));
        case ProtocolKind::QpeAlone:
            return run_qpe_alone(theta, plan.qpe->t, plan.qpe->b, rng);
        case ProtocolKind::TwoStepQpe:
            return run_two_step_qpe(theta, *plan.m, *plan.qpe, plan.nu_ft, rng, BinomialMeasurement(rng));
    }
    throw std::logic_error("run_trial: unknown protocol");
}

/// 24 log-spaced budgets from 1e2 to 1e7.
inline std::vector<std::int64_t> default_budgets() {
    constexpr int kPoints = 24;
    std::vector<std::int64_t> out;
    for (int i = 0; i < kPoints; ++i) {
        out.push_back(std::llround(std::pow(10.0, 2.0 + 5.0 * i / (kPoints - 1))));
    }
    return out;
}

struct SweepConfig {
    std::vector<ProtocolKind> protocols{kAllProtocols.begin(), kAllProtocols.end()};
    std::vector<std::int64_t> budgets = default_budgets();
    std::int64_t trials_per_point = 2000;
    double alpha = kDefaultAlpha;
    std::vector<double> epsilon_grid = default_epsilon_grid();
    /// Empty means theta ~ uniform on [0, 2pi); otherwise trial i uses
    /// fixed_thetas[i % size].
    std::vector<double> fixed_thetas;
    std::uint64_t master_seed = 0;

    void validate() const {
        if (protocols.empty()) {
            throw std::invalid_argument("sweep config: no protocols");
        }
        if (budgets.empty()) {
            throw std::invalid_argument("sweep config: no budgets");
        }
        for (std::size_t i = 0; i < budgets.size(); ++i) {
            if (budgets[i] < 1 || (i > 0 && budgets[i] <= budgets[i - 1])) {
                throw std::invalid_argument("sweep config: budgets must be positive and strictly increasing");
            }
        }
        if (trials_per_point < 1) {
            throw std::invalid_argument("sweep config: trials_per_point must be >= 1");
        }
        if (!(alpha > 0.0)) {
            throw std::invalid_argument("sweep config: alpha must be positive");
        }
        for (double e : epsilon_grid) {
            if (!(e > 0.0 && e < 1.0)) {
                throw std::invalid_argument("sweep config: epsilon_grid values must lie in (0, 1)");
            }
        }
    }
};

/// One aggregated (protocol, budget) row.
struct SweepRecord {
    std::string protocol;
    std::int64_t budget = 0;
    double n_used_mean = 0.0;
    std::int64_t n_max = 0;
    std::optional<int> m;
    std::optional<double> epsilon;
    std::int64_t trials = 0;
    double mae = 0.0;
    double mae_stderr = 0.0;
    double failure_rate = 0.0;
    std::uint64_t seed = 0;
};

struct SkippedPoint {
    std::string protocol;
    std::int64_t budget = 0;
    std::string reason;
};

struct SweepOutcome {
    std::vector<SweepRecord> records;
    std::vector<SkippedPoint> skipped;
};

struct SweepOptions {
    unsigned workers = 1;
    /// Called after each (protocol, budget) point with (done, total).
    std::function<void(std::size_t, std::size_t)> progress;
};

/// Mean, standard error and failure rate of a batch, summed in trial order.
inline SweepRecord aggregate(const ShotAllocation &plan, const std::vector<TrialResult> &trials, std::uint64_t seed) {
    SweepRecord r;
    r.protocol = std::string(to_string(plan.protocol));
    r.budget = plan.budget;
    r.n_max = plan.n_max;
    r.m = plan.m;
    r.epsilon = plan.epsilon;
    r.trials = static_cast<std::int64_t>(trials.size());
    r.seed = seed;
    if (trials.empty()) {
        return r;
    }
    const double n = static_cast<double>(trials.size());
    double sum = 0.0, used = 0.0, failures = 0.0;
    for (const auto &t : trials) {
        sum += t.abs_error;
        used += static_cast<double>(t.n_used);
        failures += t.pi_success ? 0.0 : 1.0;
    }
    r.mae = sum / n;
    r.n_used_mean = used / n;
    r.failure_rate = failures / n;
    if (trials.size() > 1) {
        double ss = 0.0;
        for (const auto &t : trials) {
            ss += (t.abs_error - r.mae) * (t.abs_error - r.mae);
        }
        r.mae_stderr = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    }
    return r;
}

/// Runs `count` trials of one plan. Trial i draws from
/// RngStream(seed, first_stream + i), so the output does not depend on
/// how the trials are spread over workers.
inline std::vector<TrialResult> run_trials(const ShotAllocation &plan, std::int64_t count,
                                           std::uint64_t seed, std::uint64_t first_stream,
                                           const std::vector<double> &fixed_thetas, unsigned workers) {
    std::vector<TrialResult> out(static_cast<std::size_t>(count));
    std::atomic<std::int64_t> next{0};
    auto work = [&] {
        for (std::int64_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
            RngStream rng(seed, first_stream + static_cast<std::uint64_t>(i));
            const Phase theta = fixed_thetas.empty()
                                    ? Phase::from_fraction(rng.uniform())
                                    : Phase(fixed_thetas[static_cast<std::size_t>(i) % fixed_thetas.size()]);
            out[static_cast<std::size_t>(i)] = run_trial(plan, theta, rng);
        }
    };
    workers = std::max(1u, workers);
    if (workers == 1 || count < 2) {
        work();
        return out;
    }
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back(work);
    }
    for (auto &th : pool) {
        th.join();
    }
    return out;
}

/// Plans and simulates every (protocol, budget) point of the config.
/// Budgets with no admissible plan are reported in `skipped`.
inline SweepOutcome run_sweep(const SweepConfig &config, const SweepOptions &options = {}) {
    config.validate();
    SweepOutcome outcome;
    const std::size_t total = config.protocols.size() * config.budgets.size();
    std::size_t point = 0;
    for (ProtocolKind kind : config.protocols) {
        for (std::int64_t budget : config.budgets) {
            const std::uint64_t first_stream = point * static_cast<std::uint64_t>(config.trials_per_point);
            ++point;
            const auto plan_opt = plan(budget, kind, config.alpha, config.epsilon_grid);
            if (!plan_opt) {
                outcome.skipped.push_back({std::string(to_string(kind)), budget, "no feasible plan"});
            } else {
                const auto trials = run_trials(*plan_opt, config.trials_per_point, config.master_seed, first_stream,
                                               config.fixed_thetas, options.workers);
                outcome.records.push_back(aggregate(*plan_opt, trials, config.master_seed));
            }
            if (options.progress) {
                options.progress(point, total);
            }
        }
    }
    return outcome;
}

inline constexpr const char *kCsvHeader =
    "protocol,budget,n_used_mean,n_max,m,epsilon,trials,mae,mae_stderr,failure_rate,seed";

/// Fixed-point decimal with 10 significant digits.
inline std::string format_decimal(double v) {
    if (v == 0.0 || !std::isfinite(v)) {
        return v == 0.0 ? "0" : std::to_string(v);
    }
    const int exponent = static_cast<int>(std::floor(std::log10(std::fabs(v))));
    const int decimals = std::max(0, 9 - exponent);
    char buf[512];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

inline std::string format_csv(const std::vector<SweepRecord> &records) {
    std::ostringstream out;
    out << kCsvHeader << '\n';
    for (const auto &r : records) {
        out << r.protocol << ',' << r.budget << ',' << format_decimal(r.n_used_mean) << ',' << r.n_max << ',';
        if (r.m) {
            out << *r.m;
        }
        out << ',';
        if (r.epsilon) {
            out << format_decimal(*r.epsilon);
        }
        out << ',' << r.trials << ',' << format_decimal(r.mae) << ',' << format_decimal(r.mae_stderr) << ','
            << format_decimal(r.failure_rate) << ',' << r.seed << '\n';
    }
    return out.str();
}

/// I/O failures carry the offending path.
class IoError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

inline void emit_csv(const std::vector<SweepRecord> &records, const std::string &path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    f << format_csv(records);
    f.flush();
    if (!f) {
        throw IoError("failed while writing '" + path + "'");
    }
}

/// Inverse of format_csv. Throws std::invalid_argument on schema errors.
inline std::vector<SweepRecord> parse_csv(const std::string &text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) {
        throw std::invalid_argument("csv: missing or unexpected header");
    }
    std::vector<SweepRecord> out;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) {
            cells.push_back(cell);
        }
        if (!line.empty() && line.back() == ',') {
            cells.emplace_back();
        }
        if (cells.size() != 11) {
            throw std::invalid_argument("csv line " + std::to_string(line_no) + ": expected 11 fields");
        }
        SweepRecord r;
        r.protocol = cells[0];
        r.budget = std::stoll(cells[1]);
        r.n_used_mean = std::stod(cells[2]);
        r.n_max = std::stoll(cells[3]);
        if (!cells[4].empty()) {
            r.m = std::stoi(cells[4]);
        }
        if (!cells[5].empty()) {
            r.epsilon = std::stod(cells[5]);
        }
        r.trials = std::stoll(cells[6]);
        r.mae = std::stod(cells[7]);
        r.mae_stderr = std::stod(cells[8]);
        r.failure_rate = std::stod(cells[9]);
        r.seed = std::stoull(cells[10]);
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace qpe
