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

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "qpe/bench.hpp"
#include "qpe/planner.hpp"
#include "qpe/protocol.hpp"

namespace qpe {

/// Reads a SweepConfig. Missing fields keep their defaults; unknown fields
/// and malformed values are rejected with std::invalid_argument.
///
/// theta_sampling is either the string "uniform" or an array of radians.
inline SweepConfig sweep_config_from_json(const nlohmann::json &j) {
    if (!j.is_object()) {
        throw std::invalid_argument("config: top level must be a JSON object");
    }
    SweepConfig c;
    try {
        for (const auto &[key, value] : j.items()) {
            if (key == "protocols") {
                c.protocols.clear();
                for (const auto &name : value) {
                    const auto kind = parse_protocol(name.get<std::string>());
                    if (!kind) {
                        throw std::invalid_argument("config: unknown protocol '" + name.get<std::string>() + "'");
                    }
                    c.protocols.push_back(*kind);
                }
            } else if (key == "budgets") {
                c.budgets = value.get<std::vector<std::int64_t>>();
            } else if (key == "trials_per_point") {
                c.trials_per_point = value.get<std::int64_t>();
            } else if (key == "alpha") {
                c.alpha = value.get<double>();
            } else if (key == "epsilon_grid") {
                c.epsilon_grid = value.get<std::vector<double>>();
            } else if (key == "theta_sampling") {
                if (value.is_string()) {
                    if (value.get<std::string>() != "uniform") {
                        throw std::invalid_argument("config: theta_sampling must be \"uniform\" or a list");
                    }
                    c.fixed_thetas.clear();
                } else {
                    c.fixed_thetas = value.get<std::vector<double>>();
                    if (c.fixed_thetas.empty()) {
                        throw std::invalid_argument("config: theta_sampling list is empty");
                    }
                }
            } else if (key == "master_seed") {
                c.master_seed = value.get<std::uint64_t>();
            } else {
                throw std::invalid_argument("config: unknown field '" + key + "'");
            }
        }
    } catch (const nlohmann::json::exception &e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

inline SweepConfig load_sweep_config(const std::string &path) {
    std::ifstream f(path);
    if (!f) {
        throw IoError("cannot open config '" + path + "'");
    }
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception &e) {
        throw std::invalid_argument("config '" + path + "': " + e.what());
    }
    return sweep_config_from_json(j);
}

inline nlohmann::json to_json(const SweepConfig &c) {
    nlohmann::json j;
    j["protocols"] = nlohmann::json::array();
    for (auto k : c.protocols) {
        j["protocols"].push_back(std::string(to_string(k)));
    }
    j["budgets"] = c.budgets;
    j["trials_per_point"] = c.trials_per_point;
    j["alpha"] = c.alpha;
    j["epsilon_grid"] = c.epsilon_grid;
    if (c.fixed_thetas.empty()) {
        j["theta_sampling"] = "uniform";
    } else {
        j["theta_sampling"] = c.fixed_thetas;
    }
    j["master_seed"] = c.master_seed;
    return j;
}

inline nlohmann::json to_json(const TrialResult &r) {
    return {
        {"theta_true", r.theta_true.radians()}, {"theta_est", r.theta_est.radians()},
        {"abs_error", r.abs_error},             {"pi_success", r.pi_success},
        {"n_used", r.n_used},                   {"n_max", r.n_max},
    };
}

inline nlohmann::json to_json(const ShotAllocation &a) {
    nlohmann::json j;
    j["protocol"] = std::string(to_string(a.protocol));
    j["budget"] = a.budget;
    j["m"] = a.m ? nlohmann::json(*a.m) : nlohmann::json(nullptr);
    j["epsilon"] = a.epsilon ? nlohmann::json(*a.epsilon) : nlohmann::json(nullptr);
    j["alpha"] = a.alpha;
    j["nu_ft"] = a.nu_ft;
    if (a.protocol == ProtocolKind::ClassicalSQL) {
        j["nu_classical"] = a.nu_classical;
    }
    if (a.iterative) {
        j["iterative"] = {
            {"m", a.iterative->m},
            {"epsilon", a.iterative->epsilon},
            {"alpha", a.iterative->alpha},
            {"nu_first", a.iterative->nu_first},
            {"nu_i", a.iterative->nu},
            {"n_pi", a.iterative->n_pi},
        };
    } else {
        j["iterative"] = nullptr;
    }
    if (a.qpe) {
        j["qpe"] = {{"t", a.qpe->t}, {"b", a.qpe->b}};
        if (a.protocol == ProtocolKind::TwoStepQpe) {
            j["qpe"]["epsilon"] = a.qpe->epsilon;
        }
    } else {
        j["qpe"] = nullptr;
    }
    j["n_pi"] = a.n_pi;
    j["n_tot_used"] = a.n_tot_used;
    j["n_max"] = a.n_max;
    j["predicted_mae"] = a.predicted_mae;
    return j;
}

}  // namespace qpe
