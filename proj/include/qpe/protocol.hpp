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

#include <array>
#include <cctype>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "qpe/phase_model.hpp"

namespace qpe {

enum class ProtocolKind {
    ClassicalSQL,
    IterativeAlone,
    TwoStepIterative,
    QpeAlone,
    TwoStepQpe,
};

inline constexpr std::array<ProtocolKind, 5> kAllProtocols = {
    ProtocolKind::ClassicalSQL, ProtocolKind::IterativeAlone, ProtocolKind::TwoStepIterative,
    ProtocolKind::QpeAlone,     ProtocolKind::TwoStepQpe,
};

inline std::string_view to_string(ProtocolKind kind) {
    switch (kind) {
        case ProtocolKind::ClassicalSQL:
            return "ClassicalSQL";
        case ProtocolKind::IterativeAlone:
            return "IterativeAlone";
        case ProtocolKind::TwoStepIterative:
            return "TwoStepIterative";
        case ProtocolKind::QpeAlone:
            return "QpeAlone";
        case ProtocolKind::TwoStepQpe:
            return "TwoStepQpe";
    }
    throw std::logic_error("unknown ProtocolKind");
}

/// Accepts the canonical names and their snake_case spellings
/// ("two_step_iterative", "classical_sql", ...), case-insensitively.
inline std::optional<ProtocolKind> parse_protocol(std::string_view name) {
    auto squash = [](std::string_view s) {
        std::string out;
        for (char c : s) {
            if (c != '_' && c != '-') {
                out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
            }
        }
        return out;
    };
    const std::string key = squash(name);
    for (auto kind : kAllProtocols) {
        if (squash(to_string(kind)) == key) {
            return kind;
        }
    }
    return std::nullopt;
}

inline bool is_two_step(ProtocolKind kind) {
    return kind == ProtocolKind::TwoStepIterative || kind == ProtocolKind::TwoStepQpe;
}

/// One simulated estimate.
struct TrialResult {
    Phase theta_true;
    Phase theta_est;
    double abs_error = 0.0;  // circular
    bool pi_success = true;
    std::int64_t n_used = 0;
    std::int64_t n_max = 0;
};

inline TrialResult make_trial(Phase truth, Phase estimate, bool pi_success, std::int64_t n_used,
                              std::int64_t n_max) {
    return TrialResult{truth, estimate, circular_dist(truth, estimate), pi_success, n_used, n_max};
}

}  // namespace qpe
