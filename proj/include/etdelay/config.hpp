#pragma once

// Declarative scenario description and its JSON form.
//
// {
//   "name": "...",
//   "system":     { "A1": [[..]], "A2": [[..]], "B": [[..]],
//                   "tau": "2 - sin(t^2)", "tau_bar": 3, "phi": ["0.1", "1"] },
//   "synthesis":  { "b": 1.1, "h": 0.21 },
//   "trigger":    { "alpha": 0.1, "beta": 1, "sigma": 0.1, "baseline_mode": "history-sup" },
//   "controller": { "mode": "verify", "P": [[..]], "R": [[..]] }
//              or { "mode": "synthesize", "seed": 1, "restarts": 20, "margin": 1e-6,
//                   "max_iterations": 4000 },
//   "sim":        { "step": 0.01, "horizon": 20, "event_tol": 1e-10,
//                   "max_events": 10000, "interp": "linear" },
//   "output":     { "dir": "out", "trajectory": "trajectory.csv",
//                   "events": "events.csv", "report": "report.txt" }
// }
//
// Matrices are arrays of rows. Unknown keys are rejected.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "etdelay/ddesim.hpp"
#include "etdelay/pipeline.hpp"

namespace etdelay {

struct ControllerSpec {
    std::string mode = "synthesize";  // "synthesize" | "verify"
    std::optional<Matrix> P;
    std::optional<Matrix> Q;
    std::optional<Matrix> K;
    std::optional<Matrix> R;
    SynthesisOptions synthesis;

    bool operator==(const ControllerSpec& other) const;
};

struct OutputSpec {
    std::string dir = "out";
    std::string trajectory = "trajectory.csv";
    std::string events = "events.csv";
    std::string report = "report.txt";

    bool operator==(const OutputSpec&) const = default;
};

struct ScenarioConfig {
    std::string name;
    Matrix A1;
    Matrix A2;
    Matrix B;
    std::string tau;
    double tau_bar = 0.0;
    std::vector<std::string> phi;
    SynthesisParams synthesis;
    TriggerParams trigger;
    ControllerSpec controller;
    SimConfig sim;
    OutputSpec output;

    bool operator==(const ScenarioConfig& other) const;
};

/// Parses and fully validates (schema, dimensions, expressions).
/// Throws ConfigError naming the offending field.
ScenarioConfig config_from_json_text(const std::string& text);
ScenarioConfig load_config(const std::string& path);

std::string config_to_json_text(const ScenarioConfig& cfg);

/// Cross-field checks; run by the loaders, exposed for programmatic configs.
void validate_config(const ScenarioConfig& cfg);

LinearDelaySystem build_system(const ScenarioConfig& cfg);
DesignMode build_mode(const ScenarioConfig& cfg);

} // namespace etdelay
