#pragma once

#include <optional>
#include <string>
#include <vector>

#include "evolution.hpp"
#include "forcing.hpp"
#include "stationary.hpp"

namespace bsq {

enum class Scenario { nonhomogeneous, homogeneous, navier_stokes, liouville_decay };

Scenario scenario_from_string(const std::string& s);
std::string to_string(Scenario s);

struct EvolutionSettings {
    int steps = 64;              ///< Duhamel grid steps on [0, T1]
    double calibration_C = 1.0;
    double liouville_t_end = 5500.0;
    int liouville_steps = 2200;
    int liouville_sample_every = 20;
};

struct ScenarioConfig {
    Scenario scenario = Scenario::nonhomogeneous;
    BoxSpec box;
    double gevrey_r = 1.0;
    std::uint64_t seed = 1;
    std::string output_dir = "out";
    std::optional<ForceSpec> f, g, gvec, u0, theta0;
    StationaryConfig stationary;
    EvolutionSettings evolution;
};

/// Parse + strictly validate a JSON config document: unknown keys are
/// rejected by name, scenario/force conflicts produce field-level messages,
/// defaults (including derived per-channel seeds) are filled in.
ScenarioConfig validate_config(const std::string& json_text);

/// Canonical echo with every default made explicit; validate(echo(c)) == c.
std::string config_echo_json(const ScenarioConfig& cfg);

enum class CheckStatus { pass, fail, recorded };

struct CheckLine {
    std::string name;
    CheckStatus status;
    std::string detail;
};

struct ScenarioOutcome {
    bool ok = true;
    std::string scenario;
    std::string failing_stage; ///< empty when ok
    std::vector<CheckLine> checks;
    std::string output_dir;
};

/// Execute the scenario pipeline, writing config echo, field containers, norm
/// CSVs, constants JSON, report JSON and summary JSON into the output
/// directory. Numerical failures surface as ok = false with the failing stage
/// named; artifacts produced up to that point are kept.
ScenarioOutcome run_scenario(const ScenarioConfig& cfg);

std::string format_check_line(const CheckLine& line);

/// Measured (Control-Gevrey) ratio: sup over a log t-grid in (0,1] of
/// ||e^{(2r/3) sqrt(t) sqrt(-Delta)} (f,g)||_{H1} / ||(f,g)||_{G^{-1}_r}.
double control_gevrey_measured_ratio(const VectorField& f, const ScalarField& g, double r,
                                     int t_points = 33);

} // namespace bsq
