#pragma once

#include "agesis/bifurcation.hpp"
#include "agesis/ode_system.hpp"

#include <optional>
#include <string>
#include <vector>

namespace agesis {

/// One-parameter sweep request: param is one of "j", "kd", "r0".
struct SweepSpec {
    std::string param;
    double from = 0.0;
    double to = 0.0;
    int steps = 100; // initial continuation step = (to - from)/steps
};

/// Two-parameter boundary grid; axes from {"j", "kd", "r0", "tau"}.
struct GridSpec {
    std::string p_param;
    double p_from = 0.0, p_to = 0.0;
    int p_points = 10;
    std::string q_param;
    double q_from = 0.0, q_to = 0.0;
};

/**
 * Scenario file contents. Grammar: one `key = value` pair per line, `#`
 * starts a comment, blank lines ignored. Times are months throughout.
 */
struct ScenarioConfig {
    double tau = 0.0;
    double shape_j = 0.0;
    double kd = 0.0;
    std::optional<double> r0;    // exactly one of r0 / beta0
    std::optional<double> beta0;
    std::string method = "pseudospectral"; // erlang | hypoexp | pseudospectral
    int d = 30;
    std::optional<double> rho; // default 2 j / tau, tracking swept j
    double t_end = 0.0;        // default 50 tau
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    std::vector<double> i0;
    std::optional<SweepSpec> sweep;
    std::optional<GridSpec> grid;
    bool classify = false; // run the simulation protocol on detected Hopf points
    bool stages = false;   // include per-stage columns in trajectory CSV
    std::string output;    // default output path (--out overrides)
};

/// Parse and validate; throws config_error naming the offending key.
ScenarioConfig load_config(const std::string& path);
ScenarioConfig parse_config(const std::string& text);

/// Model at the config's own parameters (beta0 calibrated when r0 given).
ModelSpec config_model(const ScenarioConfig& cfg);

/// Reduction chosen by `method` at the config's own parameters.
OdeSystem config_system(const ScenarioConfig& cfg);

/// Reduction with named parameters overridden (used by sweeps and grids).
OdeSystem config_system_with(const ScenarioConfig& cfg,
                             const std::vector<std::pair<std::string, double>>& overrides);

/// Families induced by the sweep / grid sections.
SystemFamily config_family(const ScenarioConfig& cfg);
SystemFamily2 config_family2(const ScenarioConfig& cfg);

} // namespace agesis
