#pragma once

#include "agesis/ode_system.hpp"

#include <optional>
#include <string>
#include <vector>

namespace agesis {

struct SolverStats {
    long long accepted = 0;
    long long rejected = 0;
};

/// Time series on a uniform output grid, recovered through dense output.
struct Trajectory {
    std::vector<double> t; // months, strictly increasing
    std::vector<double> S, I, Lambda, incidence;
    Eigen::MatrixXd states; // one row per output time
    SolverStats stats;

    std::size_t size() const { return t.size(); }
};

struct IntegrateOptions {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    int output_points = 2001;
    long long max_steps = 80'000'000;
};

/**
 * Integrate an OdeSystem with the Dormand-Prince 5(4) embedded pair and its
 * fourth-order dense-output interpolant. Throws step_underflow (naming the
 * time reached) when the controller stalls.
 */
Trajectory integrate(const OdeSystem& system, const Eigen::VectorXd& state0, double t_end,
                     const IntegrateOptions& opts = {});

struct AttractorReport {
    enum class Kind { equilibrium, periodic, undecided };
    Kind kind = Kind::undecided;
    double i_inf = 0.0;     // equilibrium level (equilibrium only)
    double amplitude = 0.0; // peak-to-trough of I over the window
    double period = 0.0;    // months (periodic only)
    double window_start = 0.0;
    double window_end = 0.0;
};

/**
 * Classify the trailing window (default last 20%) of a trajectory:
 * peak-to-trough below eps_eq means equilibrium at the window mean; otherwise
 * at least three upward mean-crossings make it periodic with the mean
 * crossing spacing as period; anything else is undecided.
 */
AttractorReport classify_attractor(const Trajectory& traj, double window_fraction = 0.2,
                                   double eps_eq = 1e-6);

std::string to_string(AttractorReport::Kind kind);

struct ProbeResult {
    double i0;
    std::optional<AttractorReport> report; // empty when the probe errored
    std::string error;
};

/// Integrate from the constant-history state of each I0 and classify; probe
/// failures are reported in place without aborting the batch.
std::vector<ProbeResult> bistability_probe(const OdeSystem& system,
                                           const std::vector<double>& i0_list, double t_end,
                                           const IntegrateOptions& opts = {});

} // namespace agesis
