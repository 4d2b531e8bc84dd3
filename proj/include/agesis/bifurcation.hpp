#pragma once

#include "agesis/dynamics.hpp"
#include "agesis/ode_system.hpp"

#include <complex>
#include <functional>
#include <optional>
#include <vector>

namespace agesis {

using SystemFamily = std::function<OdeSystem(double)>;
using SystemFamily2 = std::function<OdeSystem(double, double)>;

/// Damped Newton with finite-difference Jacobian; returns a state with
/// vector-field infinity norm <= 1e-12, or throws no_convergence.
Eigen::VectorXd find_equilibrium(const OdeSystem& system, const Eigen::VectorXd& seed);

/// Central finite-difference Jacobian at an equilibrium, step
/// h_i = 1e-6 max(1, |x_i|). Exact up to roundoff for these quadratic fields.
Eigen::MatrixXd linearize(const OdeSystem& system, const Eigen::VectorXd& state);

/// Eigenvalues sorted by descending real part (ties: descending imaginary).
std::vector<std::complex<double>> spectrum(const Eigen::MatrixXd& jacobian);

/// Largest real part among eigenvalues with |Im| above the floor, i.e. the
/// quantity whose sign change marks a Hopf bifurcation. Empty when the
/// spectrum has no complex pair.
std::optional<double> leading_complex_real(const std::vector<std::complex<double>>& eigs,
                                           double im_floor = 1e-7);

struct BranchPoint {
    double param;
    Eigen::VectorXd state;
    double i_star;
    std::vector<std::complex<double>> leading; // top 6 by real part
    bool stable;                               // max Re over the full spectrum < 0
};

enum class Criticality { supercritical, subcritical, unclassified };
std::string to_string(Criticality c);

struct BifurcationPoint {
    enum class Kind { hopf, transcritical };
    Kind kind;
    double param;
    double omega = 0.0; // Hopf only
    Criticality criticality = Criticality::unclassified;
};

struct ContinuationOptions {
    double initial_step = 0.0; // 0: range/200
    double min_step = 1e-5;
    double max_step_fraction = 1.0 / 50.0; // of the range
    double param_tol = 1e-8;               // Hopf bisection tolerance
    int max_points = 4000;
};

struct ContinuationResult {
    std::vector<BranchPoint> branch;
    std::vector<BifurcationPoint> bifurcations;
};

/**
 * Natural-parameter continuation of the endemic equilibrium over
 * [param_lo, param_hi]: secant predictor, Newton corrector, adaptive step
 * (halve on failure, grow 1.3x on success). Records the leading eigenvalues
 * at every accepted point; a sign change of the leading complex pair's real
 * part is refined into a Hopf point by bisection, and the reduction's R0
 * crossing 1 is recorded as a transcritical point. The branch terminates
 * gracefully where the endemic equilibrium ceases to exist.
 */
ContinuationResult continue_equilibrium(const SystemFamily& family, double param_lo,
                                        double param_hi, const ContinuationOptions& opts = {});

struct BoundaryOptions {
    double q_tol = 1e-6;
    int scan_points = 9; // coarse scan used to isolate the switch
    int jobs = 1;
};

struct BoundaryPoint {
    double p;
    double q_hopf;
};

/**
 * Trace a Hopf boundary in a two-parameter plane: for every p in p_grid,
 * bisect the sign of the leading complex pair's real part over
 * [q_lo, q_hi]. Grid points without a switch are omitted; more than one
 * switch raises ambiguous_bracket (use a finer bracket).
 */
std::vector<BoundaryPoint> hopf_boundary(const SystemFamily2& family,
                                         const std::vector<double>& p_grid, double q_lo,
                                         double q_hi, const BoundaryOptions& opts = {});

struct ClassifyOptions {
    std::vector<double> deltas = {0.02, 0.04}; // relative parameter offsets
    double perturbation = 1e-4;                // relative, unstable-side seed
    double far_probe_offset = 0.1;             // added to I* on the stable side
    double amplitude_ratio_lo = 1.1;           // sqrt(2) scaling window
    double amplitude_ratio_hi = 2.0;
    double small_amplitude_cap = 0.6;
    double large_amplitude_min = 0.01;
    double horizon_cap = 500000.0; // months
    IntegrateOptions integrate;
};

/**
 * Simulation-based Hopf criticality: on the unstable side the orbit
 * amplitudes at the two relative offsets must scale like sqrt(delta) and stay
 * small (supercritical); otherwise a large-amplitude attractor reached from a
 * far probe on the stable side marks the Hopf subcritical.
 */
Criticality classify_hopf(const SystemFamily& family, const BifurcationPoint& hopf,
                          const ClassifyOptions& opts = {});

} // namespace agesis
