#pragma once

#include "agesis/ode_system.hpp"

namespace agesis {

/**
 * Linear-chain reduction with the shape rounded to the nearest integer.
 * Exact when the shape is already an integer. State layout:
 * [I, Lambda, I_1..I_m, L_1..L_m] with the stage variables
 *   I_k(t) = int ( Lambda S )(t-a) f_k(a) da,
 *   L_k(t) = int ( Lambda S )(t-a) beta(a) f_k(a) da,
 * where f_k is the density of the first k stages combined.
 */
OdeSystem build_erlang_system(const ModelSpec& model);

/// Two-rate moment-matched chain reduction (requires shape > 1); same layout
/// with m replaced by the chain length n.
OdeSystem build_hypoexp_system(const ModelSpec& model);

/// Constant-incidence history state for any reduction; I0 in [0, 1).
Eigen::VectorXd constant_history_state(const OdeSystem& system, double i0);

/// R0 of a phase-type chain under the model's infectivity profile:
/// beta0 (1 - prod_i rate_i/(rate_i + kd))/kd, with the kd = 0 limit beta0 tau.
double chain_reproduction_number(const std::vector<double>& rates,
                                 const InfectivityProfile& infectivity);

} // namespace agesis
