#pragma once

#include "agesis/ode_system.hpp"

#include <string>

namespace agesis {

/**
 * Collocation scheme on (-infty, 0] built from Laguerre-Radau points scaled
 * by 1/(2 rho) and negated. Node 0 carries the interpolant's boundary
 * condition; the d interior nodes carry the state.
 *
 * The quadrature (abscissae a_n = -theta_n, weights omega_n) integrates
 * p(a) e^{-2 rho a} over [0, infty) exactly for polynomials p up to degree
 * 2d. The weighted differentiation operator acts on samples of e^{rho theta}
 * q(theta) with q(0) = 0 and returns samples of e^{rho theta} q'(theta).
 */
struct CollocationScheme {
    int degree = 0; // d
    double rho = 0.0;

    Eigen::VectorXd theta;    // size d+1: theta_0 = 0 > theta_1 > ... > theta_d
    Eigen::VectorXd abscissa; // a_n = -theta_n
    Eigen::VectorXd weight;   // omega_n for integrals over [0, infty)

    Eigen::MatrixXd diff_op;    // d x d weighted differentiation, interior nodes
    Eigen::MatrixXd deriv_eval; // (d+1) x d: V -> q'(theta_m), m = 0..d

    /// Quadrature of f against da on [0, infty): sum_n omega_n f(a_n).
    template <typename F>
    double integrate(F&& f) const {
        double acc = 0.0;
        for (int n = 0; n < abscissa.size(); ++n) acc += weight[n] * f(abscissa[n]);
        return acc;
    }
};

/// Build a scheme of degree d (>= 4) with weight rate rho (> 0).
CollocationScheme build_scheme(int degree, double rho);

/// Collocation reduction of the renewal equation. State V_n approximates
/// e^{rho theta_n} int_0^{theta_n} i(t+s, 0) ds at the interior nodes.
OdeSystem build_ps_system(const ModelSpec& model, const CollocationScheme& scheme);

/// Constant-incidence history state with observable I(0) = I0; I0 in [0, 1).
Eigen::VectorXd ps_constant_history_state(const CollocationScheme& scheme,
                                          const ModelSpec& model, double i0);

/// Nodes, weights and the differentiation operator as CSV, for diffing
/// against other implementations.
void dump_scheme_csv(const CollocationScheme& scheme, const std::string& path);

} // namespace agesis
