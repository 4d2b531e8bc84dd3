#pragma once

#include "agesis/model.hpp"

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

namespace agesis {

/// Observable quantities recovered from a reduction state.
struct Observables {
    double S;
    double I;
    double Lambda;
    double incidence; // Lambda * S, the boundary inflow i(t,0)
};

/**
 * A finite-dimensional reduction of the structured model: autonomous vector
 * field plus the maps recovering observables and canonical states. Immutable
 * once built; field evaluations are reentrant.
 */
struct OdeSystem {
    explicit OdeSystem(ModelSpec m) : model(std::move(m)) {}

    int dim = 0;
    std::string label; // "erlang" | "hypoexp" | "pseudospectral"
    ModelSpec model;

    std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)> field;
    std::function<Observables(const Eigen::VectorXd&)> observe;

    /// State realizing the constant-incidence history with I(0) = I0.
    std::function<Eigen::VectorXd(double)> history_state;

    /// Column headers for full state dumps (beyond t,S,I,Lambda,incidence).
    std::vector<std::string> state_names;

    /// R0 and mean sojourn of the *approximating* kernel (chain or quadrature).
    double r0_reduction = 0.0;
    double tau_reduction = 0.0;

    Eigen::VectorXd dfe_state() const { return Eigen::VectorXd::Zero(dim); }

    /// Closed-form endemic state of the reduction (throws if R0 <= 1).
    Eigen::VectorXd ee_state() const;
};

} // namespace agesis
