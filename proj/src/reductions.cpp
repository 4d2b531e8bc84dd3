#include "agesis/reductions.hpp"
#include "agesis/errors.hpp"

#include <cmath>

namespace agesis {

namespace {

// Shared chain builder: both reductions differ only in their stage rates.
OdeSystem build_chain_system(const ModelSpec& model, std::vector<double> rates,
                             std::string label) {
    const int n = static_cast<int>(rates.size());
    const double beta0 = model.infectivity.beta0;
    const double kd = model.infectivity.kd;

    OdeSystem sys(model);
    sys.dim = 2 + 2 * n;
    sys.label = std::move(label);
    sys.r0_reduction = chain_reproduction_number(rates, model.infectivity);
    sys.tau_reduction = chain_moments(rates).mean;

    sys.state_names.reserve(2 * n);
    for (int k = 1; k <= n; ++k) sys.state_names.push_back("I_" + std::to_string(k));
    for (int k = 1; k <= n; ++k) sys.state_names.push_back("L_" + std::to_string(k));

    sys.field = [rates, n, beta0, kd](const Eigen::VectorXd& x, Eigen::VectorXd& dx) {
        const double I = x[0];
        const double Lambda = x[1];
        const double inflow = Lambda * (1.0 - I);
        const auto istage = [&](int k) { return x[2 + k]; };         // k = 0..n-1
        const auto lstage = [&](int k) { return x[2 + n + k]; };

        dx[0] = inflow - istage(n - 1);
        dx[1] = beta0 * inflow - kd * Lambda - lstage(n - 1);
        dx[2] = rates[0] * (inflow - istage(0));
        for (int k = 1; k < n; ++k) dx[2 + k] = rates[k] * (istage(k - 1) - istage(k));
        dx[2 + n] = rates[0] * beta0 * inflow - (rates[0] + kd) * lstage(0);
        for (int k = 1; k < n; ++k)
            dx[2 + n + k] = rates[k] * (lstage(k - 1) - lstage(k)) - kd * lstage(k);
    };

    sys.observe = [](const Eigen::VectorXd& x) {
        const double I = x[0];
        const double Lambda = x[1];
        return Observables{1.0 - I, I, Lambda, Lambda * (1.0 - I)};
    };

    const double tau_chain = sys.tau_reduction;
    const double r0_chain = sys.r0_reduction;
    const int dim = sys.dim;
    sys.history_state = [rates, n, beta0, kd, tau_chain, r0_chain, dim](double i0) {
        if (!(i0 >= 0.0) || !(i0 < 1.0))
            throw invalid_parameter("constant_history_state: I0 must lie in [0, 1)");
        const double c = i0 / tau_chain; // constant past incidence
        Eigen::VectorXd x = Eigen::VectorXd::Zero(dim);
        x[0] = i0;
        x[1] = c * r0_chain;
        double attenuation = 1.0;
        for (int k = 0; k < n; ++k) {
            x[2 + k] = c;
            attenuation *= rates[k] / (rates[k] + kd);
            x[2 + n + k] = c * beta0 * attenuation;
        }
        return x;
    };

    return sys;
}

} // namespace

OdeSystem build_erlang_system(const ModelSpec& model) {
    const ErlangChain chain = erlang_round(model.kernel);
    return build_chain_system(model, chain.rates(), "erlang");
}

OdeSystem build_hypoexp_system(const ModelSpec& model) {
    const HypoexpChain chain = hypoexp_from_gamma(model.kernel);
    return build_chain_system(model, chain.rates(), "hypoexp");
}

Eigen::VectorXd constant_history_state(const OdeSystem& system, double i0) {
    return system.history_state(i0);
}

double chain_reproduction_number(const std::vector<double>& rates,
                                 const InfectivityProfile& infectivity) {
    return infectivity.beta0 * chain_laplace_survival(rates, infectivity.kd);
}

Eigen::VectorXd OdeSystem::ee_state() const {
    if (!(r0_reduction > 1.0))
        throw no_convergence("ee_state: reduction has no endemic equilibrium (R0 <= 1)");
    return history_state(1.0 - 1.0 / r0_reduction);
}

} // namespace agesis
