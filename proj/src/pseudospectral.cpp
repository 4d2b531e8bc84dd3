#include "agesis/pseudospectral.hpp"
#include "agesis/errors.hpp"
#include "agesis/io.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <fstream>

namespace agesis {

namespace {

// Generalized Laguerre polynomial L_n^{(alpha)}(x) by three-term recurrence.
double laguerre(int n, double alpha, double x) {
    if (n == 0) return 1.0;
    double lm1 = 1.0;
    double l = 1.0 + alpha - x;
    for (int k = 1; k < n; ++k) {
        const double lp1 = ((2.0 * k + 1.0 + alpha - x) * l - (k + alpha) * lm1) / (k + 1.0);
        lm1 = l;
        l = lp1;
    }
    return l;
}

// e^{-x/2} L_n^{(1)}(x): the recurrence is linear, so the scaling survives it.
double laguerre1_scaled(int n, double x) {
    const double s = std::exp(-0.5 * x);
    if (n == 0) return s;
    double lm1 = s;
    double l = (2.0 - x) * s;
    for (int k = 1; k < n; ++k) {
        const double lp1 = ((2.0 * k + 2.0 - x) * l - (k + 1.0) * lm1) / (k + 1.0);
        lm1 = l;
        l = lp1;
    }
    return l;
}

/**
 * Laguerre-Radau rule for weight e^{-x} on [0, infty) with x_0 = 0 fixed:
 * d+1 points, exact to polynomial degree 2d. Nodes from Golub's modified
 * Jacobi matrix (monic Laguerre: alpha_k = 2k+1, beta_k = k^2), one Newton
 * polish each on L_d^{(1)} whose zeros they are. The e^x-scaled interior
 * weights come from the classical closed form
 *     w_i e^{x_i} = 1 / ( (d+1) [e^{-x_i/2} L_{d+1}^{(1)}(x_i)]^2 ),
 * which stays well-scaled where eigenvector-based weights underflow.
 */
void laguerre_radau(int d, Eigen::VectorXd& nodes, Eigen::VectorXd& weights,
                    Eigen::VectorXd& scaled_weights) {
    const int n = d + 1;
    Eigen::VectorXd diag(n), sub(n - 1);
    for (int k = 0; k < n; ++k) diag[k] = 2.0 * k + 1.0;
    for (int k = 1; k < n; ++k) sub[k - 1] = k;
    // pi_{n-2}(0)/pi_{n-1}(0) = -1/(n-1) for monic Laguerre, so this last
    // diagonal entry pins an eigenvalue at exactly 0.
    diag[n - 1] = n - 1.0;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw no_convergence("laguerre_radau: tridiagonal eigensolver failed");
    nodes = es.eigenvalues();

    if (std::fabs(nodes[0]) > 1e-8)
        throw no_convergence("laguerre_radau: fixed endpoint drifted away from 0");
    nodes[0] = 0.0;

    for (int i = 1; i < n; ++i) {
        const double f = laguerre(d, 1.0, nodes[i]);
        const double df = -laguerre(d - 1, 2.0, nodes[i]);
        if (df != 0.0) nodes[i] -= f / df;
    }

    weights.resize(n);
    scaled_weights.resize(n);
    double interior_sum = 0.0;
    for (int i = 1; i < n; ++i) {
        const double lscaled = laguerre1_scaled(d + 1, nodes[i]);
        scaled_weights[i] = 1.0 / ((d + 1.0) * lscaled * lscaled);
        weights[i] = scaled_weights[i] * std::exp(-nodes[i]);
        interior_sum += weights[i];
    }
    weights[0] = 1.0 - interior_sum; // the rule integrates 1 exactly
    scaled_weights[0] = weights[0];
}

} // namespace

CollocationScheme build_scheme(int degree, double rho) {
    if (degree < 4 || degree > 120)
        throw invalid_parameter("build_scheme: degree must lie in [4, 120]");
    if (!(rho > 0.0)) throw invalid_parameter("build_scheme: rho must be positive");

    const int d = degree;
    Eigen::VectorXd x, w, sw;
    laguerre_radau(d, x, w, sw);

    CollocationScheme s;
    s.degree = d;
    s.rho = rho;
    s.theta.resize(d + 1);
    s.abscissa.resize(d + 1);
    s.weight.resize(d + 1);
    for (int n = 0; n <= d; ++n) {
        s.abscissa[n] = x[n] / (2.0 * rho);
        s.theta[n] = -s.abscissa[n];
        // substitution a = x/(2 rho): int f da = sum [w_n e^{x_n}] f(a_n)/(2 rho)
        s.weight[n] = sw[n] / (2.0 * rho);
    }

    // Barycentric weights of the full node set, with the exponential weight
    // e^{-rho theta_n} folded in (log space; only ratios enter the operator).
    Eigen::VectorXd logc(d + 1), sign(d + 1);
    for (int n = 0; n <= d; ++n) {
        double acc = 0.0;
        for (int k = 0; k <= d; ++k) {
            if (k == n) continue;
            acc -= std::log(std::fabs(s.theta[n] - s.theta[k]));
        }
        logc[n] = acc + x[n] / 2.0;
        sign[n] = (n % 2 == 0) ? 1.0 : -1.0; // theta descending: n factors negative
    }
    const double logmax = logc.maxCoeff();
    Eigen::VectorXd c(d + 1);
    for (int n = 0; n <= d; ++n) c[n] = sign[n] * std::exp(logc[n] - logmax);

    // Full weighted differentiation matrix on all d+1 nodes,
    // A_{mn} = e^{rho theta_m} D_{mn} e^{-rho theta_n}.
    Eigen::MatrixXd full(d + 1, d + 1);
    for (int m = 0; m <= d; ++m) {
        double dsum = 0.0;
        for (int k = 0; k <= d; ++k) {
            if (k == m) continue;
            dsum += 1.0 / (s.theta[m] - s.theta[k]);
        }
        for (int n = 0; n <= d; ++n) {
            full(m, n) = (m == n) ? dsum : (c[n] / c[m]) / (s.theta[m] - s.theta[n]);
        }
    }

    // Interpolant is pinned to 0 at theta_0, so column 0 drops out.
    s.diff_op = full.block(1, 1, d, d);
    s.deriv_eval.resize(d + 1, d);
    for (int m = 0; m <= d; ++m) {
        const double unweight = std::exp(x[m] / 2.0); // e^{-rho theta_m}
        for (int n = 1; n <= d; ++n) s.deriv_eval(m, n - 1) = unweight * full(m, n);
    }
    return s;
}

OdeSystem build_ps_system(const ModelSpec& model, const CollocationScheme& scheme) {
    const int d = scheme.degree;
    const double rho = scheme.rho;
    const double kd = model.infectivity.kd;

    // The renewal integrals act on the interpolant through its derivative,
    //   I = int F(a) phi'(-a) da,   L = int beta(a) F(a) phi'(-a) da.
    // Recovering phi' from the weighted samples amplifies roundoff by
    // e^{-rho theta}, so both integrals are evaluated after integration by
    // parts instead (phi(0) = 0 kills the boundary terms):
    //   I = sum_n omega_n K(a_n) a_n' ... = - sum omega_n K(a_n) phi(theta_n),
    //   L = - sum omega_n beta(a_n) [kd F(a_n) + K(a_n)] phi(theta_n),
    // with phi(theta_n) = e^{-rho theta_n} V_n absorbed into the row vectors.
    Eigen::VectorXd row_i(d), row_lambda(d);
    double tau_quad = 0.0, r0_quad = 0.0;
    for (int n = 1; n <= d; ++n) {
        const double a = scheme.abscissa[n];
        const double omega = scheme.weight[n];
        const double surv = model.kernel.survival(a);
        const double dens = model.kernel.density(a);
        const double beta = model.infectivity(a);
        const double unweight = std::exp(rho * a); // e^{-rho theta_n}
        row_i[n - 1] = -omega * dens * unweight;
        row_lambda[n - 1] = -omega * beta * (kd * surv + dens) * unweight;
        tau_quad += omega * a * dens;
        r0_quad += omega * a * beta * (kd * surv + dens);
    }

    Eigen::VectorXd wvec(d), theta_int(d);
    for (int m = 1; m <= d; ++m) {
        wvec[m - 1] = std::exp(rho * scheme.theta[m]);
        theta_int[m - 1] = scheme.theta[m];
    }

    OdeSystem sys(model);
    sys.dim = d;
    sys.label = "pseudospectral";
    sys.r0_reduction = r0_quad;
    sys.tau_reduction = tau_quad;
    for (int n = 1; n <= d; ++n) sys.state_names.push_back("V_" + std::to_string(n));

    const Eigen::MatrixXd diff_op = scheme.diff_op;
    sys.field = [diff_op, row_i, row_lambda, wvec](const Eigen::VectorXd& v,
                                                   Eigen::VectorXd& dv) {
        const double infected = row_i.dot(v);
        const double force = row_lambda.dot(v);
        const double inflow = (1.0 - infected) * force;
        dv.noalias() = diff_op * v;
        dv.noalias() -= inflow * wvec;
    };

    sys.observe = [row_i, row_lambda](const Eigen::VectorXd& v) {
        const double infected = row_i.dot(v);
        const double force = row_lambda.dot(v);
        return Observables{1.0 - infected, infected, force, (1.0 - infected) * force};
    };

    sys.history_state = [tau_quad, wvec, theta_int, d](double i0) {
        if (!(i0 >= 0.0) || !(i0 < 1.0))
            throw invalid_parameter("ps_constant_history_state: I0 must lie in [0, 1)");
        const double c = i0 / tau_quad;
        Eigen::VectorXd v(d);
        for (int n = 0; n < d; ++n) v[n] = c * theta_int[n] * wvec[n];
        return v;
    };

    return sys;
}

Eigen::VectorXd ps_constant_history_state(const CollocationScheme& scheme,
                                          const ModelSpec& model, double i0) {
    return build_ps_system(model, scheme).history_state(i0);
}

void dump_scheme_csv(const CollocationScheme& scheme, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw invalid_parameter("dump_scheme_csv: cannot open " + path);
    out << "# collocation scheme: degree=" << scheme.degree << " rho=" << io::fmt(scheme.rho)
        << "\n";
    out << "theta,abscissa,weight\n";
    for (int n = 0; n <= scheme.degree; ++n)
        out << io::fmt(scheme.theta[n]) << ',' << io::fmt(scheme.abscissa[n]) << ','
            << io::fmt(scheme.weight[n]) << '\n';
    out << "# weighted differentiation operator, row-major " << scheme.degree << "x"
        << scheme.degree << "\n";
    for (int m = 0; m < scheme.degree; ++m) {
        for (int n = 0; n < scheme.degree; ++n) {
            if (n) out << ',';
            out << io::fmt(scheme.diff_op(m, n));
        }
        out << '\n';
    }
}

} // namespace agesis
