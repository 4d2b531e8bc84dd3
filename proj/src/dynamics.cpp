#include "agesis/dynamics.hpp"
#include "agesis/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace agesis {

namespace {

// Dormand-Prince 5(4) tableau (FSAL).
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247,
                 A64 = 49.0 / 176, A65 = -5103.0 / 18656;
constexpr double A71 = 35.0 / 384, A73 = 500.0 / 1113, A74 = 125.0 / 192,
                 A75 = -2187.0 / 6784, A76 = 11.0 / 84;
// Error coefficients, 5th minus 4th order.
constexpr double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920,
                 E5 = -17253.0 / 339200, E6 = 22.0 / 525, E7 = -1.0 / 40;
// Dense-output coefficients of the 4th-order interpolant.
constexpr double D1 = -12715105075.0 / 11282082432.0;
constexpr double D3 = 87487479700.0 / 32700410799.0;
constexpr double D4 = -10690763975.0 / 1880347072.0;
constexpr double D5 = 701980252875.0 / 199316789632.0;
constexpr double D6 = -1453857185.0 / 822651844.0;
constexpr double D7 = 69997945.0 / 29380423.0;

} // namespace

Trajectory integrate(const OdeSystem& system, const Eigen::VectorXd& state0, double t_end,
                     const IntegrateOptions& opts) {
    if (!(t_end > 0.0)) throw invalid_parameter("integrate: t_end must be positive");
    if (!(opts.rel_tol > 0.0) || !(opts.abs_tol > 0.0))
        throw invalid_parameter("integrate: tolerances must be positive");
    if (state0.size() != system.dim)
        throw invalid_parameter("integrate: state dimension mismatch");

    const int n = system.dim;
    const int n_out = std::max(2, opts.output_points);
    const double dt_out = t_end / (n_out - 1);

    Trajectory traj;
    traj.t.resize(n_out);
    traj.S.resize(n_out);
    traj.I.resize(n_out);
    traj.Lambda.resize(n_out);
    traj.incidence.resize(n_out);
    traj.states.resize(n_out, n);

    auto record = [&](int idx, double t, const Eigen::VectorXd& y) {
        const Observables ob = system.observe(y);
        traj.t[idx] = t;
        traj.S[idx] = ob.S;
        traj.I[idx] = ob.I;
        traj.Lambda[idx] = ob.Lambda;
        traj.incidence[idx] = ob.incidence;
        traj.states.row(idx) = y.transpose();
    };

    Eigen::VectorXd y = state0;
    Eigen::VectorXd k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), yerr(n);
    Eigen::VectorXd r1, r2, r3, r4, r5; // dense-output segment
    system.field(y, k1);

    // Starting step from the scaled norms of the state and the field.
    double h;
    {
        auto scnorm = [&](const Eigen::VectorXd& v, const Eigen::VectorXd& ref) {
            double acc = 0.0;
            for (int i = 0; i < n; ++i) {
                const double sc = opts.abs_tol + opts.rel_tol * std::fabs(ref[i]);
                acc += (v[i] / sc) * (v[i] / sc);
            }
            return std::sqrt(acc / n);
        };
        const double d0 = scnorm(y, y);
        const double d1 = scnorm(k1, y);
        double h0 = (d0 > 1e-10 && d1 > 1e-10) ? 0.01 * d0 / d1 : 1e-6;
        h0 = std::min(h0, t_end);
        ytmp = y + h0 * k1;
        system.field(ytmp, k2);
        const double d2 = scnorm(k2 - k1, y) / h0;
        const double dmax = std::max(d1, d2);
        const double h1 = (dmax < 1e-15) ? std::max(1e-6, h0 * 1e-3)
                                         : std::pow(0.01 / dmax, 0.2);
        h = std::min({100.0 * h0, h1, t_end});
    }

    double t = 0.0;
    int out_idx = 0;
    record(out_idx++, 0.0, y);

    bool last_rejected = false;
    long long steps = 0;
    while (t < t_end) {
        if (++steps > opts.max_steps)
            throw no_convergence("integrate: exceeded the maximum number of steps");

        bool final_step = false;
        double h_use = h;
        if (t + h_use >= t_end) {
            h_use = t_end - t;
            final_step = true;
        } else if (h_use < 1e-14 * std::max(1.0, std::fabs(t))) {
            std::ostringstream msg;
            msg << "integrate: step size underflow (stiffness?) at t = " << t;
            throw step_underflow(msg.str());
        }

        ytmp = y + h_use * (A21 * k1);
        system.field(ytmp, k2);
        ytmp = y + h_use * (A31 * k1 + A32 * k2);
        system.field(ytmp, k3);
        ytmp = y + h_use * (A41 * k1 + A42 * k2 + A43 * k3);
        system.field(ytmp, k4);
        ytmp = y + h_use * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4);
        system.field(ytmp, k5);
        ytmp = y + h_use * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5);
        system.field(ytmp, k6);
        ynew = y + h_use * (A71 * k1 + A73 * k3 + A74 * k4 + A75 * k5 + A76 * k6);
        system.field(ynew, k7); // FSAL
        yerr = h_use * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);

        double err = 10.0;
        if (ynew.allFinite()) {
            err = 0.0;
            for (int i = 0; i < n; ++i) {
                const double sc =
                    opts.abs_tol + opts.rel_tol * std::max(std::fabs(y[i]), std::fabs(ynew[i]));
                err += (yerr[i] / sc) * (yerr[i] / sc);
            }
            err = std::sqrt(err / n);
        }

        if (err <= 1.0) {
            const double t1 = final_step ? t_end : t + h_use;
            // Emit the output points this step passed over.
            if (out_idx < n_out && out_idx * dt_out <= t1 + 1e-9 * dt_out) {
                r1 = y;
                r2 = ynew - y;
                r3 = h_use * k1 - r2;
                r4 = r2 - h_use * k7 - r3;
                r5 = h_use * (D1 * k1 + D3 * k3 + D4 * k4 + D5 * k5 + D6 * k6 + D7 * k7);
                while (out_idx < n_out && out_idx * dt_out <= t1 + 1e-9 * dt_out) {
                    const double to = std::min(out_idx * dt_out, t1);
                    if (to >= t1) {
                        record(out_idx, t1, ynew);
                    } else {
                        const double s = (to - t) / h_use;
                        const double s1 = 1.0 - s;
                        ytmp = r1 + s * (r2 + s1 * (r3 + s * (r4 + s1 * r5)));
                        record(out_idx, to, ytmp);
                    }
                    ++out_idx;
                }
            }
            t = t1;
            y.swap(ynew);
            k1.swap(k7);
            ++traj.stats.accepted;
            const double fac = (err > 1e-30) ? 0.9 * std::pow(err, -0.2) : 5.0;
            h = h_use * std::clamp(fac, 0.2, last_rejected ? 1.0 : 5.0);
            last_rejected = false;
        } else {
            ++traj.stats.rejected;
            h = h_use * std::max(0.1, 0.9 * std::pow(err, -0.2));
            last_rejected = true;
        }
    }
    while (out_idx < n_out) record(out_idx++, t_end, y);
    return traj;
}

AttractorReport classify_attractor(const Trajectory& traj, double window_fraction,
                                   double eps_eq) {
    if (traj.size() < 16) throw insufficient_data("classify_attractor: trajectory too short");
    if (!(window_fraction > 0.0) || !(window_fraction <= 1.0))
        throw invalid_parameter("classify_attractor: window fraction must lie in (0, 1]");

    const double t_end = traj.t.back();
    const double w_start = t_end * (1.0 - window_fraction);
    std::size_t first = 0;
    while (first < traj.size() && traj.t[first] < w_start) ++first;
    if (traj.size() - first < 8)
        throw insufficient_data("classify_attractor: trailing window has too few samples");

    double lo = traj.I[first], hi = traj.I[first], mean = 0.0;
    for (std::size_t k = first; k < traj.size(); ++k) {
        lo = std::min(lo, traj.I[k]);
        hi = std::max(hi, traj.I[k]);
        mean += traj.I[k];
    }
    mean /= static_cast<double>(traj.size() - first);

    AttractorReport rep;
    rep.window_start = traj.t[first];
    rep.window_end = t_end;
    rep.amplitude = hi - lo;

    if (rep.amplitude < eps_eq) {
        rep.kind = AttractorReport::Kind::equilibrium;
        rep.i_inf = mean;
        rep.amplitude = 0.0;
        return rep;
    }

    std::vector<double> crossings;
    for (std::size_t k = first + 1; k < traj.size(); ++k) {
        if (traj.I[k - 1] < mean && traj.I[k] >= mean) {
            const double frac = (mean - traj.I[k - 1]) / (traj.I[k] - traj.I[k - 1]);
            crossings.push_back(traj.t[k - 1] + frac * (traj.t[k] - traj.t[k - 1]));
        }
    }
    if (crossings.size() >= 3) {
        rep.kind = AttractorReport::Kind::periodic;
        rep.period = (crossings.back() - crossings.front()) / (crossings.size() - 1.0);
    } else {
        rep.kind = AttractorReport::Kind::undecided;
    }
    return rep;
}

std::string to_string(AttractorReport::Kind kind) {
    switch (kind) {
        case AttractorReport::Kind::equilibrium: return "equilibrium";
        case AttractorReport::Kind::periodic: return "periodic";
        default: return "undecided";
    }
}

std::vector<ProbeResult> bistability_probe(const OdeSystem& system,
                                           const std::vector<double>& i0_list, double t_end,
                                           const IntegrateOptions& opts) {
    std::vector<ProbeResult> results;
    results.reserve(i0_list.size());
    for (double i0 : i0_list) {
        ProbeResult res;
        res.i0 = i0;
        try {
            const Trajectory traj = integrate(system, system.history_state(i0), t_end, opts);
            res.report = classify_attractor(traj);
        } catch (const std::exception& e) {
            res.error = e.what();
        }
        results.push_back(std::move(res));
    }
    return results;
}

} // namespace agesis
