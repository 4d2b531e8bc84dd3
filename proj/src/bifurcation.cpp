#include "agesis/bifurcation.hpp"
#include "agesis/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

namespace agesis {

namespace {

using cplx = std::complex<double>;

// Equilibrium data reused across continuation and boundary tracing.
struct EquilibriumInfo {
    Eigen::VectorXd state;
    std::vector<cplx> eigs;
    std::optional<double> alpha; // leading complex pair real part
    double i_star;
    bool stable;
};

std::optional<EquilibriumInfo> analyze_equilibrium(const OdeSystem& sys,
                                                   const Eigen::VectorXd* seed) {
    if (!(sys.r0_reduction > 1.0)) return std::nullopt;
    Eigen::VectorXd start = (seed && seed->size() == sys.dim) ? *seed : sys.ee_state();
    Eigen::VectorXd x;
    try {
        x = find_equilibrium(sys, start);
    } catch (const no_convergence&) {
        if (!seed) return std::nullopt;
        x = find_equilibrium(sys, sys.ee_state()); // retry from the analytic seed
    }
    EquilibriumInfo info;
    info.state = x;
    info.eigs = spectrum(linearize(sys, x));
    info.alpha = leading_complex_real(info.eigs);
    info.i_star = sys.observe(x).I;
    info.stable = !info.eigs.empty() && info.eigs.front().real() < 0.0;
    return info;
}

} // namespace

Eigen::VectorXd find_equilibrium(const OdeSystem& system, const Eigen::VectorXd& seed) {
    if (seed.size() != system.dim)
        throw invalid_parameter("find_equilibrium: seed dimension mismatch");
    Eigen::VectorXd x = seed;
    Eigen::VectorXd f(system.dim), xt(system.dim), ft(system.dim);
    system.field(x, f);
    double norm = f.lpNorm<Eigen::Infinity>();

    for (int iter = 0; iter < 50; ++iter) {
        if (norm <= 1e-12) return x;
        const Eigen::MatrixXd jac = linearize(system, x);
        const Eigen::VectorXd step = jac.partialPivLu().solve(f);
        if (!step.allFinite())
            throw no_convergence("find_equilibrium: singular Jacobian");

        double damp = 1.0;
        bool improved = false;
        for (int bt = 0; bt < 30; ++bt) {
            xt = x - damp * step;
            system.field(xt, ft);
            const double nt = ft.lpNorm<Eigen::Infinity>();
            if (nt < norm) {
                x = xt;
                f = ft;
                norm = nt;
                improved = true;
                break;
            }
            damp *= 0.5;
        }
        if (!improved) break;
    }
    if (norm <= 1e-12) return x;
    std::ostringstream msg;
    msg << "find_equilibrium: no convergence, residual " << norm;
    throw no_convergence(msg.str());
}

Eigen::MatrixXd linearize(const OdeSystem& system, const Eigen::VectorXd& state) {
    const int n = system.dim;
    Eigen::MatrixXd jac(n, n);
    Eigen::VectorXd xp = state, xm = state, fp(n), fm(n);
    for (int i = 0; i < n; ++i) {
        const double h = 1e-6 * std::max(1.0, std::fabs(state[i]));
        xp[i] = state[i] + h;
        xm[i] = state[i] - h;
        system.field(xp, fp);
        system.field(xm, fm);
        jac.col(i) = (fp - fm) / (2.0 * h);
        xp[i] = state[i];
        xm[i] = state[i];
    }
    return jac;
}

std::vector<std::complex<double>> spectrum(const Eigen::MatrixXd& jacobian) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(jacobian, false);
    if (es.info() != Eigen::Success) throw no_convergence("spectrum: eigensolver failed");
    std::vector<cplx> eigs(es.eigenvalues().data(),
                           es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(eigs.begin(), eigs.end(), [](const cplx& a, const cplx& b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
    return eigs;
}

std::optional<double> leading_complex_real(const std::vector<cplx>& eigs, double im_floor) {
    for (const cplx& z : eigs)
        if (std::fabs(z.imag()) > im_floor) return z.real(); // sorted by Re already
    return std::nullopt;
}

std::string to_string(Criticality c) {
    switch (c) {
        case Criticality::supercritical: return "supercritical";
        case Criticality::subcritical: return "subcritical";
        default: return "unclassified";
    }
}

ContinuationResult continue_equilibrium(const SystemFamily& family, double param_lo,
                                        double param_hi, const ContinuationOptions& opts) {
    if (!(param_hi > param_lo))
        throw invalid_parameter("continue_equilibrium: empty parameter range");
    const double range = param_hi - param_lo;
    const double max_step = range * opts.max_step_fraction;
    double step = (opts.initial_step > 0.0) ? opts.initial_step : range / 200.0;
    step = std::clamp(step, opts.min_step, max_step);

    ContinuationResult out;

    auto r0_at = [&](double p) { return family(p).r0_reduction; };

    // Transcritical point: the reduction's R0 crossing 1 is located
    // analytically (bisection on a closed-form quantity, not on the flow).
    double start = param_lo;
    const double r_lo = r0_at(param_lo), r_hi = r0_at(param_hi);
    if (r_lo <= 1.0 && r_hi <= 1.0) return out;
    if ((r_lo - 1.0) * (r_hi - 1.0) < 0.0) {
        double a = param_lo, b = param_hi;
        while (b - a > 1e-12 * std::max(1.0, std::fabs(b))) {
            const double mid = 0.5 * (a + b);
            if ((r0_at(mid) - 1.0) * (r_lo - 1.0) > 0.0)
                a = mid;
            else
                b = mid;
        }
        const double p_c = 0.5 * (a + b);
        out.bifurcations.push_back(
            BifurcationPoint{BifurcationPoint::Kind::transcritical, p_c});
        if (r_lo <= 1.0) start = p_c + std::max(opts.min_step, 1e-6 * range);
    }

    // March the endemic branch with secant prediction.
    double p = start;
    Eigen::VectorXd prev_state, prev2_state;
    double prev_p = 0.0, prev2_p = 0.0;
    int fails = 0;
    while (p <= param_hi + 1e-12 * range &&
           static_cast<int>(out.branch.size()) < opts.max_points) {
        const OdeSystem sys = family(p);
        std::optional<Eigen::VectorXd> seed;
        if (prev_state.size() == sys.dim && prev2_state.size() == sys.dim &&
            prev_p != prev2_p) {
            const double w = (p - prev_p) / (prev_p - prev2_p);
            seed = prev_state + w * (prev_state - prev2_state);
        } else if (prev_state.size() == sys.dim) {
            seed = prev_state;
        }
        std::optional<EquilibriumInfo> info;
        try {
            info = analyze_equilibrium(sys, seed ? &*seed : nullptr);
        } catch (const no_convergence&) {
            info.reset();
        }
        if (!info) {
            if (!(sys.r0_reduction > 1.0)) break; // branch left the endemic region
            step *= 0.5;
            if (step < opts.min_step || ++fails > 60)
                throw no_convergence("continue_equilibrium: corrector kept failing");
            p = (out.branch.empty() ? start : out.branch.back().param) + step;
            continue;
        }
        fails = 0;
        BranchPoint bp;
        bp.param = p;
        bp.state = info->state;
        bp.i_star = info->i_star;
        bp.stable = info->stable;
        bp.leading.assign(info->eigs.begin(),
                          info->eigs.begin() + std::min<std::size_t>(6, info->eigs.size()));
        out.branch.push_back(std::move(bp));

        prev2_state = prev_state;
        prev2_p = prev_p;
        prev_state = info->state;
        prev_p = p;

        if (p >= param_hi) break;
        step = std::min(step * 1.3, max_step);
        p = std::min(p + step, param_hi);
    }

    // Hopf detection: bisection on the sign of the leading complex pair's
    // real part between consecutive accepted points.
    auto alpha_at = [&](double q, const Eigen::VectorXd* seed) -> std::optional<double> {
        const OdeSystem sys = family(q);
        const auto info = analyze_equilibrium(sys, seed);
        if (!info) return std::nullopt;
        return info->alpha;
    };
    for (std::size_t k = 1; k < out.branch.size(); ++k) {
        const auto a_prev = leading_complex_real(out.branch[k - 1].leading);
        const auto a_here = leading_complex_real(out.branch[k].leading);
        if (!a_prev || !a_here) continue;
        if (*a_prev == 0.0 || (*a_prev) * (*a_here) >= 0.0) continue;
        double lo = out.branch[k - 1].param, hi = out.branch[k].param;
        const bool rising = *a_here > 0.0;
        Eigen::VectorXd seed = out.branch[k - 1].state;
        while (hi - lo > opts.param_tol * std::max(1.0, std::fabs(hi))) {
            const double mid = 0.5 * (lo + hi);
            const auto a_mid = alpha_at(mid, &seed);
            if (!a_mid) break;
            if ((*a_mid > 0.0) == rising)
                hi = mid;
            else
                lo = mid;
        }
        const double p_h = 0.5 * (lo + hi);
        const auto info = analyze_equilibrium(family(p_h), &seed);
        double omega = 0.0;
        if (info)
            for (const cplx& z : info->eigs)
                if (z.imag() > 1e-7) { omega = z.imag(); break; }
        out.bifurcations.push_back(
            BifurcationPoint{BifurcationPoint::Kind::hopf, p_h, omega});
    }
    std::sort(out.bifurcations.begin(), out.bifurcations.end(),
              [](const BifurcationPoint& a, const BifurcationPoint& b) {
                  return a.param < b.param;
              });
    return out;
}

std::vector<BoundaryPoint> hopf_boundary(const SystemFamily2& family,
                                         const std::vector<double>& p_grid, double q_lo,
                                         double q_hi, const BoundaryOptions& opts) {
    if (!(q_hi > q_lo)) throw invalid_parameter("hopf_boundary: empty q bracket");
    const int ns = std::max(3, opts.scan_points);

    std::vector<std::optional<BoundaryPoint>> slots(p_grid.size());
    std::vector<std::string> failures(p_grid.size());

    auto trace_one = [&](std::size_t idx) {
        const double p = p_grid[idx];
        auto alpha_at = [&](double q) -> std::optional<double> {
            const OdeSystem sys = family(p, q);
            const auto info = analyze_equilibrium(sys, nullptr);
            if (!info || !info->alpha) return std::nullopt;
            return info->alpha;
        };

        // Coarse scan to isolate the switch.
        std::vector<std::pair<double, double>> samples;
        for (int k = 0; k < ns; ++k) {
            const double q = q_lo + (q_hi - q_lo) * k / (ns - 1.0);
            const auto a = alpha_at(q);
            if (a) samples.emplace_back(q, *a);
        }
        int switches = 0;
        double lo = 0.0, hi = 0.0;
        for (std::size_t k = 1; k < samples.size(); ++k) {
            if (samples[k - 1].second * samples[k].second < 0.0) {
                ++switches;
                lo = samples[k - 1].first;
                hi = samples[k].first;
            }
        }
        if (switches == 0) return; // omitted: no stability switch at this p
        if (switches > 1) {
            std::ostringstream msg;
            msg << "hopf_boundary: " << switches << " stability switches at p = " << p
                << "; re-run with a finer q bracket";
            failures[idx] = msg.str();
            return;
        }
        const bool rising = alpha_at(hi).value() > 0.0;
        while (hi - lo > opts.q_tol) {
            const double mid = 0.5 * (lo + hi);
            const auto a_mid = alpha_at(mid);
            if (!a_mid) break;
            if ((*a_mid > 0.0) == rising)
                hi = mid;
            else
                lo = mid;
        }
        slots[idx] = BoundaryPoint{p, 0.5 * (lo + hi)};
    };

    if (opts.jobs <= 1) {
        for (std::size_t i = 0; i < p_grid.size(); ++i) trace_one(i);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::size_t> next{0};
        const int workers = std::min<int>(opts.jobs, static_cast<int>(p_grid.size()));
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < p_grid.size();
                     i = next.fetch_add(1))
                    trace_one(i);
            });
        for (auto& th : pool) th.join();
    }

    for (const auto& f : failures)
        if (!f.empty()) throw ambiguous_bracket(f);

    std::vector<BoundaryPoint> out;
    for (const auto& s : slots)
        if (s) out.push_back(*s);
    return out;
}

Criticality classify_hopf(const SystemFamily& family, const BifurcationPoint& hopf,
                          const ClassifyOptions& opts) {
    if (hopf.kind != BifurcationPoint::Kind::hopf)
        throw invalid_parameter("classify_hopf: not a Hopf point");
    if (opts.deltas.size() < 2)
        throw invalid_parameter("classify_hopf: need at least two offsets");

    const double p_h = hopf.param;
    auto alpha_at = [&](double p) -> std::optional<double> {
        try {
            const auto info = analyze_equilibrium(family(p), nullptr);
            if (!info) return std::nullopt;
            return info->alpha;
        } catch (const std::exception&) {
            return std::nullopt;
        }
    };

    const double d0 = opts.deltas.front();
    const auto a_plus = alpha_at(p_h * (1.0 + d0));
    const auto a_minus = alpha_at(p_h * (1.0 - d0));
    if (!a_plus || !a_minus || (*a_plus > 0.0) == (*a_minus > 0.0))
        return Criticality::unclassified;
    const double side_unstable = (*a_plus > 0.0) ? 1.0 : -1.0;

    auto horizon = [&](double alpha, double tau) {
        const double rate = std::max(std::fabs(alpha), 1e-5);
        return std::clamp(40.0 / rate, 50.0 * tau, opts.horizon_cap);
    };

    // Unstable side: small seed, measure the limiting orbit amplitude.
    std::vector<double> amplitudes;
    for (double delta : opts.deltas) {
        const double p = p_h * (1.0 + side_unstable * delta);
        try {
            const OdeSystem sys = family(p);
            const auto info = analyze_equilibrium(sys, nullptr);
            if (!info || !info->alpha) return Criticality::unclassified;
            const Eigen::VectorXd x0 = info->state * (1.0 + opts.perturbation);
            const double t_end = horizon(*info->alpha, sys.model.kernel.mean());
            const Trajectory traj = integrate(sys, x0, t_end, opts.integrate);
            const AttractorReport rep = classify_attractor(traj);
            if (rep.kind != AttractorReport::Kind::periodic) return Criticality::unclassified;
            amplitudes.push_back(rep.amplitude);
        } catch (const std::exception&) {
            return Criticality::unclassified;
        }
    }
    const double ratio = amplitudes.back() / amplitudes.front();
    if (ratio >= opts.amplitude_ratio_lo && ratio <= opts.amplitude_ratio_hi &&
        amplitudes.back() <= opts.small_amplitude_cap)
        return Criticality::supercritical;

    // Stable side: a far probe reaching a large-amplitude attractor marks the
    // coexisting stable orbit of a subcritical Hopf.
    try {
        const double p = p_h * (1.0 - side_unstable * d0);
        const OdeSystem sys = family(p);
        const auto info = analyze_equilibrium(sys, nullptr);
        if (!info || !info->alpha) return Criticality::unclassified;
        const double i_star = info->i_star;
        const double i0 = std::min(i_star + opts.far_probe_offset, 0.97);
        const double t_end = horizon(*info->alpha, sys.model.kernel.mean());
        const Trajectory traj = integrate(sys, sys.history_state(i0), t_end, opts.integrate);
        const AttractorReport rep = classify_attractor(traj);
        if (rep.kind == AttractorReport::Kind::periodic &&
            rep.amplitude >= opts.large_amplitude_min)
            return Criticality::subcritical;
    } catch (const std::exception&) {
        return Criticality::unclassified;
    }
    return Criticality::unclassified;
}

} // namespace agesis
