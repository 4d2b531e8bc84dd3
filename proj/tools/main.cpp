// Command-line front end: scenario configs in, CSV out.

#include "agesis/bifurcation.hpp"
#include "agesis/config.hpp"
#include "agesis/dynamics.hpp"
#include "agesis/errors.hpp"
#include "agesis/io.hpp"
#include "agesis/pseudospectral.hpp"
#include "agesis/reductions.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using namespace agesis;

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw config_error("cannot open output file " + path);
    return out;
}

std::string sibling_path(const std::string& out, const std::string& suffix) {
    const std::string ext = ".csv";
    if (out.size() > ext.size() && out.compare(out.size() - ext.size(), ext.size(), ext) == 0)
        return out.substr(0, out.size() - ext.size()) + suffix + ext;
    return out + suffix;
}

std::string resolve_out(const ScenarioConfig& cfg, const std::string& flag) {
    if (!flag.empty()) return flag;
    if (!cfg.output.empty()) return cfg.output;
    throw config_error("config: no output path (give --out or the output key)");
}

int cmd_info(const ScenarioConfig& cfg, const std::string& out_flag) {
    const ModelSpec model = config_model(cfg);
    const OdeSystem sys = config_system(cfg);
    const double r0 = reproduction_number(model);
    const EquilibriumPair eq = equilibria(model);

    std::ostringstream rep;
    rep << "tau          = " << io::fmt(model.kernel.mean()) << " months\n"
        << "shape_j      = " << io::fmt(model.kernel.shape()) << "\n"
        << "rate_b       = " << io::fmt(model.kernel.rate()) << " 1/month\n"
        << "variance     = " << io::fmt(model.kernel.variance()) << " months^2\n"
        << "kd           = " << io::fmt(model.infectivity.kd) << " 1/month\n"
        << "beta0        = " << io::fmt(model.infectivity.beta0) << " 1/month\n"
        << "R0           = " << io::fmt(r0) << "\n"
        << "malthusian_r = " << io::fmt(malthusian(model)) << " 1/month\n"
        << "DFE          = S*=1 I*=0\n";
    if (eq.ee) {
        rep << "EE           = S*=" << io::fmt(eq.ee->susceptible)
            << " I*=" << io::fmt(eq.ee->infected)
            << " incidence=" << io::fmt(eq.ee->incidence) << "\n";
    } else {
        rep << "EE           = absent (R0 <= 1)\n";
    }
    rep << "method       = " << sys.label << "\n"
        << "dimension    = " << sys.dim << "\n"
        << "R0_reduction = " << io::fmt(sys.r0_reduction) << "\n";

    if (!out_flag.empty() || !cfg.output.empty()) {
        auto out = open_out(out_flag.empty() ? cfg.output : out_flag);
        out << rep.str();
    }
    std::cout << rep.str();
    return 0;
}

int cmd_simulate(const ScenarioConfig& cfg, const std::string& out_flag) {
    if (cfg.i0.empty()) throw config_error("config: simulate needs at least one i0 entry");
    const OdeSystem sys = config_system(cfg);
    IntegrateOptions opts;
    opts.rel_tol = cfg.rel_tol;
    opts.abs_tol = cfg.abs_tol;
    const Trajectory traj = integrate(sys, sys.history_state(cfg.i0.front()), cfg.t_end, opts);
    const AttractorReport rep = classify_attractor(traj);

    auto out = open_out(resolve_out(cfg, out_flag));
    out << "t,S,I,Lambda,incidence";
    if (cfg.stages)
        for (const auto& name : sys.state_names) out << ',' << name;
    out << '\n';
    const int skip = cfg.stages ? 0 : -1;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        out << io::fmt(traj.t[k]) << ',' << io::fmt(traj.S[k]) << ',' << io::fmt(traj.I[k])
            << ',' << io::fmt(traj.Lambda[k]) << ',' << io::fmt(traj.incidence[k]);
        if (skip == 0) {
            // leading I/Lambda columns of chain states duplicate the observables
            const int base = (sys.label == "pseudospectral") ? 0 : 2;
            for (int c = base; c < sys.dim; ++c) out << ',' << io::fmt(traj.states(k, c));
        }
        out << '\n';
    }
    out << "# attractor: " << to_string(rep.kind);
    if (rep.kind == AttractorReport::Kind::equilibrium)
        out << " I_inf=" << io::fmt(rep.i_inf);
    if (rep.kind == AttractorReport::Kind::periodic)
        out << " amplitude=" << io::fmt(rep.amplitude) << " period=" << io::fmt(rep.period);
    out << " window=[" << io::fmt(rep.window_start) << ',' << io::fmt(rep.window_end) << "]\n";
    out << "# solver: accepted=" << traj.stats.accepted << " rejected=" << traj.stats.rejected
        << "\n";

    // Warn when the leading eigenvalue cannot settle within the window.
    if (sys.r0_reduction > 1.0) {
        try {
            const auto eigs = spectrum(linearize(sys, find_equilibrium(sys, sys.ee_state())));
            if (!eigs.empty()) {
                const double rate = std::fabs(eigs.front().real());
                if (rate > 0.0 && rate * cfg.t_end < 20.0)
                    out << "# warning: leading eigenvalue magnitude " << io::fmt(rate)
                        << " implies undersampling; extend t_end beyond "
                        << io::fmt(20.0 / rate) << "\n";
            }
        } catch (const no_convergence&) {
        }
    }
    return 0;
}

int cmd_eigs(const ScenarioConfig& cfg, const std::string& out_flag, bool full_spectrum) {
    const OdeSystem sys = config_system(cfg);
    const Eigen::VectorXd state =
        (sys.r0_reduction > 1.0) ? find_equilibrium(sys, sys.ee_state()) : sys.dfe_state();
    auto eigs = spectrum(linearize(sys, state));
    if (!full_spectrum && eigs.size() > 6) eigs.resize(6);

    auto out = open_out(resolve_out(cfg, out_flag));
    out << "re,im\n";
    for (const auto& z : eigs) out << io::fmt(z.real()) << ',' << io::fmt(z.imag()) << '\n';
    out << "# equilibrium: " << ((sys.r0_reduction > 1.0) ? "EE" : "DFE")
        << " I=" << io::fmt(sys.observe(state).I) << "\n";
    return 0;
}

int cmd_continue(const ScenarioConfig& cfg, const std::string& out_flag) {
    if (!cfg.sweep) throw config_error("config: continue needs a sweep section");
    const SystemFamily family = config_family(cfg);
    ContinuationOptions copts;
    copts.initial_step = (cfg.sweep->to - cfg.sweep->from) / cfg.sweep->steps;
    ContinuationResult res = continue_equilibrium(family, cfg.sweep->from, cfg.sweep->to, copts);

    if (cfg.classify) {
        ClassifyOptions clopts;
        clopts.integrate.rel_tol = cfg.rel_tol;
        clopts.integrate.abs_tol = cfg.abs_tol;
        for (auto& bif : res.bifurcations)
            if (bif.kind == BifurcationPoint::Kind::hopf)
                bif.criticality = classify_hopf(family, bif, clopts);
    }

    const std::string branch_path = resolve_out(cfg, out_flag);
    auto out = open_out(branch_path);
    out << "param,I_star,re_lambda1,im_lambda1,stable\n";
    for (const auto& bp : res.branch) {
        const auto lead = bp.leading.empty() ? std::complex<double>(0, 0) : bp.leading.front();
        out << io::fmt(bp.param) << ',' << io::fmt(bp.i_star) << ',' << io::fmt(lead.real())
            << ',' << io::fmt(std::fabs(lead.imag())) << ',' << (bp.stable ? 1 : 0) << '\n';
    }

    auto bout = open_out(sibling_path(branch_path, "_bifurcations"));
    bout << "kind,param,omega,criticality\n";
    for (const auto& bif : res.bifurcations) {
        const bool hopf = bif.kind == BifurcationPoint::Kind::hopf;
        bout << (hopf ? "hopf" : "transcritical") << ',' << io::fmt(bif.param) << ','
             << io::fmt(bif.omega) << ',' << (hopf ? to_string(bif.criticality) : "") << '\n';
    }
    return 0;
}

int cmd_boundary(const ScenarioConfig& cfg, const std::string& out_flag, int jobs) {
    if (!cfg.grid) throw config_error("config: boundary needs a grid section");
    const SystemFamily2 family = config_family2(cfg);
    std::vector<double> p_grid;
    const auto& g = *cfg.grid;
    for (int k = 0; k < g.p_points; ++k)
        p_grid.push_back(g.p_points == 1
                             ? g.p_from
                             : g.p_from + (g.p_to - g.p_from) * k / (g.p_points - 1.0));
    BoundaryOptions bopts;
    bopts.jobs = jobs;
    const auto boundary = hopf_boundary(family, p_grid, g.q_from, g.q_to, bopts);

    auto out = open_out(resolve_out(cfg, out_flag));
    out << "p,q_hopf\n";
    for (const auto& bp : boundary) out << io::fmt(bp.p) << ',' << io::fmt(bp.q_hopf) << '\n';
    return 0;
}

int cmd_bistability(const ScenarioConfig& cfg, const std::string& out_flag) {
    if (cfg.i0.empty()) throw config_error("config: bistability needs a nonempty i0 list");
    const OdeSystem sys = config_system(cfg);
    IntegrateOptions opts;
    opts.rel_tol = cfg.rel_tol;
    opts.abs_tol = cfg.abs_tol;
    const auto results = bistability_probe(sys, cfg.i0, cfg.t_end, opts);

    auto out = open_out(resolve_out(cfg, out_flag));
    out << "I0,kind,I_inf,amplitude,period\n";
    for (const auto& res : results) {
        if (res.report) {
            const auto& r = *res.report;
            out << io::fmt(res.i0) << ',' << to_string(r.kind) << ',' << io::fmt(r.i_inf) << ','
                << io::fmt(r.amplitude) << ',' << io::fmt(r.period) << '\n';
        } else {
            out << io::fmt(res.i0) << ",error,0,0,0\n";
        }
    }
    for (const auto& res : results)
        if (!res.error.empty())
            out << "# probe " << io::fmt(res.i0) << " failed: " << res.error << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Infection-age structured SIS model: reductions, simulation and "
                 "bifurcation analysis"};
    app.require_subcommand(1);

    std::string config_path, out_path;
    int jobs = 1;
    bool full_spectrum = false;

    auto add_common = [&](CLI::App* sub, bool needs_out_flag) {
        sub->add_option("--config", config_path, "scenario file (key = value lines)")
            ->required();
        sub->add_option("--out", out_path, "output path");
        (void)needs_out_flag;
        return sub;
    };

    auto* info = add_common(app.add_subcommand("info", "model summary"), false);
    auto* simulate = add_common(app.add_subcommand("simulate", "trajectory CSV"), true);
    auto* eigs = add_common(app.add_subcommand("eigs", "equilibrium eigenvalues"), true);
    eigs->add_flag("--full-spectrum", full_spectrum, "emit all eigenvalues, not the top 6");
    auto* cont = add_common(app.add_subcommand("continue", "one-parameter branch"), true);
    auto* boundary = add_common(app.add_subcommand("boundary", "two-parameter Hopf curve"), true);
    boundary->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    auto* bistab = add_common(app.add_subcommand("bistability", "probe initial conditions"), true);
    bistab->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        const agesis::ScenarioConfig cfg = agesis::load_config(config_path);
        if (info->parsed()) return cmd_info(cfg, out_path);
        if (simulate->parsed()) return cmd_simulate(cfg, out_path);
        if (eigs->parsed()) return cmd_eigs(cfg, out_path, full_spectrum);
        if (cont->parsed()) return cmd_continue(cfg, out_path);
        if (boundary->parsed()) return cmd_boundary(cfg, out_path, jobs);
        if (bistab->parsed()) return cmd_bistability(cfg, out_path);
    } catch (const agesis::config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const agesis::invalid_parameter& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
