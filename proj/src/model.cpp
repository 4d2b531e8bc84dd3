#include "agesis/model.hpp"
#include "agesis/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

namespace agesis {

namespace {

using cplx = std::complex<double>;

// Growth-rate function F(lambda) = beta0 * L_F(kd + lambda), real lambda.
double growth_function(const ModelSpec& model, double lambda) {
    return model.infectivity.beta0 * model.kernel.laplace_survival(model.infectivity.kd + lambda);
}

// d/dlambda of (1 - u^j)/(kd+lambda) with u = b/(b+kd+lambda), real arguments.
double growth_function_deriv(const ModelSpec& model, double lambda) {
    const double b = model.kernel.rate();
    const double j = model.kernel.shape();
    const double z = model.infectivity.kd + lambda;
    const double u = b / (b + z);
    const double uj = std::pow(u, j);
    if (std::fabs(z) < 1e-8 * b) {
        // L'(0) = -E[A^2]/2
        const double m2 = j * (j + 1.0) / (b * b);
        return -model.infectivity.beta0 * m2 / 2.0;
    }
    const double lf = -std::expm1(-j * std::log1p(z / b)) / z;
    return model.infectivity.beta0 * (-lf / z + j * uj / ((b + z) * z));
}

} // namespace

double InfectivityProfile::operator()(double a) const {
    return beta0 * std::exp(-kd * a);
}

ModelSpec make_model(double tau, double shape, double kd, double beta0) {
    if (kd < 0.0) throw invalid_parameter("make_model: kd must be nonnegative");
    if (beta0 < 0.0) throw invalid_parameter("make_model: beta0 must be nonnegative");
    return ModelSpec{GammaKernel(tau, shape), InfectivityProfile{beta0, kd}};
}

double reproduction_number(const ModelSpec& model) {
    return model.infectivity.beta0 * model.kernel.laplace_survival(model.infectivity.kd);
}

double calibrate_beta0(const GammaKernel& kernel, double kd, double r0) {
    if (!(r0 > 0.0)) throw invalid_parameter("calibrate_beta0: R0 must be positive");
    if (kd < 0.0) throw invalid_parameter("calibrate_beta0: kd must be nonnegative");
    return r0 / kernel.laplace_survival(kd);
}

ModelSpec model_from_r0(double tau, double shape, double kd, double r0) {
    GammaKernel kernel(tau, shape);
    return ModelSpec{kernel, InfectivityProfile{calibrate_beta0(kernel, kd, r0), kd}};
}

double malthusian(const ModelSpec& model) {
    const double r0 = reproduction_number(model);
    if (!(r0 > 0.0)) throw no_convergence("malthusian: R0 = 0 admits no growth-rate root");

    const double b = model.kernel.rate();
    const double kd = model.infectivity.kd;

    // F is monotone decreasing on (-(b+kd), inf) with F -> +inf at the left
    // limit, so a bracket always exists.
    double lo = -std::min(b, b + kd) + 1e-12 * b;
    if (growth_function(model, lo) < 1.0) {
        const double limit = -(b + kd);
        double frac = 0.5;
        while (growth_function(model, limit + frac * (lo - limit)) < 1.0) {
            frac *= 0.5;
            if (frac < 1e-300) throw no_convergence("malthusian: bracketing failed at left limit");
        }
        lo = limit + frac * (lo - limit);
    }
    double hi = std::max(1.0 / model.kernel.mean(), lo + 1.0);
    while (growth_function(model, hi) >= 1.0) {
        hi *= 2.0;
        if (hi > 1e12) throw no_convergence("malthusian: no upper bracket found");
    }

    for (int i = 0; i < 200 && hi - lo > 1e-6 * std::max(1.0, std::fabs(lo)); ++i) {
        const double mid = 0.5 * (lo + hi);
        (growth_function(model, mid) >= 1.0 ? lo : hi) = mid;
    }

    double r = 0.5 * (lo + hi);
    for (int i = 0; i < 60; ++i) {
        const double f = growth_function(model, r) - 1.0;
        if (std::fabs(f) <= 1e-13) break;
        const double df = growth_function_deriv(model, r);
        const double step = f / df;
        r -= step;
        if (!(r > -(b + kd))) r = 0.5 * (lo + hi); // fall back inside the bracket
    }
    if (std::fabs(growth_function(model, r) - 1.0) > 1e-12)
        throw no_convergence("malthusian: Newton polish did not reach 1e-12");
    return r;
}

EquilibriumPair equilibria(const ModelSpec& model) {
    const double r0 = reproduction_number(model);
    const double tau = model.kernel.mean();
    EquilibriumPair out{Equilibrium{Equilibrium::Kind::DFE, 1.0, 0.0, 0.0}, std::nullopt};
    if (r0 > 1.0) {
        const double s_star = 1.0 / r0;
        const double i_star = 1.0 - s_star;
        out.ee = Equilibrium{Equilibrium::Kind::EE, s_star, i_star / tau, i_star};
    }
    return out;
}

std::complex<double> ee_char(const ModelSpec& model, cplx lambda) {
    const double r0 = reproduction_number(model);
    const double tau = model.kernel.mean();
    const double kd = model.infectivity.kd;
    const cplx lf = model.kernel.laplace_survival(lambda);
    const cplx lf_kd = model.kernel.laplace_survival(lambda + kd);
    return 1.0 - ((1.0 - r0) / tau * lf + model.infectivity.beta0 / r0 * lf_kd);
}

std::complex<double> dfe_char(const ModelSpec& model, cplx lambda) {
    return 1.0 - model.infectivity.beta0 *
                     model.kernel.laplace_survival(lambda + model.infectivity.kd);
}

std::complex<double> polish_char_root(
    const std::function<cplx(cplx)>& f, cplx seed, double tol) {
    cplx z = seed;
    for (int i = 0; i < 100; ++i) {
        const cplx fz = f(z);
        if (std::abs(fz) <= tol) return z;
        const double h = 1e-7 * std::max(1.0, std::abs(z));
        const cplx df = (f(z + h) - f(z - h)) / (2.0 * h);
        if (std::abs(df) == 0.0) break;
        z -= fz / df;
    }
    if (std::abs(f(z)) <= tol) return z;
    throw no_convergence("polish_char_root: Newton did not converge from the given seed");
}

std::vector<std::complex<double>> find_char_roots(
    const std::function<cplx(cplx)>& f, const RootRect& rect, int grid) {
    std::vector<cplx> roots;
    const double dre = (rect.re_hi - rect.re_lo) / (grid - 1);
    const double dim = (rect.im_hi - rect.im_lo) / (grid - 1);
    for (int i = 0; i < grid; ++i) {
        for (int k = 0; k < grid; ++k) {
            const cplx seed(rect.re_lo + i * dre, rect.im_lo + k * dim);
            cplx z;
            try {
                z = polish_char_root(f, seed, 1e-11);
            } catch (const no_convergence&) {
                continue;
            }
            if (z.real() < rect.re_lo - 1e-9 || z.real() > rect.re_hi + 1e-9) continue;
            if (std::fabs(z.imag()) > rect.im_hi + 1e-9) continue;
            if (z.imag() < 0.0) z = std::conj(z); // keep the upper-half representative
            bool seen = false;
            for (const cplx& r : roots)
                if (std::abs(r - z) < 1e-6) { seen = true; break; }
            if (!seen) roots.push_back(z);
        }
    }
    std::sort(roots.begin(), roots.end(), [](const cplx& a, const cplx& b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
    return roots;
}

ModelSpec HopfFamily::at(double p) const {
    double j = shape, k = kd, R = r0;
    switch (free_param) {
        case FreeParam::shape: j = p; break;
        case FreeParam::kd: k = p; break;
        case FreeParam::r0: R = p; break;
    }
    return model_from_r0(tau, j, k, R);
}

std::vector<HopfRoot> hopf_scan(const HopfFamily& family, double lo, double hi) {
    if (!(hi > lo)) throw invalid_parameter("hopf_scan: empty bracket");

    const double omega_hi = 4.0 * M_PI / family.tau;
    const double omega_floor = 1e-3 / family.tau;

    auto residual = [&](double p, double omega, double* re, double* im) -> bool {
        if (!(p > 0.0)) return false;
        if (family.free_param == FreeParam::r0 && !(p > 1.0)) return false;
        try {
            const ModelSpec m = family.at(p);
            const cplx g = ee_char(m, cplx(0.0, omega));
            *re = g.real();
            *im = g.imag();
            return true;
        } catch (const std::exception&) {
            return false;
        }
    };

    std::vector<HopfRoot> crossings;
    const int np = 25, nw = 25;
    for (int i = 0; i < np; ++i) {
        for (int k = 1; k <= nw; ++k) {
            double p = lo + (hi - lo) * i / (np - 1.0);
            double w = omega_hi * k / static_cast<double>(nw);

            // Damped Newton on (Re G, Im G)(p, omega).
            bool ok = false;
            for (int it = 0; it < 80; ++it) {
                double f1, f2;
                if (!residual(p, w, &f1, &f2)) break;
                const double norm0 = std::hypot(f1, f2);
                if (norm0 <= 1e-12) { ok = true; break; }
                const double hp = 1e-7 * std::max(1.0, std::fabs(p));
                const double hw = 1e-7 * std::max(1.0, std::fabs(w));
                double a1, a2, b1, b2, c1, c2, d1, d2;
                if (!residual(p + hp, w, &a1, &a2) || !residual(p - hp, w, &b1, &b2) ||
                    !residual(p, w + hw, &c1, &c2) || !residual(p, w - hw, &d1, &d2))
                    break;
                const double j11 = (a1 - b1) / (2 * hp), j12 = (c1 - d1) / (2 * hw);
                const double j21 = (a2 - b2) / (2 * hp), j22 = (c2 - d2) / (2 * hw);
                const double det = j11 * j22 - j12 * j21;
                if (std::fabs(det) < 1e-300) break;
                double dp = (f1 * j22 - f2 * j12) / det;
                double dw = (j11 * f2 - j21 * f1) / det;
                double damp = 1.0;
                for (int bt = 0; bt < 40; ++bt) {
                    double g1, g2;
                    if (residual(p - damp * dp, w - damp * dw, &g1, &g2) &&
                        std::hypot(g1, g2) < norm0) {
                        p -= damp * dp;
                        w -= damp * dw;
                        break;
                    }
                    damp *= 0.5;
                    if (bt == 39) it = 80; // stalled
                }
            }
            if (!ok) continue;
            if (w < 0.0) w = -w;
            if (p < lo - 1e-9 || p > hi + 1e-9 || w <= omega_floor || w > omega_hi * 1.5) continue;
            bool seen = false;
            for (const auto& c : crossings)
                if (std::fabs(c.param - p) < 1e-6 * std::max(1.0, std::fabs(p)) &&
                    std::fabs(c.omega - w) < 1e-5)
                    { seen = true; break; }
            if (!seen) crossings.push_back(HopfRoot{p, w});
        }
    }
    std::sort(crossings.begin(), crossings.end(),
              [](const HopfRoot& a, const HopfRoot& b) { return a.param < b.param; });
    return crossings;
}

HopfRoot hopf_oracle(const HopfFamily& family, double lo, double hi) {
    const auto crossings = hopf_scan(family, lo, hi);
    if (crossings.empty())
        throw no_crossing("hopf_oracle: no purely imaginary root pair inside bracket");
    return crossings.front();
}

} // namespace agesis
