#pragma once

#include "agesis/kernels.hpp"

#include <complex>
#include <functional>
#include <optional>
#include <vector>

namespace agesis {

/// Infectivity beta(a) = beta0 * exp(-kd * a) as a function of infection age.
struct InfectivityProfile {
    double beta0; // 1/month, maximal infectivity
    double kd;    // 1/month, infectivity decay rate

    double operator()(double a) const;
};

/// One model instance: sojourn kernel plus infectivity profile.
struct ModelSpec {
    GammaKernel kernel;
    InfectivityProfile infectivity;
};

ModelSpec make_model(double tau, double shape, double kd, double beta0);

/// R0 = beta0 * int_0^infty e^{-kd a} F(a) da.
double reproduction_number(const ModelSpec& model);

/// beta0 such that reproduction_number reproduces the requested R0.
double calibrate_beta0(const GammaKernel& kernel, double kd, double r0);

/// Model from (tau, j, kd) with beta0 calibrated to the requested R0.
ModelSpec model_from_r0(double tau, double shape, double kd, double r0);

/// Unique real root of the growth-rate equation F(lambda) = 1; bracketed by
/// bisection, then polished by Newton to |F(r) - 1| <= 1e-12.
double malthusian(const ModelSpec& model);

struct Equilibrium {
    enum class Kind { DFE, EE };
    Kind kind;
    double susceptible; // S*
    double incidence;   // x* = i(t,0), 1/month
    double infected;    // I* = 1 - S*
};

struct EquilibriumPair {
    Equilibrium dfe;
    std::optional<Equilibrium> ee; // present iff R0 > 1
};

EquilibriumPair equilibria(const ModelSpec& model);

/**
 * Residual of the endemic-equilibrium characteristic equation,
 *   1 - [ ((1-R0)/tau) L_F(lambda) + (beta0/R0) L_F(kd + lambda) ],
 * where L_F is the Laplace transform of the survival function. A value of
 * zero marks a characteristic root. Requires Re(lambda) > -b.
 */
std::complex<double> ee_char(const ModelSpec& model, std::complex<double> lambda);

/// Residual of the disease-free characteristic (growth-rate) equation,
/// 1 - beta0 L_F(kd + lambda). Its rightmost root is the Malthusian parameter.
std::complex<double> dfe_char(const ModelSpec& model, std::complex<double> lambda);

/// Newton-polish a characteristic root from a seed; returns the root, or
/// throws no_convergence. `f` must be analytic near the root.
std::complex<double> polish_char_root(
    const std::function<std::complex<double>(std::complex<double>)>& f,
    std::complex<double> seed, double tol = 1e-12);

struct RootRect {
    double re_lo, re_hi;
    double im_lo, im_hi;
};

/// Grid-seeded Newton search for roots of `f` inside a rectangle; roots are
/// deduplicated within 1e-6 and returned sorted by descending real part.
std::vector<std::complex<double>> find_char_roots(
    const std::function<std::complex<double>(std::complex<double>)>& f,
    const RootRect& rect, int grid = 40);

/// Parameter freed in hopf_oracle sweeps.
enum class FreeParam { shape, kd, r0 };

/// Fixed model data for hopf_oracle; the freed entry is ignored.
struct HopfFamily {
    double tau;
    double shape;
    double kd;
    double r0;
    FreeParam free_param;

    ModelSpec at(double p) const;
};

struct HopfRoot {
    double param;
    double omega; // angular frequency, 1/month
};

/**
 * All parameter values inside [bracket_lo, bracket_hi] at which the endemic
 * characteristic equation has a purely imaginary root pair, found by damped
 * Newton on (Re, Im) of ee_char(i omega) from grid seeds. Residuals are
 * polished below 1e-10. Returns crossings sorted by parameter; empty when
 * none exist.
 */
std::vector<HopfRoot> hopf_scan(const HopfFamily& family, double bracket_lo, double bracket_hi);

/// First crossing in the bracket; throws no_crossing when the scan is empty.
HopfRoot hopf_oracle(const HopfFamily& family, double bracket_lo, double bracket_hi);

} // namespace agesis
