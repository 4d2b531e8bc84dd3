// Test-only oracles, kept independent of the library's evaluation paths.
#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

namespace oracles {

// Adaptive Simpson quadrature with Richardson acceptance.
inline double simpson_rec(const std::function<double(double)>& f, double a, double b,
                          double fa, double fm, double fb, double whole, double tol,
                          int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0) throw std::runtime_error("adaptive simpson: depth exhausted");
    if (std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-13) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 60);
}

// Integrate f over [0, infinity) by splitting at the decay scale and walking
// blocks until they stop contributing.
inline double integrate_halfline(const std::function<double(double)>& f, double block,
                                 double tol = 1e-13) {
    double total = 0.0, a = 0.0;
    for (int k = 0; k < 200; ++k) {
        const double piece = integrate(f, a, a + block, tol);
        total += piece;
        a += block;
        if (k > 2 && std::fabs(piece) < tol * std::max(1.0, std::fabs(total))) break;
    }
    return total;
}

// Survival of a gamma kernel with *integer* shape: the upper tail of the
// Poisson distribution, Q(m, x) = sum_{k<m} e^{-x} x^k / k!.
inline double erlang_survival(int m, double x) {
    double term = std::exp(-x);
    double sum = term;
    for (int k = 1; k < m; ++k) {
        term *= x / k;
        sum += term;
    }
    return sum;
}

// Closed-form solution of the classic SIS model dI/dt = beta I (1-I) - I/tau:
// a logistic with rate r = beta - 1/tau and carrying capacity 1 - 1/(beta tau).
inline double sis_logistic(double beta, double tau, double i0, double t) {
    const double r = beta - 1.0 / tau;
    const double cap = r / beta;
    return cap / (1.0 + (cap / i0 - 1.0) * std::exp(-r * t));
}

} // namespace oracles
