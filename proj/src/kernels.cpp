#include "agesis/kernels.hpp"
#include "agesis/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace agesis {

namespace detail {

namespace {
constexpr int kMaxIter = 600;
constexpr double kTiny = 1e-300;
} // namespace

// Series for the regularized lower incomplete gamma, P(a, x).
static double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double term = sum;
    for (int i = 0; i < kMaxIter; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * 1e-17) break;
    }
    const double lg = std::lgamma(a);
    return sum * std::exp(-x + a * std::log(x) - lg);
}

// Modified Lentz continued fraction for the regularized upper gamma, Q(a, x).
static double gamma_q_cf(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    const double lg = std::lgamma(a);
    return h * std::exp(-x + a * std::log(x) - lg);
}

double gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw invalid_parameter("gamma_p: need x >= 0 and shape > 0");
    if (x == 0.0) return 0.0;
    if (x <= a) return gamma_p_series(a, x);
    return 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw invalid_parameter("gamma_q: need x >= 0 and shape > 0");
    if (x == 0.0) return 1.0;
    if (x <= a) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

} // namespace detail

GammaKernel::GammaKernel(double tau, double shape) : tau_(tau), shape_(shape) {
    if (!(tau > 0.0)) throw invalid_parameter("GammaKernel: mean tau must be positive");
    if (!(shape > 0.0)) throw invalid_parameter("GammaKernel: shape j must be positive");
    rate_ = shape_ / tau_;
}

GammaKernel gamma_from_mean_shape(double tau, double shape) {
    return GammaKernel(tau, shape);
}

double GammaKernel::density(double a) const {
    if (a < 0.0) throw invalid_parameter("density: age must be nonnegative");
    if (a == 0.0) {
        if (shape_ > 1.0) return 0.0;
        if (shape_ == 1.0) return rate_;
        return std::numeric_limits<double>::infinity();
    }
    const double lg = shape_ * std::log(rate_) + (shape_ - 1.0) * std::log(a) - rate_ * a -
                      std::lgamma(shape_);
    return std::exp(lg);
}

double GammaKernel::survival(double a) const {
    if (a < 0.0) throw invalid_parameter("survival: age must be nonnegative");
    return detail::gamma_q(shape_, rate_ * a);
}

double GammaKernel::hazard(double a) const {
    if (a < 0.0) throw invalid_parameter("hazard: age must be nonnegative");
    const double surv = survival(a);
    if (surv <= 0.0) {
        std::ostringstream msg;
        msg << "hazard undefined: survival underflowed to 0 at age " << a;
        throw hazard_undefined(msg.str());
    }
    return density(a) / surv;
}

double GammaKernel::laplace_survival(double s) const {
    if (s <= -rate_) throw divergent_transform("laplace_survival: requires s > -rate");
    if (s == 0.0) return tau_;
    // (1 - (b/(b+s))^j)/s via expm1/log1p, cancellation-free for small s.
    return -std::expm1(-shape_ * std::log1p(s / rate_)) / s;
}

std::complex<double> GammaKernel::laplace_survival(std::complex<double> s) const {
    if (s.real() <= -rate_) throw divergent_transform("laplace_survival: requires Re s > -rate");
    const double mag = std::abs(s);
    if (mag <= 1e-5 * rate_) {
        // Taylor expansion in the raw moments: sum_k (-s)^k E[A^{k+1}]/(k+1)!
        const double b = rate_, j = shape_;
        const double m1 = tau_;
        const double m2 = j * (j + 1.0) / (b * b);
        const double m3 = j * (j + 1.0) * (j + 2.0) / (b * b * b);
        const double m4 = j * (j + 1.0) * (j + 2.0) * (j + 3.0) / (b * b * b * b);
        return m1 - s * (m2 / 2.0) + s * s * (m3 / 6.0) - s * s * s * (m4 / 24.0);
    }
    const std::complex<double> pow_term =
        std::exp(-shape_ * std::log(1.0 + s / rate_)); // principal branch, Re(1+s/b) > 0
    return (1.0 - pow_term) / s;
}

std::vector<double> HypoexpChain::rates() const {
    std::vector<double> r(static_cast<std::size_t>(stages) - 2, common_rate);
    r.push_back(nu);
    r.push_back(mu);
    return r;
}

double HypoexpChain::mean() const { return chain_moments(rates()).mean; }
double HypoexpChain::variance() const { return chain_moments(rates()).variance; }

ErlangChain erlang_round(const GammaKernel& kernel) {
    // Nearest integer with halves rounding up, clamped to at least one stage.
    const int m = std::max(1, static_cast<int>(std::floor(kernel.shape() + 0.5)));
    return ErlangChain{m, m / kernel.mean()};
}

HypoexpChain hypoexp_from_gamma(const GammaKernel& kernel) {
    const double j = kernel.shape();
    const double tau = kernel.mean();
    if (j < 1.0)
        throw unsupported_shape(
            "hypoexp_from_gamma: shape below 1 gives a non-positive tail rate");
    const int n = std::max(static_cast<int>(std::ceil(j)), 2);
    const double root = std::sqrt(n * (n - j) / (2.0 * j));
    if (!(root < 1.0))
        throw unsupported_shape(
            "hypoexp_from_gamma: shape 1 makes the tail rate diverge; use the Erlang chain");
    const double nu = 1.0 / ((tau / n) * (1.0 + root));
    const double mu = 1.0 / ((tau / n) * (1.0 - root));
    return HypoexpChain{n, n / tau, nu, mu};
}

ChainMoments chain_moments(const std::vector<double>& rates) {
    if (rates.empty()) throw invalid_parameter("chain_moments: empty chain");
    double mean = 0.0, var = 0.0;
    for (double r : rates) {
        if (!(r > 0.0)) throw invalid_parameter("chain_moments: rates must be positive");
        mean += 1.0 / r;
        var += 1.0 / (r * r);
    }
    return ChainMoments{mean, var};
}

double chain_laplace_survival(const std::vector<double>& rates, double s) {
    double log_prod = 0.0;
    for (double r : rates) {
        if (s <= -r) throw divergent_transform("chain_laplace_survival: requires s > -min rate");
        log_prod += std::log1p(s / r);
    }
    if (s == 0.0) return chain_moments(rates).mean;
    return -std::expm1(-log_prod) / s;
}

} // namespace agesis
