#pragma once

#include <complex>
#include <vector>

namespace agesis {

/**
 * Gamma-distributed sojourn time in the infected class.
 *
 * Parameterized by mean tau (months) and shape j (any positive real), so the
 * rate is b = j/tau and the variance tau^2/j. Shape 1 is the exponential
 * kernel of the classic SIS model; large shapes approach a fixed duration.
 */
class GammaKernel {
public:
    GammaKernel(double tau, double shape);

    double mean() const { return tau_; }
    double shape() const { return shape_; }
    double rate() const { return rate_; }
    double variance() const { return tau_ * tau_ / shape_; }

    /// Probability density K(a) of the sojourn time.
    double density(double a) const;

    /// Survival probability F(a) = 1 - int_0^a K(s) ds, in [0,1].
    double survival(double a) const;

    /// Hazard rate K(a)/F(a); throws hazard_undefined once F underflows to 0.
    double hazard(double a) const;

    /// int_0^infty e^{-s a} F(a) da = (1 - (b/(b+s))^j)/s, with the s=0 limit
    /// tau. Requires s > -b.
    double laplace_survival(double s) const;

    /// Same transform for complex s with Re s > -b.
    std::complex<double> laplace_survival(std::complex<double> s) const;

private:
    double tau_;
    double shape_;
    double rate_;
};

/// Kernel from mean and shape; throws invalid_parameter unless both positive.
GammaKernel gamma_from_mean_shape(double tau, double shape);

/// Erlang chain: m equal exponential stages of rate m/tau. Mean is preserved
/// exactly; the variance becomes tau^2/m.
struct ErlangChain {
    int stages;
    double rate;

    std::vector<double> rates() const { return std::vector<double>(stages, rate); }
    double mean() const { return stages / rate; }
    double variance() const { return stages / (rate * rate); }
};

/**
 * Hypoexponential chain matching the first two moments of a gamma kernel:
 * n-2 stages at the common rate n/tau followed by one stage at rate nu and
 * one at rate mu.
 */
struct HypoexpChain {
    int stages;         // n >= 2
    double common_rate; // n/tau, used for the first n-2 stages
    double nu;
    double mu;

    std::vector<double> rates() const;
    double mean() const;
    double variance() const;
};

/// Round the shape to the nearest integer (halves round up, minimum 1) and
/// rescale the rate so the mean is preserved exactly.
ErlangChain erlang_round(const GammaKernel& kernel);

/// Two-rate moment-matched chain. Requires shape > 1: below 1 the tail-rate
/// formula turns non-positive (a hypoexponential cannot have coefficient of
/// variation above 1), and at exactly 1 the tail rate diverges.
HypoexpChain hypoexp_from_gamma(const GammaKernel& kernel);

struct ChainMoments {
    double mean;
    double variance;
};

/// mean = sum 1/rate_i, variance = sum 1/rate_i^2 over the stages.
ChainMoments chain_moments(const std::vector<double>& rates);

/// int_0^infty e^{-s a} F_chain(a) da for the phase-type survival of a chain,
/// i.e. (1 - prod_i rate_i/(rate_i + s))/s with the s=0 limit sum 1/rate_i.
double chain_laplace_survival(const std::vector<double>& rates, double s);

namespace detail {
/// Regularized lower incomplete gamma P(shape, x); series for x <= shape,
/// continued fraction above. Absolute accuracy ~1e-14.
double gamma_p(double shape, double x);
/// Regularized upper incomplete gamma Q(shape, x) = 1 - P(shape, x).
double gamma_q(double shape, double x);
} // namespace detail

} // namespace agesis
