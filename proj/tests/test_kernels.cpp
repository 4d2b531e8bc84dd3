#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "agesis/errors.hpp"
#include "agesis/kernels.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace agesis;

TEST_CASE("gamma kernel construction and moments") {
    const GammaKernel k = gamma_from_mean_shape(5.0, 20.0);
    CHECK(k.rate() == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(k.variance() == doctest::Approx(1.25).epsilon(1e-14));

    const GammaKernel expo = gamma_from_mean_shape(5.0, 1.0);
    CHECK(expo.rate() == doctest::Approx(0.2).epsilon(1e-14));

    const GammaKernel frac = gamma_from_mean_shape(5.0, 8.32);
    CHECK(frac.rate() == doctest::Approx(1.664).epsilon(1e-14));
    CHECK(frac.variance() == doctest::Approx(25.0 / 8.32).epsilon(1e-14));

    CHECK_THROWS_AS(gamma_from_mean_shape(-1.0, 2.0), invalid_parameter);
    CHECK_THROWS_AS(gamma_from_mean_shape(5.0, 0.0), invalid_parameter);
}

TEST_CASE("kernel moments agree with quadrature of the density") {
    const GammaKernel k = gamma_from_mean_shape(5.0, 8.32);
    const double mean =
        oracles::integrate_halfline([&](double a) { return a * k.density(a); }, 5.0);
    const double second =
        oracles::integrate_halfline([&](double a) { return a * a * k.density(a); }, 5.0);
    CHECK(mean == doctest::Approx(5.0).epsilon(1e-10));
    CHECK(second - mean * mean == doctest::Approx(k.variance()).epsilon(1e-9));
}

TEST_CASE("survival: exponential case, age zero, integer-shape Poisson tail") {
    const GammaKernel expo = gamma_from_mean_shape(5.0, 1.0);
    CHECK(expo.survival(5.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-13));
    CHECK(expo.survival(0.0) == 1.0);

    const GammaKernel sharp = gamma_from_mean_shape(5.0, 20.0);
    CHECK(sharp.survival(0.0) == 1.0);
    // Q(20, 20) via the finite Poisson tail sum.
    const double tail = oracles::erlang_survival(20, 20.0);
    CHECK(sharp.survival(5.0) == doctest::Approx(tail).epsilon(1e-13));
    CHECK(tail == doctest::Approx(0.47025726683924).epsilon(1e-12));

    CHECK_THROWS_AS(sharp.survival(-0.1), invalid_parameter);
}

TEST_CASE("survival is nonincreasing with limits 1 and 0") {
    for (double j : {0.7, 1.0, 2.5, 8.32, 20.0}) {
        const GammaKernel k = gamma_from_mean_shape(5.0, j);
        double prev = 1.0;
        for (double a = 0.0; a <= 60.0; a += 0.25) {
            const double s = k.survival(a);
            CHECK(s <= prev + 1e-14);
            CHECK(s >= 0.0);
            CHECK(s <= 1.0);
            prev = s;
        }
        CHECK(k.survival(300.0) < 1e-12);
    }
}

TEST_CASE("hazard: exponential constant, shape>1 vanishes at 0, integer closed form") {
    const GammaKernel expo = gamma_from_mean_shape(5.0, 1.0);
    for (double a : {0.0, 1.0, 7.5, 20.0})
        CHECK(expo.hazard(a) == doctest::Approx(0.2).epsilon(1e-12));

    const GammaKernel two = gamma_from_mean_shape(2.0, 2.0);
    CHECK(two.hazard(0.0) == 0.0);
    CHECK(two.hazard(1e-9) == doctest::Approx(0.0).epsilon(1e-6));

    const GammaKernel sharp = gamma_from_mean_shape(5.0, 20.0);
    const double dens = sharp.density(5.0);
    const double surv = oracles::erlang_survival(20, 20.0);
    CHECK(sharp.hazard(5.0) == doctest::Approx(dens / surv).epsilon(1e-12));

    // Far in the tail the survival underflows and the hazard must refuse.
    CHECK_THROWS_AS(sharp.hazard(1e6), hazard_undefined);
}

TEST_CASE("laplace_survival closed form and limits") {
    const GammaKernel sharp = gamma_from_mean_shape(5.0, 20.0);
    CHECK(sharp.laplace_survival(0.0) == doctest::Approx(5.0).epsilon(1e-14));

    const GammaKernel expo = gamma_from_mean_shape(5.0, 1.0);
    CHECK(expo.laplace_survival(0.2) == doctest::Approx(2.5).epsilon(1e-13));

    const double expected = (1.0 - std::pow(4.0 / 6.0, 20.0)) / 2.0;
    CHECK(sharp.laplace_survival(2.0) == doctest::Approx(expected).epsilon(1e-13));

    CHECK_THROWS_AS(sharp.laplace_survival(-4.0), divergent_transform);
    CHECK_THROWS_AS(sharp.laplace_survival(-5.0), divergent_transform);
}

TEST_CASE("laplace_survival agrees with adaptive quadrature of e^{-sa}F(a)") {
    for (double j : {1.2, 2.5, 8.32, 20.0}) {
        const GammaKernel k = gamma_from_mean_shape(5.0, j);
        for (double s : {0.1, 1.0, 10.0}) {
            const double quad = oracles::integrate_halfline(
                [&](double a) { return std::exp(-s * a) * k.survival(a); },
                std::min(5.0, 3.0 / s), 1e-14);
            CHECK(k.laplace_survival(s) == doctest::Approx(quad).epsilon(1e-10));
        }
    }
}

TEST_CASE("laplace_survival complex path matches real path on the real axis") {
    const GammaKernel k = gamma_from_mean_shape(5.0, 8.32);
    for (double s : {1e-9, 1e-3, 0.5, 3.0}) {
        const std::complex<double> z = k.laplace_survival(std::complex<double>(s, 0.0));
        CHECK(z.real() == doctest::Approx(k.laplace_survival(s)).epsilon(1e-11));
        CHECK(std::fabs(z.imag()) < 1e-15);
    }
    // conjugate symmetry
    const auto zp = k.laplace_survival(std::complex<double>(0.3, 1.7));
    const auto zm = k.laplace_survival(std::complex<double>(0.3, -1.7));
    CHECK(zp.real() == doctest::Approx(zm.real()).epsilon(1e-14));
    CHECK(zp.imag() == doctest::Approx(-zm.imag()).epsilon(1e-14));
}

TEST_CASE("erlang_round: nearest integer, halves up, mean preserved") {
    const ErlangChain a = erlang_round(gamma_from_mean_shape(5.0, 8.32));
    CHECK(a.stages == 8);
    CHECK(a.rate == doctest::Approx(1.6).epsilon(1e-14));
    CHECK(a.mean() == doctest::Approx(5.0).epsilon(1e-14));

    const ErlangChain half = erlang_round(gamma_from_mean_shape(5.0, 0.5));
    CHECK(half.stages == 1);
    CHECK(half.rate == doctest::Approx(0.2).epsilon(1e-14));

    const ErlangChain tiny = erlang_round(gamma_from_mean_shape(5.0, 0.2));
    CHECK(tiny.stages == 1);

    const ErlangChain up = erlang_round(gamma_from_mean_shape(5.0, 3.5));
    CHECK(up.stages == 4);

    const ErlangChain exact = erlang_round(gamma_from_mean_shape(5.0, 20.0));
    CHECK(exact.stages == 20);
    CHECK(exact.rate == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(exact.variance() == doctest::Approx(1.25).epsilon(1e-14));

    // mean preserved across a spread of shapes
    for (double j : {0.5, 1.0, 2.49, 2.5, 8.32, 13.7, 20.0}) {
        for (double tau : {0.8, 5.0, 12.0}) {
            const ErlangChain c = erlang_round(gamma_from_mean_shape(tau, j));
            CHECK(c.mean() == doctest::Approx(tau).epsilon(1e-14));
        }
    }
}

TEST_CASE("hypoexp_from_gamma: two-rate construction and moment matching") {
    const GammaKernel k = gamma_from_mean_shape(5.0, 8.32);
    const HypoexpChain chain = hypoexp_from_gamma(k);
    CHECK(chain.stages == 9);
    CHECK(chain.common_rate == doctest::Approx(1.8).epsilon(1e-14));
    // frozen from the closed-form expressions
    CHECK(chain.nu == doctest::Approx(1.1204791083681423).epsilon(1e-13));
    CHECK(chain.mu == doctest::Approx(4.573817469578626).epsilon(1e-13));

    for (double j : {1.2, 2.5, 8.32, 20.0}) {
        const GammaKernel g = gamma_from_mean_shape(5.0, j);
        const HypoexpChain c = hypoexp_from_gamma(g);
        const ChainMoments m = chain_moments(c.rates());
        CHECK(std::fabs(m.mean - 5.0) <= 1e-12 * 5.0);
        CHECK(std::fabs(m.variance - g.variance()) <= 1e-12 * g.variance());
        for (double r : c.rates()) CHECK(r > 0.0);
    }

    // j = 2.5: n = 3, lambda = 0.6, moments (5, 10)
    const HypoexpChain c25 = hypoexp_from_gamma(gamma_from_mean_shape(5.0, 2.5));
    CHECK(c25.stages == 3);
    CHECK(c25.common_rate == doctest::Approx(0.6).epsilon(1e-14));
    CHECK(c25.mean() == doctest::Approx(5.0).epsilon(1e-13));
    CHECK(c25.variance() == doctest::Approx(10.0).epsilon(1e-13));
}

TEST_CASE("hypoexp degeneracy at integer shape and rejection below 1") {
    const HypoexpChain c = hypoexp_from_gamma(gamma_from_mean_shape(5.0, 20.0));
    CHECK(c.stages == 20);
    CHECK(c.nu == doctest::Approx(4.0).epsilon(1e-13));
    CHECK(c.mu == doctest::Approx(4.0).epsilon(1e-13));
    for (double r : c.rates()) CHECK(r == doctest::Approx(4.0).epsilon(1e-13));

    CHECK_THROWS_AS(hypoexp_from_gamma(gamma_from_mean_shape(5.0, 0.8)), unsupported_shape);
    // shape exactly 1 makes the second tail rate infinite
    CHECK_THROWS_AS(hypoexp_from_gamma(gamma_from_mean_shape(5.0, 1.0)), unsupported_shape);
}

TEST_CASE("chain_moments basics") {
    const ChainMoments erl = chain_moments(std::vector<double>(20, 4.0));
    CHECK(erl.mean == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(erl.variance == doctest::Approx(1.25).epsilon(1e-14));

    const ChainMoments rounded = chain_moments(std::vector<double>(8, 1.6));
    CHECK(rounded.mean == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(rounded.variance == doctest::Approx(3.125).epsilon(1e-14));

    const HypoexpChain c = hypoexp_from_gamma(gamma_from_mean_shape(5.0, 8.32));
    const ChainMoments m = chain_moments(c.rates());
    CHECK(m.mean == doctest::Approx(5.0).epsilon(1e-13));
    CHECK(m.variance == doctest::Approx(25.0 / 8.32).epsilon(1e-13));
}

TEST_CASE("chain laplace transform of the survival") {
    // exponential chain: L(s) = 1/(r + s) * r * tau ... sanity via closed form
    const std::vector<double> single{0.2};
    CHECK(chain_laplace_survival(single, 0.0) == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(chain_laplace_survival(single, 0.2) == doctest::Approx(2.5).epsilon(1e-13));

    // Erlang chain matches the gamma closed form at integer shape.
    const GammaKernel k = gamma_from_mean_shape(5.0, 20.0);
    const std::vector<double> rates(20, 4.0);
    for (double s : {0.0, 0.3, 2.0, 11.0})
        CHECK(chain_laplace_survival(rates, s) ==
              doctest::Approx(k.laplace_survival(s)).epsilon(1e-12));

    CHECK_THROWS_AS(chain_laplace_survival(rates, -4.0), divergent_transform);
}
