#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "agesis/errors.hpp"
#include "agesis/model.hpp"
#include "oracles.hpp"

#include <cmath>
#include <complex>

using namespace agesis;
using cplx = std::complex<double>;

TEST_CASE("reproduction number: closed form and quadrature cross-check") {
    CHECK(reproduction_number(make_model(5.0, 20.0, 2.0, 0.0)) == 0.0);

    // classic SIS: R0 = beta0 tau for kd = 0
    CHECK(reproduction_number(make_model(5.0, 1.0, 0.0, 0.4)) ==
          doctest::Approx(2.0).epsilon(1e-13));

    const ModelSpec m = make_model(5.0, 20.0, 2.0, 4.4013);
    CHECK(reproduction_number(m) == doctest::Approx(2.2).epsilon(1e-3));
    const double quad = oracles::integrate_halfline(
        [&](double a) { return m.infectivity(a) * m.kernel.survival(a); }, 2.0, 1e-14);
    CHECK(reproduction_number(m) == doctest::Approx(quad).epsilon(1e-10));
}

TEST_CASE("calibrate_beta0 inverts reproduction_number") {
    const GammaKernel k = gamma_from_mean_shape(5.0, 20.0);
    const double beta0 = calibrate_beta0(k, 2.0, 2.2);
    CHECK(beta0 == doctest::Approx(2.2 * 2.0 / (1.0 - std::pow(2.0 / 3.0, 20.0)))
                       .epsilon(1e-13));
    CHECK(beta0 == doctest::Approx(4.401323604148917).epsilon(1e-13));
    const ModelSpec m{k, InfectivityProfile{beta0, 2.0}};
    CHECK(reproduction_number(m) == doctest::Approx(2.2).epsilon(1e-12));

    // kd = 0 limit
    CHECK(calibrate_beta0(gamma_from_mean_shape(5.0, 3.0), 0.0, 2.2) ==
          doctest::Approx(0.44).epsilon(1e-13));

    // round trips across the parameter space
    for (double j : {1.2, 2.5, 8.32, 20.0})
        for (double kd : {0.0, 0.5, 4.2})
            for (double r0 : {0.8, 1.0, 3.75}) {
                const ModelSpec mm = model_from_r0(5.0, j, kd, r0);
                CHECK(reproduction_number(mm) == doctest::Approx(r0).epsilon(1e-12));
            }
}

TEST_CASE("malthusian: sign law, threshold, and growth-equation residual") {
    const ModelSpec crit = model_from_r0(5.0, 20.0, 4.2, 1.0);
    CHECK(std::fabs(malthusian(crit)) < 1e-10);

    const ModelSpec sup = model_from_r0(5.0, 20.0, 2.0, 2.2);
    const double r = malthusian(sup);
    CHECK(r > 0.0);
    CHECK(r == doctest::Approx(2.401322027153279).epsilon(1e-10)); // frozen root

    const ModelSpec sub = model_from_r0(5.0, 20.0, 2.0, 0.8);
    CHECK(malthusian(sub) < 0.0);

    // residual of the growth equation at the root
    const double lhs = sup.infectivity.beta0 *
                       sup.kernel.laplace_survival(sup.infectivity.kd + r);
    CHECK(std::fabs(lhs - 1.0) <= 1e-12);

    CHECK_THROWS_AS(malthusian(make_model(5.0, 2.0, 1.0, 0.0)), no_convergence);
}

TEST_CASE("threshold consistency: r and R0-1 cross at the same beta0") {
    const GammaKernel k = gamma_from_mean_shape(5.0, 8.32);
    const double kd = 1.3;
    auto r_of = [&](double b0) { return malthusian(ModelSpec{k, {b0, kd}}); };
    auto r0_of = [&](double b0) {
        return reproduction_number(ModelSpec{k, {b0, kd}}) - 1.0;
    };
    auto bisect = [](auto f, double lo, double hi) {
        for (int i = 0; i < 200 && hi - lo > 1e-13; ++i) {
            const double mid = 0.5 * (lo + hi);
            (f(mid) < 0.0 ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };
    const double cross_r = bisect(r_of, 0.05, 5.0);
    const double cross_r0 = bisect(r0_of, 0.05, 5.0);
    CHECK(cross_r == doctest::Approx(cross_r0).epsilon(1e-10));
}

TEST_CASE("equilibria: DFE always, EE iff R0 > 1") {
    const EquilibriumPair sup = equilibria(model_from_r0(5.0, 20.0, 2.0, 2.2));
    CHECK(sup.dfe.susceptible == 1.0);
    CHECK(sup.dfe.incidence == 0.0);
    REQUIRE(sup.ee.has_value());
    CHECK(sup.ee->susceptible == doctest::Approx(1.0 / 2.2).epsilon(1e-14));
    CHECK(sup.ee->infected == doctest::Approx(0.5454545454545454).epsilon(1e-13));
    CHECK(sup.ee->incidence == doctest::Approx(0.10909090909090909).epsilon(1e-13));

    CHECK_FALSE(equilibria(model_from_r0(5.0, 20.0, 2.0, 0.8)).ee.has_value());

    const EquilibriumPair fig4 = equilibria(model_from_r0(5.0, 20.0, 3.795, 3.75));
    REQUIRE(fig4.ee.has_value());
    CHECK(fig4.ee->infected == doctest::Approx(1.0 - 1.0 / 3.75).epsilon(1e-13));
}

TEST_CASE("ee_char: value at zero, conjugate symmetry, root residual") {
    const ModelSpec m = model_from_r0(5.0, 20.0, 2.0, 2.2);

    // At lambda = 0 the residual telescopes to R0 - 1.
    CHECK(ee_char(m, cplx(0.0, 0.0)).real() == doctest::Approx(1.2).epsilon(1e-12));
    CHECK(std::fabs(ee_char(m, cplx(0.0, 0.0)).imag()) < 1e-14);

    for (const cplx z : {cplx(0.2, 0.9), cplx(-0.1, 2.3), cplx(1.0, 0.4)}) {
        const cplx a = ee_char(m, z);
        const cplx b = ee_char(m, std::conj(z));
        CHECK(a.real() == doctest::Approx(b.real()).epsilon(1e-13));
        CHECK(a.imag() == doctest::Approx(-b.imag()).epsilon(1e-13));
    }

    // A genuine root has residual ~0: polish from a rough seed and check.
    auto f = [&](cplx z) { return ee_char(m, z); };
    const cplx root = polish_char_root(f, cplx(-0.05, 1.0));
    CHECK(std::abs(ee_char(m, root)) <= 1e-10);

    CHECK_THROWS_AS(ee_char(m, cplx(-4.5, 0.0)), divergent_transform);
}

TEST_CASE("dfe_char rightmost root equals the Malthusian parameter") {
    const ModelSpec m = model_from_r0(5.0, 20.0, 2.0, 2.2);
    auto f = [&](cplx z) { return dfe_char(m, z); };
    const auto roots = find_char_roots(f, RootRect{-1.0, 3.0, 0.0, 4.0 * M_PI / 5.0}, 25);
    REQUIRE(!roots.empty());
    CHECK(roots.front().real() == doctest::Approx(malthusian(m)).epsilon(1e-10));
    CHECK(std::fabs(roots.front().imag()) < 1e-8);
}

TEST_CASE("hopf_scan: shape sweep reproduces the j* = 8.31 crossing") {
    const HopfFamily family{5.0, 0.0, 4.2, 2.2, FreeParam::shape};
    const HopfRoot hopf = hopf_oracle(family, 6.0, 10.0);
    CHECK(hopf.param == doctest::Approx(8.3077615755).epsilon(5e-6)); // frozen
    CHECK(hopf.param > 8.26);
    CHECK(hopf.param < 8.36);
    CHECK(hopf.omega == doctest::Approx(1.0420911101).epsilon(1e-5));
    // residual contract
    const ModelSpec m = family.at(hopf.param);
    CHECK(std::abs(ee_char(m, cplx(0.0, hopf.omega))) <= 1e-10);
}

TEST_CASE("hopf_scan: kd sweep finds both crossings around the bistable window") {
    const HopfFamily family{5.0, 20.0, 0.0, 3.75, FreeParam::kd};
    const auto crossings = hopf_scan(family, 1.0, 8.0);
    REQUIRE(crossings.size() == 2);
    CHECK(crossings[0].param == doctest::Approx(1.7089145932).epsilon(1e-6));
    CHECK(crossings[1].param == doctest::Approx(3.7938721081).epsilon(1e-6));
    // the simulated operating point kd = 3.795 sits just past the second
    // crossing, inside the bistable window
    CHECK(crossings[1].param < 3.795);
}

TEST_CASE("hopf_scan: no imaginary pair just past the transcritical point") {
    const HopfFamily family{5.0, 20.0, 2.0, 0.0, FreeParam::r0};
    const auto crossings = hopf_scan(family, 1.001, 1.5);
    CHECK(crossings.empty());
    CHECK_THROWS_AS(hopf_oracle(family, 1.001, 1.5), no_crossing);
}
