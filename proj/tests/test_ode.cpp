#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>

#include "helpers.hpp"
#include "twistor/ode.hpp"

using namespace twistor;
using testutil::rel_err;

TEST_CASE("exponential growth matches closed form") {
    const cplx y = integrate_ode<cplx>([](cplx, const cplx& v) { return v; }, cplx(0.0),
                                       cplx(1.0), cplx(1.0));
    CHECK(rel_err(y, cplx(std::exp(1.0))) < 1e-9);
}

TEST_CASE("complex segment: rotation generator") {
    // y' = i y from 0 to pi gives -y0
    const cplx y = integrate_ode<cplx>(
        [](cplx, const cplx& v) { return cplx(0.0, 1.0) * v; }, cplx(0.0),
        cplx(M_PI), cplx(1.0));
    CHECK(rel_err(y, cplx(-1.0)) < 1e-9);
}

TEST_CASE("complex path endpoint off the real axis") {
    // y' = y integrated to x1 = 0.3 + 0.4i gives exp(x1)
    const cplx x1(0.3, 0.4);
    const cplx y = integrate_ode<cplx>([](cplx, const cplx& v) { return v; }, cplx(0.0),
                                       x1, cplx(1.0));
    CHECK(rel_err(y, std::exp(x1)) < 1e-9);
}

TEST_CASE("array state: harmonic oscillator") {
    using S = std::array<cplx, 2>;
    const S y = integrate_ode<S>(
        [](cplx, const S& v) -> S {
            return {v[1], -v[0]};
        },
        cplx(0.0), cplx(2.0), S{cplx(1.0), cplx(0.0)});
    CHECK(rel_err(y[0], cplx(std::cos(2.0))) < 1e-9);
    CHECK(rel_err(y[1], cplx(-std::sin(2.0))) < 1e-9);
}

TEST_CASE("position-dependent right-hand side") {
    // y' = 2x, y(0) = 0 -> y(x1) = x1^2 along any straight path
    const cplx x1(0.5, -1.0);
    const cplx y = integrate_ode<cplx>([](cplx x, const cplx&) { return 2.0 * x; },
                                       cplx(0.0), x1, cplx(0.0));
    CHECK(rel_err(y, x1 * x1) < 1e-10);
}

TEST_CASE("failure surfaces as ODEStepFailure") {
    // finite-time blow-up inside the interval
    CHECK_THROWS_AS(integrate_ode<cplx>(
                        [](cplx, const cplx& v) { return v * v; }, cplx(0.0), cplx(2.0),
                        cplx(1.0)),
                    ODEStepFailure);
}
