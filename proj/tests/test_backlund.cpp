#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "helpers.hpp"
#include "twistor/backlund.hpp"

using namespace twistor;
using namespace testutil;

namespace {

const ABCTriple SRC = abc_from_lambda_triple(cplx(0.1), cplx(0.2), cplx(10.0));
const ABCTriple TGT = abc_from_lambda_triple(cplx(1.0), cplx(2.0), cplx(4.0));

SolutionOracle curved_oracle() {
    // exp traveling wave with a quadratic reparameterization in y: the leaf
    // slopes genuinely vary along the trace
    Map1D phi{[](cplx y) { return y + 0.5 * y * y; },
              [](cplx y) { return cplx(1.0) + y; }};
    return fixture_reparam(
        fixture_traveling(traveling_profile("exp"), cplx(1.0), cplx(2.0), cplx(3.0)),
        Map1D::identity(), Map1D::identity(), phi, Map1D::identity());
}

}  // namespace

TEST_CASE("backlund coefficients") {
    // (0.1, 0.2, 10) gives (-0.98, 1.98, -1); (1, 2, 4) gives (-2, 6, -4)
    CHECK(rel_err(TGT.A, cplx(-2.0)) < 1e-15);
    CHECK(rel_err(TGT.B, cplx(6.0)) < 1e-15);
    CHECK(rel_err(TGT.C, cplx(-4.0)) < 1e-15);
    const BacklundCoefficients c = coefficients(SRC, TGT);
    CHECK(rel_err(c.alpha, cplx(0.49)) < 1e-14);
    CHECK(rel_err(c.beta, cplx(0.33)) < 1e-14);
    CHECK(rel_err(c.gamma, cplx(0.25)) < 1e-14);

    // proportional triples are rejected
    CHECK_THROWS_AS(coefficients(SRC, ABCTriple{2.0 * SRC.A, 2.0 * SRC.B, 2.0 * SRC.C}),
                    ProportionalTriples);

    // trichotomy: non-proportional targets always give pairwise distinct ratios
    for (int n = 0; n < 40; ++n) {
        cplx A = crand(1.0), B = crand(1.0);
        if (std::abs(A) < 0.05 || std::abs(B) < 0.05 || std::abs(A + B) < 0.05) continue;
        const ABCTriple t{A, B, -A - B};
        BacklundCoefficients bc{cplx(0.0), cplx(0.0), cplx(0.0), SRC, t};
        try {
            bc = coefficients(SRC, t);
        } catch (const ProportionalTriples&) {
            continue;
        }
        const double scale = std::abs(bc.alpha) + std::abs(bc.beta) + std::abs(bc.gamma);
        CHECK(std::abs(bc.alpha - bc.beta) > 1e-12 * scale);
        CHECK(std::abs(bc.beta - bc.gamma) > 1e-12 * scale);
        CHECK(std::abs(bc.alpha - bc.gamma) > 1e-12 * scale);
    }
}

TEST_CASE("leaf trace on the x-axis is the identity") {
    const BacklundCoefficients c = coefficients(SRC, TGT);
    const SolutionOracle o = curved_oracle();
    for (double x : {0.0, 0.013, -0.02})
        CHECK(leaf_trace(o, c, cplx(x), cplx(0.0), cplx(0.0)) == cplx(x));
}

TEST_CASE("leaf trace closed form on linear and exp fixtures") {
    const BacklundCoefficients c = coefficients(SRC, TGT);
    // w = x + y + z: v = x + (beta/alpha) y + (gamma/alpha) z
    {
        const SolutionOracle o = fixture_linear(cplx(1.0), cplx(1.0), cplx(1.0));
        const cplx x(0.01, -0.003), y(-0.012), z(0.004, 0.009);
        const cplx v = leaf_trace(o, c, x, y, z);
        const cplx want = x + (c.beta / c.alpha) * y + (c.gamma / c.alpha) * z;
        CHECK(std::abs(v - want) < 1e-12);
    }
    // w = exp(x + 2y + 3z): slopes scale with the gradient ratios
    {
        const SolutionOracle o =
            fixture_traveling(traveling_profile("exp"), cplx(1.0), cplx(2.0), cplx(3.0));
        const cplx x(0.007), y(0.011, 0.002), z(-0.008);
        const cplx v = leaf_trace(o, c, x, y, z);
        const cplx want = x + 2.0 * (c.beta / c.alpha) * y + 3.0 * (c.gamma / c.alpha) * z;
        CHECK(std::abs(v - want) < 1e-12);
    }
}

TEST_CASE("leaf trace is independent of the stage order") {
    const BacklundCoefficients c = coefficients(SRC, TGT);
    const SolutionOracle o = curved_oracle();
    for (int n = 0; n < 10; ++n) {
        const cplx x = crand(0.02), y = crand(0.02), z = crand(0.02);
        const cplx v1 = leaf_trace(o, c, x, y, z, TraceOrder::z_then_y);
        const cplx v2 = leaf_trace(o, c, x, y, z, TraceOrder::y_then_z);
        CHECK(std::abs(v1 - v2) < 1e-8);
    }
}

TEST_CASE("leaf trace is gauge invariant") {
    const BacklundCoefficients c = coefficients(SRC, TGT);
    const SolutionOracle o = curved_oracle();
    auto tau = [](cplx w) { return 2.0 * w + 0.3 * w * w; };
    auto dtau = [](cplx w) { return cplx(2.0) + 0.6 * w; };
    const SolutionOracle og = gauge_transform(o, tau, dtau);
    for (int n = 0; n < 10; ++n) {
        const cplx x = crand(0.02), y = crand(0.02), z = crand(0.02);
        CHECK(std::abs(leaf_trace(o, c, x, y, z) - leaf_trace(og, c, x, y, z)) < 1e-9);
    }
}

TEST_CASE("transformed field satisfies the coupled system") {
    const SolutionOracle o =
        fixture_traveling(traveling_profile("exp"), cplx(1.0), cplx(2.0), cplx(3.0));
    auto report_at = [&](int n) {
        const GridBox grid = GridBox::centered_cube(0.02, n);
        const WaveField v = transform(o, SRC, TGT, grid);
        REQUIRE(v.holes.empty());
        return verify_system(fd::sample(o, grid), v.field, SRC, TGT);
    };
    const SystemReport r9 = report_at(9);
    const SystemReport r17 = report_at(17);
    // first-order system residuals decay at second order
    CHECK(std::log2(r9.residual_xy / r17.residual_xy) > 1.8);
    CHECK(std::log2(r9.residual_xz / r17.residual_xz) > 1.8);
    CHECK(r9.residual_xy < 1e-4);
    // grad v is proportional to (alpha wx, beta wy, gamma wz)
    CHECK(std::log2(r9.minor_max / r17.minor_max) > 1.8);
    CHECK(r9.minor_max < 1e-4);
}

TEST_CASE("verify_system oracle cases") {
    const GridBox grid = GridBox::centered_cube(0.02, 5);
    const SolutionOracle o =
        fixture_traveling(traveling_profile("exp"), cplx(1.0), cplx(2.0), cplx(3.0));
    const ScalarField3 w = fd::sample(o, grid);
    // v = w with source = target satisfies the system identically
    const SystemReport same = verify_system(w, w, SRC, SRC);
    CHECK(same.residual_xy < 1e-14);
    CHECK(same.residual_xz < 1e-14);
    CHECK(same.minor_max < 1e-14);
    // negative control: an unrelated v is O(1) off
    SolutionOracle junk;
    junk.w = [](cplx x, cplx y, cplx z) { return x + 2.0 * y * y + z * x; };
    junk.grad = [](cplx x, cplx y, cplx z) -> std::array<cplx, 3> {
        return {cplx(1.0) + z, 4.0 * y, x};
    };
    const SystemReport off = verify_system(w, fd::sample(junk, grid), SRC, TGT);
    CHECK(off.residual_xy > 0.01);
    CHECK(off.minor_max > 0.01);
    CHECK_THROWS_AS(verify_system(w, fd::sample(o, GridBox::centered_cube(0.02, 3)), SRC, TGT),
                    GridTooSmall);
}

TEST_CASE("eikonal residual of the transform") {
    const SolutionOracle o =
        fixture_traveling(traveling_profile("exp"), cplx(1.0), cplx(2.0), cplx(3.0));
    const GridBox grid = GridBox::centered_cube(0.02, 9);
    const WaveField v = transform(o, SRC, TGT, grid);
    REQUIRE(v.holes.empty());
    // v is exactly linear here, so the symbol vanishes to rounding:
    // A a vy vz + B b vx vz + C c vx vy = 0 via the target zero sum
    CHECK(eikonal_residual(o, v.field, SRC) < 1e-10);
    // negative control: the plane v = y + z is not characteristic
    SolutionOracle plane;
    plane.w = [](cplx, cplx y, cplx z) { return y + z; };
    plane.grad = [](cplx, cplx, cplx) -> std::array<cplx, 3> {
        return {cplx(0.0), cplx(1.0), cplx(1.0)};
    };
    CHECK(eikonal_residual(o, fd::sample(plane, grid), SRC) > 0.9);
}

TEST_CASE("transform is deterministic across job counts") {
    const SolutionOracle o = curved_oracle();
    const GridBox grid = GridBox::centered_cube(0.02, 5);
    const WaveField a = transform(o, SRC, TGT, grid, 1);
    const WaveField b = transform(o, SRC, TGT, grid, 3);
    for (std::size_t i = 0; i < a.field.values.size(); ++i)
        CHECK(a.field.values[i] == b.field.values[i]);
}
