#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "twistor/circle.hpp"
#include "twistor/gluing.hpp"

using namespace twistor;
using testutil::rel_err;
using testutil::sample_dist;

namespace {
constexpr int N = 32;
}

TEST_CASE("sample/mode duality round trip") {
    const CircleFunction f = testutil::random_trig(N);
    const CircleFunction g = CircleFunction::from_modes(N, f.modes());
    for (int j = 0; j < f.sample_count(); ++j)
        CHECK(std::abs(g.sample(j) - f.sample(j)) <= 1e-13 * (1.0 + std::abs(f.sample(j))));
    const CircleFunction h = CircleFunction::from_samples(f.samples());
    for (int k = -N; k < N; ++k)
        CHECK(std::abs(h.mode(k) - f.mode(k)) <= 1e-13 * (1.0 + std::abs(f.mode(k))));
}

TEST_CASE("h_split single modes") {
    // lambda^3 -> (lambda^2, 0)
    auto [p3, m3] = h_split(CircleFunction::monomial(N, 3));
    CHECK(p3.mode(2) == cplx(1.0));
    for (int k = -N; k < N; ++k) {
        if (k != 2) CHECK(p3.mode(k) == cplx(0.0));
        CHECK(m3.mode(k) == cplx(0.0));
    }
    // constant 5 -> (0, 5)
    auto [p0, m0] = h_split(CircleFunction::monomial(N, 0, cplx(5.0)));
    CHECK(m0.mode(0) == cplx(5.0));
    for (int k = -N; k < N; ++k) CHECK(p0.mode(k) == cplx(0.0));
    // 2 lambda + 3 + 1/lambda -> (2, 3 + 1/lambda)
    std::vector<cplx> modes(2 * std::size_t(N), cplx(0.0));
    modes[std::size_t(N + 1)] = 2.0;
    modes[std::size_t(N)] = 3.0;
    modes[std::size_t(N - 1)] = 1.0;
    auto [p, m] = h_split(CircleFunction::from_modes(N, std::move(modes)));
    CHECK(p.mode(0) == cplx(2.0));
    CHECK(m.mode(0) == cplx(3.0));
    CHECK(m.mode(-1) == cplx(1.0));
}

TEST_CASE("h_split reconstruction is exact in coefficients") {
    for (int trial = 0; trial < 50; ++trial) {
        const CircleFunction f = testutil::random_trig(N);
        auto [hp, hm] = h_split(f);
        // lambda*hplus + hminus, assembled directly in coefficient space
        for (int k = -N; k < N; ++k) {
            const cplx shifted = (k >= 1) ? hp.mode(k - 1) : cplx(0.0);
            CHECK(shifted + hm.mode(k) == f.mode(k));
        }
        // mode supports
        for (int k = -N; k < 0; ++k) CHECK(hp.mode(k) == cplx(0.0));
        for (int k = 1; k < N; ++k) CHECK(hm.mode(k) == cplx(0.0));
    }
}

TEST_CASE("winding_index on pure modes and analytic functions") {
    for (int k : {-3, 0, 4}) CHECK(winding_index(CircleFunction::monomial(N, k)) == k);
    CHECK(winding_index(CircleFunction::from_function(
              N, [](cplx l) { return std::exp(l); })) == 0);
    CHECK(winding_index(CircleFunction::from_function(
              N, [](cplx l) { return l - 0.5; })) == 1);
}

TEST_CASE("winding_index preconditions") {
    CHECK_THROWS_AS(winding_index(CircleFunction(N)), NearZeroOnCircle);
    // lambda^k with k ~ N winds too fast for the sampling
    CHECK_THROWS_AS(winding_index(CircleFunction::from_function(
                        N, [](cplx l) { return std::pow(l, 40); })),
                    PhaseJumpTooLarge);
}

TEST_CASE("winding_index additivity on rational products") {
    auto rational = [](int inside_zeros, int outside_zeros, int inside_poles) {
        return CircleFunction::from_function(N, [=](cplx l) {
            cplx v(1.0);
            for (int i = 0; i < inside_zeros; ++i) v *= (l - cplx(0.3 + 0.05 * i));
            for (int i = 0; i < outside_zeros; ++i) v *= (l - cplx(2.0 + 0.3 * i));
            for (int i = 0; i < inside_poles; ++i) v /= (l - cplx(-0.4 - 0.03 * i));
            return v;
        });
    };
    for (int trial = 0; trial < 100; ++trial) {
        const int z1 = int(testutil::runif(0.0, 3.99));
        const int o1 = int(testutil::runif(0.0, 2.99));
        const int p1 = int(testutil::runif(0.0, 2.99));
        const int z2 = int(testutil::runif(0.0, 3.99));
        const CircleFunction f = rational(z1, o1, p1), g = rational(z2, 0, 0);
        CHECK(winding_index(f) == z1 - p1);
        CHECK(winding_index(f * g) == winding_index(f) + winding_index(g));
    }
}

TEST_CASE("mult_split oracles") {
    // constant c -> (1, 1/c)
    const cplx c(2.0, 1.0);
    auto [mp, mm] = mult_split(CircleFunction::monomial(N, 0, c));
    CHECK(rel_err(mp.mode(0), cplx(1.0)) < 1e-13);
    CHECK(rel_err(mm.mode(0), 1.0 / c) < 1e-13);

    // (lambda-2)/(lambda-3) -> ((3/2)(lambda-2)/(lambda-3), 3/2)
    const CircleFunction f = CircleFunction::from_function(
        N, [](cplx l) { return (l - 2.0) / (l - 3.0); });
    auto [fp, fm] = mult_split(f);
    const CircleFunction want_p = CircleFunction::from_function(
        N, [](cplx l) { return 1.5 * (l - 2.0) / (l - 3.0); });
    CHECK(sample_dist(fp, want_p) < 1e-11);
    CHECK(rel_err(fm.mode(0), cplx(1.5)) < 1e-11);

    // exp(lambda + 1/lambda) -> (exp(lambda), exp(-1/lambda))
    const CircleFunction g = CircleFunction::from_function(
        N, [](cplx l) { return std::exp(l + 1.0 / l); });
    auto [gp, gm] = mult_split(g);
    const CircleFunction want_gp =
        CircleFunction::from_function(N, [](cplx l) { return std::exp(l); });
    const CircleFunction want_gm =
        CircleFunction::from_function(N, [](cplx l) { return std::exp(-1.0 / l); });
    CHECK(sample_dist(gp, want_gp) < 1e-11);
    CHECK(sample_dist(gm, want_gm) < 1e-11);
}

TEST_CASE("mult_split properties") {
    for (int trial = 0; trial < 50; ++trial) {
        const CircleFunction f = testutil::random_nonvanishing(N);
        auto [mp, mm] = mult_split(f);
        CHECK(sample_dist(mp / mm, f) < 1e-11);
        CHECK(rel_err(mp.eval_inside(cplx(0.0)), cplx(1.0)) < 1e-11);
        for (int k = -N; k < 0; ++k) CHECK(mp.mode(k) == cplx(0.0));
        for (int k = 1; k < N; ++k) CHECK(mm.mode(k) == cplx(0.0));
    }
    CHECK_THROWS_AS(mult_split(CircleFunction::monomial(N, 1)), NonzeroIndex);
}

TEST_CASE("birkhoff_factor") {
    // lambda -> (1, 1, 1)
    const BirkhoffFactors b1 = birkhoff_factor(CircleFunction::monomial(N, 1));
    CHECK(b1.index == 1);
    CHECK(rel_err(b1.aplus.mode(0), cplx(1.0)) < 1e-12);
    CHECK(rel_err(b1.aminus.mode(0), cplx(1.0)) < 1e-12);

    // 2 lambda^-2 -> (-2, 1, 1/2)
    const BirkhoffFactors b2 = birkhoff_factor(CircleFunction::monomial(N, -2, cplx(2.0)));
    CHECK(b2.index == -2);
    CHECK(rel_err(b2.aplus.mode(0), cplx(1.0)) < 1e-12);
    CHECK(rel_err(b2.aminus.mode(0), cplx(0.5)) < 1e-12);

    // lambda (lambda-2)/(lambda-3) -> (1, (3/2)(lambda-2)/(lambda-3), 3/2)
    const BirkhoffFactors b3 = birkhoff_factor(CircleFunction::from_function(
        N, [](cplx l) { return l * (l - 2.0) / (l - 3.0); }));
    CHECK(b3.index == 1);
    const CircleFunction want = CircleFunction::from_function(
        N, [](cplx l) { return 1.5 * (l - 2.0) / (l - 3.0); });
    CHECK(sample_dist(b3.aplus, want) < 1e-11);
    CHECK(rel_err(b3.aminus.mode(0), cplx(1.5)) < 1e-11);

    // consistency on random nonvanishing functions with nonzero index
    for (int trial = 0; trial < 20; ++trial) {
        const int n = int(testutil::runif(-3.0, 3.99));
        const CircleFunction f =
            CircleFunction::monomial(N, n) * testutil::random_nonvanishing(N);
        const BirkhoffFactors b = birkhoff_factor(f);
        CHECK(b.index == n);
        const CircleFunction rebuilt =
            CircleFunction::monomial(N, b.index) * b.aplus / b.aminus;
        CHECK(sample_dist(rebuilt, f) < 1e-10);
    }
}

TEST_CASE("compose_gluing") {
    const GluingFunction lin = GluingFunction::closed_form(
        [](cplx l, cplx t) { return t / (l * l); },
        [](cplx l, cplx) { return 1.0 / (l * l); }, 2.0, true);
    // sigma = 0 -> 0
    const CircleFunction z = compose_gluing(lin, CircleFunction(N));
    CHECK(z.max_abs() == 0.0);
    // sigma = lambda -> 1/lambda
    const CircleFunction r = compose_gluing(lin, CircleFunction::monomial(N, 1));
    CHECK(sample_dist(r, CircleFunction::monomial(N, -1)) < 1e-13);
    // g = t^2, sigma = lambda + 1 -> lambda^2 + 2 lambda + 1
    const GluingFunction sq = GluingFunction::closed_form(
        [](cplx, cplx t) { return t * t; }, [](cplx, cplx t) { return 2.0 * t; }, 10.0,
        true);
    std::vector<cplx> modes(2 * std::size_t(N), cplx(0.0));
    modes[std::size_t(N)] = 1.0;
    modes[std::size_t(N + 1)] = 1.0;
    const CircleFunction sig = CircleFunction::from_modes(N, std::move(modes));
    const CircleFunction got = compose_gluing(sq, sig);
    const CircleFunction want = CircleFunction::from_function(
        N, [](cplx l) { return l * l + 2.0 * l + 1.0; });
    CHECK(sample_dist(got, want) < 1e-13);
    // t-disk enforcement
    CHECK_THROWS_AS(compose_gluing(lin, CircleFunction::monomial(N, 0, cplx(2.0))),
                    TArgumentOutOfDisk);
}

TEST_CASE("tail adequacy check") {
    CHECK(testutil::random_trig(N, 1.0, 0.3).tail_ok());
    CHECK(!CircleFunction::monomial(N, N - 2).tail_ok());
}
