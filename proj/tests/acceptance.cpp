// Acceptance gate: one line per criterion, nonzero exit if any fails.
// All tolerances pinned here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "twistor/twistor.hpp"
#include "helpers.hpp"

using namespace twistor;
using namespace testutil;

namespace {

GluingFunction linear_g() {
    return GluingFunction::closed_form(
        [](cplx l, cplx t) { return t / (l * l); },
        [](cplx l, cplx) { return 1.0 / (l * l); },
        std::numeric_limits<double>::infinity(), true);
}

// criterion-5 gluing: admissible, genuinely nonlinear
GluingFunction quadratic_g() {
    return GluingFunction::closed_form(
        [](cplx l, cplx t) { return (t + 0.1 * t * t) / (l * l); },
        [](cplx l, cplx t) { return (1.0 + 0.2 * t) / (l * l); },
        std::numeric_limits<double>::infinity(), true);
}

const cplx L1(0.1), L2(0.2), L3(10.0);
const NodeSet NODES{{L1, L2}, {L3}};

cplx oracle_linear(cplx x, cplx y, cplx z) {
    // quadratic through (0.1, x), (0.2, y), (10, 100 z), evaluated at 0
    auto term = [](cplx a, cplx b, cplx c, cplx f) {
        return f * (0.0 - b) * (0.0 - c) / ((a - b) * (a - c));
    };
    return term(0.1, 0.2, 10.0, x) + term(0.2, 0.1, 10.0, y) +
           term(10.0, 0.1, 0.2, 100.0 * z);
}

// max |residual| over the grid points shared by every refinement level
// (odd strides keep the point set fixed, so ratios measure pure order)
double shared_residual(const ScalarField3& r, int stride) {
    double mx = 0.0;
    for (int i = stride; i < r.box.res[0] - 1; i += stride)
        for (int j = stride; j < r.box.res[1] - 1; j += stride)
            for (int k = stride; k < r.box.res[2] - 1; k += stride)
                if (ScalarField3::valid(r.at(i, j, k)))
                    mx = std::max(mx, std::abs(r.at(i, j, k)));
    return mx;
}

// ---------------------------------------------------------------- criteria

bool c1_splitting(std::string& detail) {
    const int N = 32;
    double h_err = 0.0, m_err = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const CircleFunction f = random_trig(N);
        auto [hp, hm] = h_split(f);
        for (int k = -N; k < N; ++k) {
            const cplx shifted = (k >= 1) ? hp.mode(k - 1) : cplx(0.0);
            h_err = std::max(h_err, std::abs(shifted + hm.mode(k) - f.mode(k)));
        }
        const CircleFunction g = random_nonvanishing(N);
        auto [mp, mm] = mult_split(g);
        for (int j = 0; j < g.sample_count(); ++j)
            m_err = std::max(m_err, std::abs(mp.sample(j) / mm.sample(j) - g.sample(j)) /
                                        std::abs(g.sample(j)));
    }
    detail = "additive coeff err " + std::to_string(h_err) + ", mult rel err " +
             std::to_string(m_err);
    return h_err == 0.0 && m_err <= 1e-11;
}

bool c2_index_laws(std::string& detail) {
    const int N = 32;
    auto product = [](const CircleFunction& a, const CircleFunction& b) {
        std::vector<cplx> s((std::size_t(a.sample_count())));
        for (int j = 0; j < a.sample_count(); ++j)
            s[std::size_t(j)] = a.sample(j) * b.sample(j);
        return CircleFunction::from_samples(std::move(s));
    };
    for (int k = -8; k <= 8; ++k)
        if (winding_index(CircleFunction::monomial(N, k)) != k) {
            detail = "monomial index failed at k=" + std::to_string(k);
            return false;
        }
    for (int trial = 0; trial < 100; ++trial) {
        const int k1 = int(runif(-4.0, 4.0)), k2 = int(runif(-4.0, 4.0));
        const CircleFunction f = product(CircleFunction::monomial(N, k1),
                                         random_nonvanishing(N));
        const CircleFunction g = product(CircleFunction::monomial(N, k2),
                                         random_nonvanishing(N));
        if (winding_index(product(f, g)) != winding_index(f) + winding_index(g)) {
            detail = "additivity failed at trial " + std::to_string(trial);
            return false;
        }
    }
    // scaffolded family shifts the t-derivative index by exactly +3
    for (const GluingFunction& g : {linear_g(), quadratic_g()}) {
        for (int trial = 0; trial < 5; ++trial) {
            const cplx x = crand(0.02), y = crand(0.02), z = crand(0.02);
            const ScaffoldedGluing sc = wave_scaffold(g, L1, L2, L3, x, y, z, N);
            const GluingFunction sg = sc.as_gluing();
            std::vector<cplx> s((std::size_t(2 * N)));
            for (int j = 0; j < 2 * N; ++j)
                s[std::size_t(j)] = sg.dt(CircleFunction::sample_point(N, j), cplx(0.0));
            const int ind = winding_index(CircleFunction::from_samples(std::move(s)));
            if (ind != -2 + 3) {
                detail = "scaffold index " + std::to_string(ind) + ", expected 1";
                return false;
            }
        }
    }
    detail = "monomials, 100 products, scaffold shift +3";
    return true;
}

bool c3_linear_oracle(std::string& detail) {
    double worst = 0.0;
    int max_iters = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const cplx x = crand(0.02), y = crand(0.02), z = crand(0.02);
        const ScaffoldedGluing sc = wave_scaffold(linear_g(), L1, L2, L3, x, y, z, 32);
        const RiemannSolution sol = solve_riemann_newton(sc.as_gluing());
        worst = std::max(worst, std::abs(sol.sigma_plus.mode(0) - oracle_linear(x, y, z)));
        max_iters = std::max(max_iters, sol.newton_iters);
    }
    detail = "max err " + std::to_string(worst) + ", max iters " +
             std::to_string(max_iters);
    return worst <= 1e-10 && max_iters <= 3;
}

bool c4_cross_method(std::string& detail) {
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const cplx x(runif(-0.02, 0.02)), y(runif(-0.02, 0.02)), z(runif(-0.02, 0.02));
        const GridBox pt{{x.real(), y.real(), z.real()}, {0, 0, 0}, {1, 1, 1}};
        const WaveField newton = wave_solution(quadratic_g(), L1, L2, L3, pt);
        const GluingFamily fam = scaled_value_family(quadratic_g(), NODES, {x, y}, {z});
        // 8 RK4 steps land close enough for the terminal Newton polish
        const RiemannSolution homotopy = solve_riemann_homotopy(fam, {}, 8);
        worst = std::max(worst,
                         std::abs(newton.field.at(0, 0, 0) - homotopy.sigma_plus.mode(0)));
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "max |newton - homotopy| %.3e", worst);
    detail = buf;
    return worst <= 1e-8;
}

bool c5_residual_order(std::string& detail) {
    const ABCTriple abc = abc_from_lambda_triple(L1, L2, L3);
    double r[3];
    const int n[3] = {9, 17, 33}, stride[3] = {1, 2, 4};
    for (int s = 0; s < 3; ++s) {
        const WaveField wf = wave_solution(quadratic_g(), L1, L2, L3,
                                           GridBox::centered_cube(0.02, n[s]));
        if (!wf.holes.empty()) {
            detail = "holes on the " + std::to_string(n[s]) + "^3 grid";
            return false;
        }
        r[s] = shared_residual(equation_residual(wf.field, abc), stride[s]);
    }
    const double o1 = std::log2(r[0] / r[1]), o2 = std::log2(r[1] / r[2]);
    char buf[128];
    std::snprintf(buf, sizeof buf, "residuals %.3e/%.3e/%.3e, orders %.2f/%.2f",
                  r[0], r[1], r[2], o1, o2);
    detail = buf;
    return o1 >= 1.8 && o2 >= 1.8;
}

bool c6_round_trip(std::string& detail) {
    const GridBox grid = GridBox::centered_cube(0.02, 5);
    char buf[128];
    double rel[2];
    const double tol[2] = {1e-9, 1e-6};
    const SolutionOracle fixtures[2] = {fixture_linear(1.0, 1.0, 1.0),
                                        fixture("exp", {1.0, 2.0, 3.0})};
    for (int f = 0; f < 2; ++f) {
        const SolutionOracle& o = fixtures[f];
        const ABCTriple abc = abc_from_lambda_triple(L1, L2, L3);
        // the curve must outrun the trace: psi's argument reaches ~6x the
        // grid radius (t -> w(t, Y(t), 0) is contracting)
        const TransversalCurve Y = canonical_Y(o, abc, 0.3);
        const SampledGluing sg = glue_sample(o, L1, L2, L3, Y);
        const WaveField rec =
            reconstruct(sg, L1, L2, L3, Y, curve_trace(o, Y), grid);
        if (!rec.holes.empty()) {
            detail = "reconstruction holes";
            return false;
        }
        const ScalarField3 exact = fd::sample(o, grid);
        double mx = 0.0;
        for (std::size_t i = 0; i < exact.values.size(); ++i)
            mx = std::max(mx, std::abs(rec.field.values[i] - exact.values[i]));
        rel[f] = mx / exact.max_abs_valid();
    }
    std::snprintf(buf, sizeof buf, "linear rel err %.3e (tol 1e-9), exp %.3e (tol 1e-6)",
                  rel[0], rel[1]);
    detail = buf;
    return rel[0] <= tol[0] && rel[1] <= tol[1];
}

bool c7_backlund(std::string& detail) {
    const ABCTriple src = abc_from_lambda_triple(L1, L2, L3);
    const ABCTriple tgt = abc_from_lambda_triple(cplx(1.0), cplx(2.0), cplx(4.0));
    const SolutionOracle o = fixture("exp", {1.0, 2.0, 3.0});
    // residuals that are analytically zero sit at rounding level; below
    // this floor the convergence order carries no information
    const double noise_floor = 1e-10;
    auto order_ok = [&](double coarse, double fine, const char* what,
                        std::string& why) {
        if (coarse <= noise_floor && fine <= noise_floor) return true;
        if (std::log2(coarse / fine) >= 1.8) return true;
        why = std::string(what) + " order " + std::to_string(std::log2(coarse / fine));
        return false;
    };

    double sys_xy[2], sys_xz[2], eq[2], eik[2];
    const int n[2] = {9, 17};
    for (int s = 0; s < 2; ++s) {
        const GridBox grid = GridBox::centered_cube(0.02, n[s]);
        const WaveField v = transform(o, src, tgt, grid);
        if (!v.holes.empty()) {
            detail = "transform holes";
            return false;
        }
        const SystemReport rep = verify_system(fd::sample(o, grid), v.field, src, tgt);
        sys_xy[s] = rep.residual_xy;
        sys_xz[s] = rep.residual_xz;
        // v is linear for this fixture: the target-equation residual is
        // analytically zero, so measure it absolutely against the floor
        const ScalarField3 r = equation_residual(v.field, tgt);
        eq[s] = 0.0;
        for (const cplx& c : r.values)
            if (ScalarField3::valid(c)) eq[s] = std::max(eq[s], std::abs(c));
        eik[s] = eikonal_residual(o, v.field, src);
    }
    std::string why;
    if (!order_ok(sys_xy[0], sys_xy[1], "system xy", why) ||
        !order_ok(sys_xz[0], sys_xz[1], "system xz", why) ||
        !order_ok(eq[0], eq[1], "target equation", why) ||
        !order_ok(eik[0], eik[1], "eikonal", why)) {
        detail = why;
        return false;
    }
    // path-order independence of the leaf trace
    const BacklundCoefficients c = coefficients(src, tgt);
    double path = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const cplx x = crand(0.02), y = crand(0.02), z = crand(0.02);
        path = std::max(path,
                        std::abs(leaf_trace(o, c, x, y, z, TraceOrder::z_then_y) -
                                 leaf_trace(o, c, x, y, z, TraceOrder::y_then_z)));
    }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "sys %.1e->%.1e/%.1e->%.1e, eq %.1e->%.1e, eik %.1e->%.1e, path %.1e",
                  sys_xy[0], sys_xy[1], sys_xz[0], sys_xz[1], eq[0], eq[1], eik[0],
                  eik[1], path);
    detail = buf;
    return path <= 1e-8;
}

bool c8_gauge(std::string& detail) {
    const ABCTriple abc = abc_from_lambda_triple(L1, L2, L3);
    const GridBox grid = GridBox::centered_cube(0.02, 9);
    // scaled FD residual of an exact solution on this grid: O(h^2) with a
    // moderate constant; anything past this bound is a real violation
    const double bound = 1e-3;
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const SolutionOracle base = fixture("exp", {1.0, 2.0, 3.0});
        // random invertible quadratic gauge tau(w) = c1 w + c2 w^2
        const cplx c1 = cplx(1.0) + crand(0.3), c2 = crand(0.3);
        const SolutionOracle gauged = gauge_transform(
            base, [c1, c2](cplx w) { return c1 * w + c2 * w * w; },
            [c1, c2](cplx w) { return c1 + 2.0 * c2 * w; });
        // random reparameterizations phi_i(t) = t + a_i t^2 of each slot
        auto quad = [&]() {
            const cplx a = crand(0.5);
            return Map1D{[a](cplx t) { return t + a * t * t; },
                         [a](cplx t) { return cplx(1.0) + 2.0 * a * t; }};
        };
        const SolutionOracle reparam =
            fixture_reparam(base, quad(), quad(), quad(), quad());
        worst = std::max({worst, scaled_residual_norm(fd::sample(gauged, grid), abc),
                          scaled_residual_norm(fd::sample(reparam, grid), abc)});
    }
    detail = "max scaled residual " + std::to_string(worst);
    return worst <= bound;
}

bool c9_self_convergence(std::string& detail) {
    const GridBox grid = GridBox::centered_cube(0.02, 5);
    const WaveField w32 = wave_solution(quadratic_g(), L1, L2, L3, grid);
    SolverOptions o64;
    o64.half_order = 64;
    const WaveField w64 = wave_solution(quadratic_g(), L1, L2, L3, grid, o64);
    if (!w32.holes.empty() || !w64.holes.empty()) {
        detail = "holes";
        return false;
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < w32.field.values.size(); ++i)
        worst = std::max(worst, std::abs(w32.field.values[i] - w64.field.values[i]));
    char buf[64];
    std::snprintf(buf, sizeof buf, "max |w_32 - w_64| %.3e on 5^3", worst);
    detail = buf;
    return worst <= 1e-9;
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        bool (*fn)(std::string&);
    };
    const std::vector<Criterion> criteria = {
        {"1 splitting identities", c1_splitting},
        {"2 index laws", c2_index_laws},
        {"3 linear-gluing oracle", c3_linear_oracle},
        {"4 newton vs homotopy", c4_cross_method},
        {"5 pipeline residual order", c5_residual_order},
        {"6 round trip", c6_round_trip},
        {"7 backlund transform", c7_backlund},
        {"8 gauge invariance", c8_gauge},
        {"9 self-convergence", c9_self_convergence},
    };
    int failures = 0;
    for (const Criterion& c : criteria) {
        std::string detail;
        const auto t0 = std::chrono::steady_clock::now();
        bool ok = false;
        try {
            ok = c.fn(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("[%s] %s (%.2f s) %s\n", ok ? "PASS" : "FAIL", c.name, secs,
                    detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    return failures;
}
