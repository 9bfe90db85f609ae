#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "twistor/errors.hpp"
#include "twistor/field.hpp"
#include "twistor/ode.hpp"
#include "twistor/parallel.hpp"
#include "twistor/pde.hpp"
#include "twistor/riemann.hpp"

namespace twistor {

struct BacklundCoefficients {
    cplx alpha, beta, gamma;  // A/A~, B/B~, C/C~
    ABCTriple source, target;
};

// The ratio triple of Thm 5.50.  The zero sums force a trichotomy: the
// ratios are either all equal (identity foliation-wise, rejected) or
// pairwise distinct.
inline BacklundCoefficients coefficients(const ABCTriple& source, const ABCTriple& target) {
    source.validate();
    target.validate();
    BacklundCoefficients c{source.A / target.A, source.B / target.B,
                           source.C / target.C, source, target};
    const double scale =
        std::abs(c.alpha) + std::abs(c.beta) + std::abs(c.gamma);
    if (std::abs(c.alpha - c.beta) < 1e-14 * scale &&
        std::abs(c.beta - c.gamma) < 1e-14 * scale)
        throw ProportionalTriples("alpha = beta = gamma: transform is trivial");
    if (source.A * target.B == target.A * source.B)
        throw HypothesisViolated("A B~ = A~ B");
    return c;
}

enum class TraceOrder { z_then_y, y_then_z };

// Traces the leaf of the v-foliation (conormal (alpha wx, beta wy, gamma wz))
// through (x, y, z) to the x-axis; the terminal x-coordinate is v(x, y, z)
// in the gauge v(x, 0, 0) = x.
inline cplx leaf_trace(const SolutionOracle& oracle, const BacklundCoefficients& c,
                       cplx x, cplx y, cplx z, TraceOrder order = TraceOrder::z_then_y,
                       double tol = config::ode_tol) {
    auto guard = [](cplx wx, cplx rest) {
        if (std::abs(wx) < 1e-12 * (1.0 + std::abs(rest)))
            throw NondegeneracyLost("wx near 0 along the leaf");
    };
    auto step_z = [&](cplx& xs, cplx y_fixed, cplx z_from) {
        if (z_from == cplx(0.0)) return;
        xs = integrate_ode<cplx>(
            [&](cplx zv, const cplx& xv) -> cplx {
                const auto g = oracle.grad(xv, y_fixed, zv);
                guard(c.alpha * g[0], c.gamma * g[2]);
                return -c.gamma * g[2] / (c.alpha * g[0]);
            },
            z_from, cplx(0.0), xs, tol);
    };
    auto step_y = [&](cplx& xs, cplx y_from, cplx z_fixed) {
        if (y_from == cplx(0.0)) return;
        xs = integrate_ode<cplx>(
            [&](cplx yv, const cplx& xv) -> cplx {
                const auto g = oracle.grad(xv, yv, z_fixed);
                guard(c.alpha * g[0], c.beta * g[1]);
                return -c.beta * g[1] / (c.alpha * g[0]);
            },
            y_from, cplx(0.0), xs, tol);
    };
    cplx xs = x;
    if (order == TraceOrder::z_then_y) {
        step_z(xs, y, z);
        step_y(xs, y, cplx(0.0));
    } else {
        step_y(xs, y, z);
        step_z(xs, cplx(0.0), z);
    }
    return xs;
}

// v sampled by per-point leaf traces over the grid.
inline WaveField transform(const SolutionOracle& oracle, const ABCTriple& source,
                           const ABCTriple& target, const GridBox& grid, int jobs = 1) {
    const BacklundCoefficients c = coefficients(source, target);
    WaveField out;
    out.field = ScalarField3(grid);
    std::vector<std::vector<std::pair<std::size_t, std::string>>> strip_holes(
        std::size_t(grid.res[0]));
    parallel_strips(grid.res[0], jobs, [&](int i) {
        for (int j = 0; j < grid.res[1]; ++j)
            for (int k = 0; k < grid.res[2]; ++k) {
                try {
                    out.field.at(i, j, k) =
                        leaf_trace(oracle, c, cplx(grid.coord(0, i)),
                                   cplx(grid.coord(1, j)), cplx(grid.coord(2, k)));
                } catch (const Error& e) {
                    out.field.at(i, j, k) =
                        cplx(std::numeric_limits<double>::quiet_NaN(),
                             std::numeric_limits<double>::quiet_NaN());
                    strip_holes[std::size_t(i)].emplace_back(out.field.index(i, j, k),
                                                             e.code());
                }
            }
    });
    for (auto& sh : strip_holes)
        out.holes.insert(out.holes.end(), sh.begin(), sh.end());
    return out;
}

struct SystemReport {
    double residual_xy = 0.0;  // scaled |A B~ wx vy - A~ B wy vx|
    double residual_xz = 0.0;  // scaled |A C~ wx vz - A~ C wz vx|
    double minor_max = 0.0;    // scaled 2x2 minors of [grad v ; (a wx, b wy, g wz)]
};

// System 5.60 residuals and the Eq 5.70 proportionality check by central
// differences on matching grids; scaling is by the max term magnitude so
// the numbers are dimensionless.
inline SystemReport verify_system(const ScalarField3& w, const ScalarField3& v,
                                  const ABCTriple& source, const ABCTriple& target) {
    source.validate();
    target.validate();
    if (w.box.res != v.box.res) throw GridTooSmall("w and v grids must match");
    if (w.box.res[0] < 3 || w.box.res[1] < 3 || w.box.res[2] < 3)
        throw GridTooSmall("need >= 3 points per axis");
    const cplx alpha = source.A / target.A, beta = source.B / target.B,
               gamma = source.C / target.C;
    SystemReport rep;
    double den_xy = 0.0, den_xz = 0.0;
    for (int i = 1; i < w.box.res[0] - 1; ++i)
        for (int j = 1; j < w.box.res[1] - 1; ++j)
            for (int k = 1; k < w.box.res[2] - 1; ++k) {
                const fd::Stencil sw = fd::stencil(w, i, j, k);
                const fd::Stencil sv = fd::stencil(v, i, j, k);
                if (!ScalarField3::valid(sw.wx + sw.wy + sw.wz + sv.wx + sv.wy + sv.wz))
                    continue;
                const cplx t1 = source.A * target.B * sw.wx * sv.wy;
                const cplx t2 = target.A * source.B * sw.wy * sv.wx;
                const cplx u1 = source.A * target.C * sw.wx * sv.wz;
                const cplx u2 = target.A * source.C * sw.wz * sv.wx;
                rep.residual_xy = std::max(rep.residual_xy, std::abs(t1 - t2));
                rep.residual_xz = std::max(rep.residual_xz, std::abs(u1 - u2));
                den_xy = std::max({den_xy, std::abs(t1), std::abs(t2)});
                den_xz = std::max({den_xz, std::abs(u1), std::abs(u2)});
                const cplx p[3] = {alpha * sw.wx, beta * sw.wy, gamma * sw.wz};
                const cplx q[3] = {sv.wx, sv.wy, sv.wz};
                const double rn = std::sqrt(std::norm(p[0]) + std::norm(p[1]) +
                                            std::norm(p[2])) *
                                  std::sqrt(std::norm(q[0]) + std::norm(q[1]) +
                                            std::norm(q[2]));
                for (int a = 0; a < 3; ++a)
                    for (int b = a + 1; b < 3; ++b)
                        rep.minor_max =
                            std::max(rep.minor_max,
                                     std::abs(p[a] * q[b] - p[b] * q[a]) /
                                         (rn > 0.0 ? rn : 1.0));
            }
    if (den_xy > 0.0) rep.residual_xy /= den_xy;
    if (den_xz > 0.0) rep.residual_xz /= den_xz;
    return rep;
}

// Eikonal residual of Cor 6: the transform output solves the
// characteristic equation of the source linearization, i.e.
// principal_symbol(w, ., grad v, source) = 0.  FD gradient of v.
inline double eikonal_residual(const SolutionOracle& wbar, const ScalarField3& v,
                               const ABCTriple& source) {
    source.validate();
    if (v.box.res[0] < 3 || v.box.res[1] < 3 || v.box.res[2] < 3)
        throw GridTooSmall("need >= 3 points per axis");
    double num = 0.0, den = 0.0;
    for (int i = 1; i < v.box.res[0] - 1; ++i)
        for (int j = 1; j < v.box.res[1] - 1; ++j)
            for (int k = 1; k < v.box.res[2] - 1; ++k) {
                const fd::Stencil sv = fd::stencil(v, i, j, k);
                if (!ScalarField3::valid(sv.wx + sv.wy + sv.wz)) continue;
                const cplx x(v.box.coord(0, i)), y(v.box.coord(1, j)), z(v.box.coord(2, k));
                const auto g = wbar.grad(x, y, z);
                const cplx terms[3] = {source.A * g[0] * sv.wy * sv.wz,
                                       source.B * g[1] * sv.wx * sv.wz,
                                       source.C * g[2] * sv.wx * sv.wy};
                num = std::max(num, std::abs(terms[0] + terms[1] + terms[2]));
                den = std::max({den, std::abs(terms[0]), std::abs(terms[1]),
                                std::abs(terms[2])});
            }
    return den > 0.0 ? num / den : num;
}

}  // namespace twistor
