#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "twistor/circle.hpp"
#include "twistor/errors.hpp"
#include "twistor/field.hpp"

namespace twistor {

// Equation coefficients with the zero-sum constraint.
struct ABCTriple {
    cplx A, B, C;

    void validate() const {
        const double scale = std::max({std::abs(A), std::abs(B), std::abs(C)});
        if (A == cplx(0.0) || B == cplx(0.0) || C == cplx(0.0))
            throw DegenerateLambdas("A, B, C must all be nonzero");
        if (std::abs(A + B + C) > 1e-14 * scale)
            throw DegenerateLambdas("A + B + C != 0");
    }
};

// Point on the projective line; infinity is an explicit tag.
struct ProjPoint {
    cplx v{0.0};
    bool is_inf = false;

    static ProjPoint inf() { return {cplx(0.0), true}; }
    static ProjPoint of(cplx z) { return {z, false}; }
    friend bool operator==(const ProjPoint& a, const ProjPoint& b) {
        return a.is_inf == b.is_inf && (a.is_inf || a.v == b.v);
    }
};

struct LambdaQuadruple {
    cplx l1, l2, l3, l4;

    void validate() const {
        const cplx v[4] = {l1, l2, l3, l4};
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j)
                if (v[i] == v[j]) throw DegenerateLambdas("lambda quadruple not distinct");
    }
};

// A = lambda1 (lambda2 - lambda3), B = lambda2 (lambda3 - lambda1),
// C = lambda3 (lambda1 - lambda2); the zero sum is an algebraic identity.
inline ABCTriple abc_from_lambda_triple(cplx l1, cplx l2, cplx l3) {
    if (l1 == l2 || l2 == l3 || l1 == l3 || l1 == cplx(0.0) || l2 == cplx(0.0) ||
        l3 == cplx(0.0))
        throw DegenerateLambdas("lambda triple must be distinct and nonzero");
    return {l1 * (l2 - l3), l2 * (l3 - l1), l3 * (l1 - l2)};
}

// (a:b:c:d) = ((d-a)/(d-c)) ((b-c)/(b-a)), with infinity handled by
// dropping the cancelling factor pair.
inline cplx cross_ratio(const ProjPoint& a, const ProjPoint& b, const ProjPoint& c,
                        const ProjPoint& d) {
    const ProjPoint pts[4] = {a, b, c, d};
    int inf_count = 0;
    for (int i = 0; i < 4; ++i) {
        if (pts[i].is_inf) ++inf_count;
        for (int j = i + 1; j < 4; ++j)
            if (pts[i] == pts[j]) throw CoincidentPoints("cross-ratio points must be distinct");
    }
    if (inf_count > 1) throw CoincidentPoints("infinity repeated");
    if (a.is_inf) return (b.v - c.v) / (d.v - c.v);
    if (b.is_inf) return (d.v - a.v) / (d.v - c.v);
    if (c.is_inf) return (d.v - a.v) / (b.v - a.v);
    if (d.is_inf) return (b.v - c.v) / (b.v - a.v);
    return ((d.v - a.v) / (d.v - c.v)) * ((b.v - c.v) / (b.v - a.v));
}

inline cplx cross_ratio(cplx a, cplx b, cplx c, cplx d) {
    return cross_ratio(ProjPoint::of(a), ProjPoint::of(b), ProjPoint::of(c), ProjPoint::of(d));
}

// Solves -A/C = (lambda1 : lambda2 : lambda3 : lambda4) for lambda4.
inline ProjPoint lambda4_from_abc(cplx l1, cplx l2, cplx l3, const ABCTriple& abc) {
    if (l1 == l2 || l2 == l3 || l1 == l3)
        throw DegenerateLambdas("lambda triple must be distinct");
    const cplx ratio = -abc.A / abc.C;
    if (ratio == cplx(0.0) || ratio == cplx(1.0))
        throw RatioDegenerate("-A/C in {0, 1}");
    // ratio = ((l4-l1)/(l4-l3)) ((l2-l3)/(l2-l1))  =>  (l4-l1)/(l4-l3) = r
    const cplx r = ratio * (l2 - l1) / (l2 - l3);
    if (std::abs(r - cplx(1.0)) < 1e-14) return ProjPoint::inf();
    return ProjPoint::of((l1 - r * l3) / (cplx(1.0) - r));
}

// Conormal sweep polynomials of the Veronese curve:
// p_i(lambda) = (lambda4 - lambda_i)(lambda - lambda_j)(lambda - lambda_k).
inline std::array<cplx, 3> veronese_p(cplx lambda, const LambdaQuadruple& q) {
    return {(q.l4 - q.l1) * (lambda - q.l2) * (lambda - q.l3),
            (q.l4 - q.l2) * (lambda - q.l3) * (lambda - q.l1),
            (q.l4 - q.l3) * (lambda - q.l1) * (lambda - q.l2)};
}

// Solution oracle: value and first derivatives of a candidate solution,
// callable at complex arguments (fixtures are entire functions).
struct SolutionOracle {
    std::function<cplx(cplx, cplx, cplx)> w;
    std::function<std::array<cplx, 3>(cplx, cplx, cplx)> grad;
    std::string provenance = "analytic";  // analytic | grid-backed

    static SolutionOracle from_value_only(std::function<cplx(cplx, cplx, cplx)> w,
                                          double h = 1e-6) {
        SolutionOracle o;
        o.w = w;
        o.grad = [w, h](cplx x, cplx y, cplx z) -> std::array<cplx, 3> {
            return {(w(x + h, y, z) - w(x - h, y, z)) / (2.0 * h),
                    (w(x, y + h, z) - w(x, y - h, z)) / (2.0 * h),
                    (w(x, y, z + h) - w(x, y, z - h)) / (2.0 * h)};
        };
        o.provenance = "grid-backed";
        return o;
    }

    // Mixed second partials (wyz, wxz, wxy) by central differences of grad.
    std::array<cplx, 3> mixed(cplx x, cplx y, cplx z, double h = 1e-5) const {
        const auto gzp = grad(x, y, z + h), gzm = grad(x, y, z - h);
        const auto gyp = grad(x, y + h, z), gym = grad(x, y - h, z);
        const cplx wyz = (gzp[1] - gzm[1]) / (2.0 * h);
        const cplx wxz = (gzp[0] - gzm[0]) / (2.0 * h);
        const cplx wxy = (gyp[0] - gym[0]) / (2.0 * h);
        return {wyz, wxz, wxy};
    }
};

// Post-composition by an invertible scalar map tau: values tau(w),
// gradient tau'(w) grad w.  Preserves solutions and gradient directions.
inline SolutionOracle gauge_transform(const SolutionOracle& o,
                                      std::function<cplx(cplx)> tau,
                                      std::function<cplx(cplx)> dtau) {
    SolutionOracle g;
    g.w = [o, tau](cplx x, cplx y, cplx z) { return tau(o.w(x, y, z)); };
    g.grad = [o, tau, dtau](cplx x, cplx y, cplx z) -> std::array<cplx, 3> {
        const cplx s = dtau(o.w(x, y, z));
        const auto gw = o.grad(x, y, z);
        return {s * gw[0], s * gw[1], s * gw[2]};
    };
    g.provenance = o.provenance;
    return g;
}

// Scalar map with derivative, for fixture reparameterizations.
struct Map1D {
    std::function<cplx(cplx)> f;
    std::function<cplx(cplx)> df;

    static Map1D identity() {
        return {[](cplx t) { return t; }, [](cplx) { return cplx(1.0); }};
    }
};

inline SolutionOracle fixture_linear(cplx alpha, cplx beta, cplx gamma) {
    if (alpha == cplx(0.0) || beta == cplx(0.0) || gamma == cplx(0.0))
        throw HypothesisViolated("linear fixture requires nonzero coefficients");
    SolutionOracle o;
    o.w = [=](cplx x, cplx y, cplx z) { return alpha * x + beta * y + gamma * z; };
    o.grad = [=](cplx, cplx, cplx) -> std::array<cplx, 3> { return {alpha, beta, gamma}; };
    return o;
}

// Traveling wave f(a x + b y + c z); solves every (A,B,C)-equation since
// the residual is a b c f' f'' (A + B + C).
inline SolutionOracle fixture_traveling(const Map1D& profile, cplx a, cplx b, cplx c) {
    SolutionOracle o;
    o.w = [=](cplx x, cplx y, cplx z) { return profile.f(a * x + b * y + c * z); };
    o.grad = [=](cplx x, cplx y, cplx z) -> std::array<cplx, 3> {
        const cplx s = profile.df(a * x + b * y + c * z);
        return {a * s, b * s, c * s};
    };
    return o;
}

// psi(w(phi1(x), phi2(y), phi3(z))) per the reparameterization invariance
// of the twistor construction.
inline SolutionOracle fixture_reparam(const SolutionOracle& base, const Map1D& psi,
                                      const Map1D& p1, const Map1D& p2, const Map1D& p3) {
    SolutionOracle o;
    o.w = [=](cplx x, cplx y, cplx z) {
        return psi.f(base.w(p1.f(x), p2.f(y), p3.f(z)));
    };
    o.grad = [=](cplx x, cplx y, cplx z) -> std::array<cplx, 3> {
        const cplx u = base.w(p1.f(x), p2.f(y), p3.f(z));
        const auto g = base.grad(p1.f(x), p2.f(y), p3.f(z));
        const cplx s = psi.df(u);
        return {s * g[0] * p1.df(x), s * g[1] * p2.df(y), s * g[2] * p3.df(z)};
    };
    return o;
}

inline Map1D traveling_profile(const std::string& name) {
    if (name == "exp") return {[](cplx t) { return std::exp(t); },
                               [](cplx t) { return std::exp(t); }};
    if (name == "sin") return {[](cplx t) { return std::sin(t); },
                               [](cplx t) { return std::cos(t); }};
    if (name == "cubic") return {[](cplx t) { return t + t * t * t; },
                                 [](cplx t) { return cplx(1.0) + 3.0 * t * t; }};
    throw UnknownFixture("traveling profile '" + name + "'");
}

// Named test corpus.  params: linear -> (alpha, beta, gamma);
// exp/sin/cubic -> traveling-wave direction (a, b, c).
inline SolutionOracle fixture(const std::string& name, const std::vector<double>& params) {
    auto p = [&](std::size_t i, double dflt) {
        return i < params.size() ? params[i] : dflt;
    };
    if (name == "linear")
        return fixture_linear(p(0, 1.0), p(1, 1.0), p(2, 1.0));
    if (name == "exp" || name == "sin" || name == "cubic")
        return fixture_traveling(traveling_profile(name), p(0, 1.0), p(1, 2.0), p(2, 3.0));
    throw UnknownFixture("fixture '" + name + "'");
}

namespace fd {

// Samples an oracle onto a grid.
inline ScalarField3 sample(const SolutionOracle& o, const GridBox& box) {
    ScalarField3 f(box);
    for (int i = 0; i < box.res[0]; ++i)
        for (int j = 0; j < box.res[1]; ++j)
            for (int k = 0; k < box.res[2]; ++k)
                f.at(i, j, k) = o.w(box.coord(0, i), box.coord(1, j), box.coord(2, k));
    return f;
}

struct Stencil {
    cplx wx, wy, wz, wyz, wxz, wxy;
};

inline Stencil stencil(const ScalarField3& f, int i, int j, int k) {
    const double hx = f.box.spacing(0), hy = f.box.spacing(1), hz = f.box.spacing(2);
    Stencil s;
    s.wx = (f.at(i + 1, j, k) - f.at(i - 1, j, k)) / (2.0 * hx);
    s.wy = (f.at(i, j + 1, k) - f.at(i, j - 1, k)) / (2.0 * hy);
    s.wz = (f.at(i, j, k + 1) - f.at(i, j, k - 1)) / (2.0 * hz);
    s.wyz = (f.at(i, j + 1, k + 1) - f.at(i, j + 1, k - 1) - f.at(i, j - 1, k + 1) +
             f.at(i, j - 1, k - 1)) /
            (4.0 * hy * hz);
    s.wxz = (f.at(i + 1, j, k + 1) - f.at(i + 1, j, k - 1) - f.at(i - 1, j, k + 1) +
             f.at(i - 1, j, k - 1)) /
            (4.0 * hx * hz);
    s.wxy = (f.at(i + 1, j + 1, k) - f.at(i + 1, j - 1, k) - f.at(i - 1, j + 1, k) +
             f.at(i - 1, j - 1, k)) /
            (4.0 * hx * hy);
    return s;
}

}  // namespace fd

// A wx wyz + B wy wxz + C wz wxy on interior points by central
// differences; the boundary ring is marked invalid (NaN).
inline ScalarField3 equation_residual(const ScalarField3& w, const ABCTriple& abc) {
    abc.validate();
    if (w.box.res[0] < 3 || w.box.res[1] < 3 || w.box.res[2] < 3)
        throw GridTooSmall("need >= 3 points per axis for central differences");
    ScalarField3 r(w.box);
    const cplx nan(std::numeric_limits<double>::quiet_NaN(),
                   std::numeric_limits<double>::quiet_NaN());
    for (int i = 0; i < w.box.res[0]; ++i)
        for (int j = 0; j < w.box.res[1]; ++j)
            for (int k = 0; k < w.box.res[2]; ++k) {
                if (i == 0 || j == 0 || k == 0 || i == w.box.res[0] - 1 ||
                    j == w.box.res[1] - 1 || k == w.box.res[2] - 1) {
                    r.at(i, j, k) = nan;
                    continue;
                }
                const fd::Stencil s = fd::stencil(w, i, j, k);
                r.at(i, j, k) = abc.A * s.wx * s.wyz + abc.B * s.wy * s.wxz +
                                abc.C * s.wz * s.wxy;
            }
    return r;
}

inline ScalarField3 equation_residual(const SolutionOracle& o, const ABCTriple& abc,
                                      const GridBox& box) {
    return equation_residual(fd::sample(o, box), abc);
}

// Max-norm of the residual scaled by the max magnitude of the three
// equation terms, so tolerances are dimensionless.
inline double scaled_residual_norm(const ScalarField3& w, const ABCTriple& abc) {
    const ScalarField3 r = equation_residual(w, abc);
    double num = 0.0, den = 0.0;
    for (int i = 1; i < w.box.res[0] - 1; ++i)
        for (int j = 1; j < w.box.res[1] - 1; ++j)
            for (int k = 1; k < w.box.res[2] - 1; ++k) {
                if (!ScalarField3::valid(w.at(i, j, k)) ||
                    !ScalarField3::valid(r.at(i, j, k)))
                    continue;
                const fd::Stencil s = fd::stencil(w, i, j, k);
                num = std::max(num, std::abs(r.at(i, j, k)));
                den = std::max({den, std::abs(abc.A * s.wx * s.wyz),
                                std::abs(abc.B * s.wy * s.wxz),
                                std::abs(abc.C * s.wz * s.wxy)});
            }
    return den == 0.0 ? num : num / den;
}

// nu23 wx wyz + nu31 wy wxz + nu12 wz wxy at a point, with
// nu_kl = lambda_k/(lambda4 - lambda_k) - lambda_l/(lambda4 - lambda_l).
struct NuCoefficients {
    cplx nu23, nu31, nu12;
};

inline NuCoefficients nu_coefficients(const LambdaQuadruple& q) {
    q.validate();
    const cplx zero(0.0);
    if (q.l1 == zero || q.l2 == zero || q.l3 == zero || q.l4 == zero)
        throw LambdaContainsZeroOrInfinity("nu coefficients need nonzero finite lambdas");
    auto term = [&](cplx lk) { return lk / (q.l4 - lk); };
    return {term(q.l2) - term(q.l3), term(q.l3) - term(q.l1), term(q.l1) - term(q.l2)};
}

inline cplx frobenius_residual(const SolutionOracle& o, const LambdaQuadruple& q, cplx x,
                               cplx y, cplx z) {
    const NuCoefficients nu = nu_coefficients(q);
    const auto g = o.grad(x, y, z);
    const auto m = o.mixed(x, y, z);
    return nu.nu23 * g[0] * m[0] + nu.nu31 * g[1] * m[1] + nu.nu12 * g[2] * m[2];
}

// Linearized operator l_wbar applied to w, evaluated by finite
// differences of both oracles on the grid.
inline ScalarField3 linearization_residual(const SolutionOracle& wbar,
                                           const SolutionOracle& w, const ABCTriple& abc,
                                           const GridBox& box) {
    abc.validate();
    if (box.res[0] < 3 || box.res[1] < 3 || box.res[2] < 3)
        throw GridTooSmall("need >= 3 points per axis");
    const ScalarField3 fb = fd::sample(wbar, box);
    const ScalarField3 fw = fd::sample(w, box);
    ScalarField3 r(box);
    const cplx nan(std::numeric_limits<double>::quiet_NaN(),
                   std::numeric_limits<double>::quiet_NaN());
    for (int i = 0; i < box.res[0]; ++i)
        for (int j = 0; j < box.res[1]; ++j)
            for (int k = 0; k < box.res[2]; ++k) {
                if (i == 0 || j == 0 || k == 0 || i == box.res[0] - 1 ||
                    j == box.res[1] - 1 || k == box.res[2] - 1) {
                    r.at(i, j, k) = nan;
                    continue;
                }
                const fd::Stencil sb = fd::stencil(fb, i, j, k);
                const fd::Stencil sw = fd::stencil(fw, i, j, k);
                r.at(i, j, k) = abc.A * sb.wx * sw.wyz + abc.B * sb.wy * sw.wxz +
                                abc.C * sb.wz * sw.wxy + abc.A * sb.wyz * sw.wx +
                                abc.B * sb.wxz * sw.wy + abc.C * sb.wxy * sw.wz;
            }
    return r;
}

// Principal symbol of the linearization: A wbar_x eta zeta + B wbar_y xi zeta
// + C wbar_z xi eta.
inline cplx principal_symbol(const SolutionOracle& wbar, cplx x, cplx y, cplx z,
                             const std::array<cplx, 3>& covector, const ABCTriple& abc) {
    const auto g = wbar.grad(x, y, z);
    return abc.A * g[0] * covector[1] * covector[2] +
           abc.B * g[1] * covector[0] * covector[2] +
           abc.C * g[2] * covector[0] * covector[1];
}

}  // namespace twistor
