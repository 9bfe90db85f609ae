#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "twistor/circle.hpp"
#include "twistor/errors.hpp"
#include "twistor/field.hpp"
#include "twistor/gluing.hpp"
#include "twistor/ode.hpp"
#include "twistor/parallel.hpp"
#include "twistor/pde.hpp"
#include "twistor/riemann.hpp"
#include "twistor/scaffold.hpp"

namespace twistor {

// Chebyshev interpolant on [-radius, radius] with complex coefficients,
// evaluable at complex arguments (it is a polynomial).
struct Chebyshev {
    double radius = 1.0;
    std::vector<cplx> coeff;  // p(t) = sum coeff[k] T_k(t / radius)

    // Interpolates values at the Lobatto nodes radius*cos(j pi/d), j = 0..d.
    static Chebyshev fit(double radius, const std::vector<cplx>& values) {
        const std::size_t d = values.size() - 1;
        Chebyshev c;
        c.radius = radius;
        c.coeff.assign(d + 1, cplx(0.0));
        for (std::size_t k = 0; k <= d; ++k) {
            cplx acc = 0.5 * (values[0] + (k % 2 ? -values[d] : values[d]));
            for (std::size_t j = 1; j < d; ++j)
                acc += values[j] * std::cos(M_PI * double(j * k) / double(d));
            c.coeff[k] = acc * (2.0 / double(d));
        }
        c.coeff[0] *= 0.5;
        c.coeff[d] *= 0.5;
        return c;
    }

    static std::vector<double> nodes(double radius, std::size_t degree) {
        std::vector<double> t(degree + 1);
        for (std::size_t j = 0; j <= degree; ++j)
            t[j] = radius * std::cos(M_PI * double(j) / double(degree));
        return t;
    }

    cplx operator()(cplx t) const {
        const cplx s = t / radius;
        cplx b1(0.0), b2(0.0);
        for (std::size_t k = coeff.size(); k-- > 1;) {
            const cplx b0 = coeff[k] + 2.0 * s * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        return coeff[0] + s * b1 - b2;
    }

    Chebyshev derivative() const {
        Chebyshev d;
        d.radius = radius;
        const std::size_t n = coeff.size();
        d.coeff.assign(n > 1 ? n - 1 : 1, cplx(0.0));
        if (n > 1) {
            cplx next(0.0), nextnext(0.0);
            for (std::size_t k = n - 1; k >= 1; --k) {
                d.coeff[k - 1] = nextnext + 2.0 * double(k) * coeff[k];
                nextnext = next;
                next = d.coeff[k - 1];
                if (k == 1) break;
            }
            d.coeff[0] *= 0.5;
            for (cplx& v : d.coeff) v /= radius;
        }
        return d;
    }

    // Zeroes coefficients below the sampling noise floor; interpolants of
    // low-degree data would otherwise amplify shot noise when evaluated
    // past the fit interval (T_k grows like (2|t|/radius)^k there).
    void denoise(double rel = 1e-8) {
        double peak = 0.0;
        for (const cplx& v : coeff) peak = std::max(peak, std::abs(v));
        const double floor_ = rel * peak + 1e-300;
        for (cplx& v : coeff)
            if (std::abs(v) < floor_) v = cplx(0.0);
    }
};

// The surface {y = Y(x), z = 0} transversal to the web, stored as a
// Chebyshev interpolant so Y, Y' and Y^{-1} extend to complex arguments.
class TransversalCurve {
public:
    TransversalCurve(Chebyshev y, double radius) : y_(std::move(y)), radius_(radius) {
        dy_ = y_.derivative();
        const cplx y0 = y_(cplx(0.0));
        y_.coeff[0] -= y0;  // pin Y(0) = 0 exactly
        double scale = 0.0;
        for (const cplx& v : dy_.coeff) scale = std::max(scale, std::abs(v));
        if (std::abs(dy_(cplx(0.0))) <= 1e-12 * scale)
            throw DerivativeBlowup("Y'(0) = 0: curve not transversal");
    }

    double radius() const { return radius_; }

    cplx y(cplx x) const {
        check_domain(x);
        return y_(x);
    }

    cplx dy(cplx x) const {
        check_domain(x);
        return dy_(x);
    }

    // phi2 = Y^{-1} by Newton on the interpolant.
    cplx inverse(cplx yv) const {
        cplx x = yv / dy_(cplx(0.0));
        for (int it = 0; it < 60; ++it) {
            if (std::abs(x) > 1.25 * radius_)
                throw InverseOutOfRange("Y^{-1} escaped the curve domain");
            const cplx d = dy_(x);
            if (std::abs(d) < 1e-14)
                throw DerivativeBlowup("Y' vanished during inversion");
            const cplx step = (y_(x) - yv) / d;
            x -= step;
            if (std::abs(step) <= 1e-15 * (1.0 + std::abs(x))) {
                if (std::abs(x) > radius_ * (1.0 + 1e-9))
                    throw InverseOutOfRange("y outside the image of Y");
                return x;
            }
        }
        throw InverseOutOfRange("Y^{-1} Newton did not converge");
    }

private:
    void check_domain(cplx x) const {
        if (std::abs(x) > radius_ * (1.0 + 1e-9))
            throw LeftDomain("|x| = " + std::to_string(std::abs(x)) +
                             " outside curve radius " + std::to_string(radius_));
    }

    Chebyshev y_, dy_;
    double radius_;
};

// Canonical transversal curve dY/dx = A wx(x,Y,0) / (B wy(x,Y,0)), Y(0)=0.
// Integrated node-to-node outward from 0 over the Lobatto grid, then
// interpolated.
inline TransversalCurve canonical_Y(const SolutionOracle& oracle, const ABCTriple& abc,
                                    double radius, std::size_t degree = 24) {
    abc.validate();
    auto rhs = [&](cplx x, const cplx& y) -> cplx {
        const auto g = oracle.grad(x, y, cplx(0.0));
        const cplx den = abc.B * g[1];
        if (std::abs(den) < 1e-12 * (1.0 + std::abs(abc.A * g[0])))
            throw DerivativeBlowup("B wy near 0 along the canonical curve");
        return abc.A * g[0] / den;
    };
    const std::vector<double> t = Chebyshev::nodes(radius, degree);  // descending
    std::vector<cplx> vals(degree + 1);
    // index of the node closest to 0 (exactly 0 for even degree)
    std::size_t j0 = 0;
    for (std::size_t j = 1; j <= degree; ++j)
        if (std::abs(t[j]) < std::abs(t[j0])) j0 = j;
    cplx y(0.0);
    if (t[j0] != 0.0) y = integrate_ode<cplx>(rhs, cplx(0.0), cplx(t[j0]), y);
    vals[j0] = y;
    cplx yu = y;
    for (std::size_t j = j0; j-- > 0;) {  // upward in x (nodes descend with j)
        yu = integrate_ode<cplx>(rhs, cplx(t[j + 1]), cplx(t[j]), yu);
        vals[j] = yu;
    }
    cplx yd = y;
    for (std::size_t j = j0 + 1; j <= degree; ++j) {
        yd = integrate_ode<cplx>(rhs, cplx(t[j - 1]), cplx(t[j]), yd);
        vals[j] = yd;
    }
    Chebyshev fit = Chebyshev::fit(radius, vals);
    fit.denoise();
    return TransversalCurve(std::move(fit), radius);
}

struct GlueOptions {
    int half_order = config::default_half_order;
    std::size_t cheb_degree = config::default_cheb_degree;
    double t_max = config::default_t_max;
    double eps1 = config::mu_pole_clearance;
    double ode_tol = config::ode_tol;
    int jobs = 1;
};

// The gluing function reconstructed from characteristic ODE shots: per
// circle sample a polynomial interpolant in t of g_mu(t) = z(0).
struct SampledGluing {
    int half_order = 0;
    double t_max = 0.0;
    std::vector<Chebyshev> fits;     // one per circle sample
    double fit_residual = 0.0;       // max held-out shot mismatch
    cplx lambda1, lambda2, lambda3;  // provenance

    // ind over the circle of the t-derivative at t = 0.
    int index_at_zero() const {
        std::vector<cplx> s(fits.size());
        for (std::size_t j = 0; j < fits.size(); ++j)
            s[j] = fits[j].derivative()(cplx(0.0));
        return winding_index(CircleFunction::from_samples(std::move(s)));
    }

    GluingFunction as_gluing() const {
        const auto self = std::make_shared<const SampledGluing>(*this);
        auto dfits = std::make_shared<std::vector<Chebyshev>>();
        dfits->reserve(fits.size());
        for (const Chebyshev& f : fits) dfits->push_back(f.derivative());
        GluingFunction g;
        g.eval = [self](cplx lam, cplx t) { return self->fits[self->sample_of(lam)](t); };
        g.dt = [self, dfits](cplx lam, cplx t) {
            return (*dfits)[self->sample_of(lam)](t);
        };
        g.delta = std::numeric_limits<double>::infinity();
        g.zero_preserving = true;
        g.kind = "sampled";
        return g;
    }

    std::size_t sample_of(cplx lambda) const {
        const int m = 2 * half_order;
        const int j =
            ((int)std::lround(std::arg(lambda) * half_order / M_PI) % m + m) % m;
        if (std::abs(lambda - CircleFunction::sample_point(half_order, j)) > 1e-9)
            throw NodePlacement("lambda is not a sample point of this gluing");
        return std::size_t(j);
    }
};

namespace builder_detail {

// One characteristic shot: z' per Thm 107.40's ODE family, from x = t
// (z = 0) back to x = 0; returns z(0).
inline cplx shoot(const SolutionOracle& oracle, const ABCTriple& abc,
                  const TransversalCurve& Y, cplx mu, cplx t, double tol) {
    auto rhs = [&](cplx x, const cplx& z) -> cplx {
        const cplx yx = Y.y(x);
        const auto g = oracle.grad(x, yx, z);
        const cplx den = abc.C * g[2];
        if (std::abs(den) < 1e-12 * (1.0 + std::abs(abc.A * g[0]) + std::abs(abc.B * g[1])))
            throw NondegeneracyLost("C wz near 0 along a characteristic shot");
        return abc.A * g[0] / (mu * den) - abc.B * g[1] * Y.dy(x) / ((mu - 1.0) * den);
    };
    cplx z(0.0);
    if (t != cplx(0.0)) z = integrate_ode<cplx>(rhs, t, cplx(0.0), z, tol);
    return z;
}

}  // namespace builder_detail

// Builds the gluing function of the inverse transform: for every circle
// sample lambda, mu = (lambda1 : lambda2 : lambda3 : lambda), and g(lambda, .)
// is interpolated through shots at Lobatto t-nodes on [-t_max, t_max].
inline SampledGluing glue_sample(const SolutionOracle& oracle, cplx lambda1, cplx lambda2,
                                 cplx lambda3, const TransversalCurve& Y,
                                 const GlueOptions& opt = {}) {
    if (std::abs(lambda1) >= 1.0 || std::abs(lambda2) >= 1.0 || std::abs(lambda3) <= 1.0)
        throw NodePlacement("need |lambda1|, |lambda2| < 1 < |lambda3|");
    if (!(opt.t_max > 0.0)) throw HypothesisViolated("t_max must be positive");
    const ABCTriple abc = abc_from_lambda_triple(lambda1, lambda2, lambda3);
    const int m = 2 * opt.half_order;
    const std::vector<double> tn = Chebyshev::nodes(opt.t_max, opt.cheb_degree);

    SampledGluing sg;
    sg.half_order = opt.half_order;
    sg.t_max = opt.t_max;
    sg.fits.resize(std::size_t(m));
    sg.lambda1 = lambda1;
    sg.lambda2 = lambda2;
    sg.lambda3 = lambda3;

    std::vector<double> held(std::size_t(m), 0.0);
    parallel_strips(m, opt.jobs, [&](int j) {
        const cplx lam = CircleFunction::sample_point(opt.half_order, j);
        const cplx mu = cross_ratio(lambda1, lambda2, lambda3, lam);
        if (std::abs(mu) <= opt.eps1 || std::abs(mu - 1.0) <= opt.eps1)
            throw MuTooCloseToPole("mu = " + std::to_string(std::abs(mu)) +
                                   " too close to {0, 1}");
        std::vector<cplx> vals(tn.size());
        for (std::size_t i = 0; i < tn.size(); ++i)
            vals[i] = builder_detail::shoot(oracle, abc, Y, mu, cplx(tn[i]), opt.ode_tol);
        Chebyshev fit = Chebyshev::fit(opt.t_max, vals);
        fit.denoise();
        // t = 0 is a node with an exactly zero shot; pin the interpolant too
        fit.coeff[0] -= fit(cplx(0.0));
        if (std::abs(fit(cplx(0.0))) > 1e-13)
            throw HypothesisViolated("interpolant failed to vanish at t = 0");
        // held-out shots off the node grid, on a thinned sample subset
        if (j % 8 == 0) {
            for (double f : {0.37, -0.61}) {
                const cplx t(f * opt.t_max);
                held[std::size_t(j)] =
                    std::max(held[std::size_t(j)],
                             std::abs(fit(t) - builder_detail::shoot(oracle, abc, Y, mu, t,
                                                                     opt.ode_tol)));
            }
        }
        sg.fits[std::size_t(j)] = std::move(fit);
    });
    sg.fit_residual = *std::max_element(held.begin(), held.end());
    return sg;
}

struct ConditionReport {
    bool ok = false;
    double lhs = 0.0;  // |(Q lambda1 - lambda2) / (Q - 1)|, circle radius is 1
};

// Eq 107.60 admissibility: with Q = Y'(0) B wy(0) / (A wx(0)), the point
// |(Q lambda1 - lambda2)/(Q - 1)| must lie outside the working circle.
// The canonical curve gives Q = 1 exactly: infinite margin.
inline ConditionReport check_condition_10760(const SolutionOracle& oracle,
                                             const ABCTriple& abc, cplx lambda1,
                                             cplx lambda2, const TransversalCurve& Y) {
    abc.validate();
    const auto g = oracle.grad(cplx(0.0), cplx(0.0), cplx(0.0));
    const cplx q = Y.dy(cplx(0.0)) * abc.B * g[1] / (abc.A * g[0]);
    const cplx num = q * lambda1 - lambda2;
    if (std::abs(q - 1.0) < 1e-12 * (1.0 + std::abs(q))) {
        if (std::abs(num) < 1e-12 * (std::abs(lambda1) + std::abs(lambda2)))
            throw QEqualsOne("both numerator and denominator degenerate");
        return {true, std::numeric_limits<double>::infinity()};
    }
    const double lhs = std::abs(num / (q - 1.0));
    return {lhs > 1.0, lhs};
}

// Inverse-transform round trip: w_rec(x, y, z) = psi( w~(x, Y^{-1}(y), z) )
// where w~ is the wave solution of the sampled gluing and psi is the
// oracle's trace on the curve, psi(t) = w(t, Y(t), 0).
inline WaveField reconstruct(const SampledGluing& sg, cplx lambda1, cplx lambda2,
                             cplx lambda3, const TransversalCurve& Y,
                             const std::function<cplx(cplx)>& psi, const GridBox& grid,
                             const SolverOptions& opt_in = {}, int jobs = 1) {
    SolverOptions opt = opt_in;
    opt.half_order = sg.half_order;  // sampled gluings pin the circle grid
    const GluingFunction g = sg.as_gluing();

    WaveField out;
    out.field = ScalarField3(grid);
    std::vector<std::vector<std::pair<std::size_t, std::string>>> strip_holes(
        std::size_t(grid.res[0]));

    parallel_strips(grid.res[0], jobs, [&](int i) {
        std::optional<std::pair<CircleFunction, CircleFunction>> warm;
        for (int j = 0; j < grid.res[1]; ++j) {
            for (int k = 0; k < grid.res[2]; ++k) {
                const cplx x(grid.coord(0, i)), z(grid.coord(2, k));
                try {
                    const cplx yt = Y.inverse(cplx(grid.coord(1, j)));
                    const ScaffoldedGluing scaf =
                        wave_scaffold(g, lambda1, lambda2, lambda3, x, yt, z,
                                      opt.half_order);
                    const RiemannSolution sol =
                        solve_riemann_newton(scaf.as_gluing(), opt, warm);
                    out.field.at(i, j, k) = psi(sol.sigma_plus.mode(0));
                    warm = std::make_pair(sol.sigma_plus, sol.sigma_minus);
                } catch (const Error& e) {
                    out.field.at(i, j, k) =
                        cplx(std::numeric_limits<double>::quiet_NaN(),
                             std::numeric_limits<double>::quiet_NaN());
                    strip_holes[std::size_t(i)].emplace_back(out.field.index(i, j, k),
                                                             e.code());
                    warm.reset();
                }
            }
        }
    });
    for (auto& sh : strip_holes)
        out.holes.insert(out.holes.end(), sh.begin(), sh.end());
    return out;
}

// psi for reconstruct, straight from the source oracle.
inline std::function<cplx(cplx)> curve_trace(const SolutionOracle& oracle,
                                             const TransversalCurve& Y) {
    return [oracle, Y](cplx t) { return oracle.w(t, Y.y(t), cplx(0.0)); };
}

}  // namespace twistor
