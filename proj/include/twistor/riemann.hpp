#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "twistor/circle.hpp"
#include "twistor/errors.hpp"
#include "twistor/field.hpp"
#include "twistor/gluing.hpp"
#include "twistor/parallel.hpp"
#include "twistor/scaffold.hpp"

namespace twistor {

struct RiemannSolution {
    CircleFunction sigma_plus;   // modes k >= 0 only
    CircleFunction sigma_minus;  // modes k <= 0 only
    double residual_norm = 0.0;  // max_j |sigma_minus - g(lambda_j, sigma_plus)|
    int newton_iters = 0;
    bool tail_alert = false;  // spectral tail above the adequacy threshold
};

struct SolverOptions {
    int half_order = config::default_half_order;
    double tol = config::default_tol;
    int max_iters = config::default_max_iters;
    // strict mode: throw SpectralTailTooFat instead of recording tail_alert
    bool check_tail = false;
};

namespace detail {

inline double residual_norm(const CircleFunction& sm, const CircleFunction& gval) {
    double r = 0.0;
    for (int j = 0; j < sm.sample_count(); ++j)
        r = std::max(r, std::abs(sm.sample(j) - gval.sample(j)));
    return r;
}

inline void check_t_disk(const GluingFunction& g, const CircleFunction& sp) {
    if (sp.max_abs() >= g.delta)
        throw LeftTDisk("sigma_plus escaped |t| < delta = " + std::to_string(g.delta));
}

}  // namespace detail

// Newton iteration for sigma_minus(lambda) = g(lambda, sigma_plus(lambda)).
// Each linearized step is solved exactly in truncated modes through the
// Birkhoff factorization of phi = dg/dt(lambda, sigma_plus):
//   phi = lambda a+ / a-,   a- (g - sigma_minus) = lambda h+ + h-,
//   sigma_plus  -= h+ / a+,   sigma_minus += h- / a-.
inline RiemannSolution solve_riemann_newton(
    const GluingFunction& g, const SolverOptions& opt = {},
    std::optional<std::pair<CircleFunction, CircleFunction>> start = std::nullopt) {
    const int n = opt.half_order;
    CircleFunction sp = start ? start->first : CircleFunction(n);
    CircleFunction sm = start ? start->second
                              : compose_gluing(g, CircleFunction(n)).restrict_nonpositive();
    detail::check_t_disk(g, sp);

    CircleFunction gval = compose_gluing(g, sp);
    double res = detail::residual_norm(sm, gval);
    int iters = 0;
    while (res >= opt.tol) {
        if (iters >= opt.max_iters)
            throw MaxItersExceeded("residual " + std::to_string(res) + " after " +
                                   std::to_string(iters) + " Newton steps");
        const CircleFunction phi = compose_gluing_dt(g, sp);
        const BirkhoffFactors bf = birkhoff_factor(phi);
        if (bf.index != 1)
            throw IndexNotOne("ind dg/dt(lambda, sigma_plus) = " + std::to_string(bf.index));
        const CircleFunction rho = bf.aminus * (gval - sm);
        auto [hp, hm] = h_split(rho);
        sp = (sp - hp / bf.aplus).restrict_nonnegative();
        sm = (sm + hm / bf.aminus).restrict_nonpositive();
        detail::check_t_disk(g, sp);
        gval = compose_gluing(g, sp);
        res = detail::residual_norm(sm, gval);
        ++iters;
    }
    const bool alert = !sp.tail_ok();
    if (opt.check_tail && alert)
        throw SpectralTailTooFat("sigma_plus spectral tail above adequacy threshold");
    return {std::move(sp), std::move(sm), res, iters, alert};
}

// One-parameter family kappa |-> g_kappa with its kappa-derivative,
// deforming from a known solution at kappa = 0 to the target at kappa = 1.
struct GluingFamily {
    std::function<cplx(double, cplx, cplx)> eval;    // (kappa, lambda, t)
    std::function<cplx(double, cplx, cplx)> dt;
    std::function<cplx(double, cplx, cplx)> dkappa;
    double epsilon = 0.5;
    double delta = 1.0;

    GluingFunction at(double kappa) const {
        GluingFunction g;
        g.eval = [this, kappa](cplx l, cplx t) { return eval(kappa, l, t); };
        g.dt = [this, kappa](cplx l, cplx t) { return dt(kappa, l, t); };
        g.epsilon = epsilon;
        g.delta = delta;
        return g;
    }
};

// Scaffold family with boundary values scaled by kappa; the kappa = 0
// member is zero-preserving, so the path starts at sigma = 0.
inline GluingFamily scaled_value_family(const GluingFunction& base, const NodeSet& nodes,
                                        std::vector<cplx> inner_values,
                                        std::vector<cplx> outer_values) {
    GluingFamily fam;
    fam.epsilon = base.epsilon;
    fam.delta = std::numeric_limits<double>::infinity();
    auto scaffold_at = [base, nodes, inner_values, outer_values](double kappa) {
        std::vector<cplx> a(inner_values), b(outer_values);
        for (cplx& v : a) v *= kappa;
        for (cplx& v : b) v *= kappa;
        return ScaffoldedGluing(base, nodes, std::move(a), std::move(b));
    };
    fam.eval = [scaffold_at](double kappa, cplx l, cplx t) {
        return scaffold_at(kappa).eval(l, t);
    };
    fam.dt = [scaffold_at](double kappa, cplx l, cplx t) {
        return scaffold_at(kappa).dt(l, t);
    };
    // dG/dkappa = F-^{-1} ( dg/dt(lambda,t~) d t~/dkappa - sum b_l F-_l )
    fam.dkappa = [base, nodes, inner_values, outer_values](double kappa, cplx l, cplx t) {
        const ScaffoldFactors f = scaffold_factors(nodes, l);
        cplx tt = t * f.fplus, dtt(0.0);
        for (std::size_t i = 0; i < inner_values.size(); ++i) {
            tt += kappa * inner_values[i] * f.fplus_l[i];
            dtt += inner_values[i] * f.fplus_l[i];
        }
        cplx acc = base.dt(l, tt) * dtt;
        for (std::size_t i = 0; i < outer_values.size(); ++i)
            acc -= outer_values[i] * f.fminus_l[i];
        return acc / f.fminus;
    };
    return fam;
}

// Integrates the solution path d(sigma+,sigma-)/dkappa with the classical
// 4th-order scheme over a fixed step count, then polishes with Newton.
// Velocity at state sigma_plus: with phi = dg/dt(lambda, sigma_plus) and
// a- dg/dkappa = lambda B+ + B-, the velocity is (-B+/a+, B-/a-).
inline RiemannSolution solve_riemann_homotopy(const GluingFamily& family,
                                              const SolverOptions& opt = {},
                                              int steps = config::default_homotopy_steps) {
    const int n = opt.half_order;
    CircleFunction sp(n), sm(n);

    auto velocity = [&](double kappa, const CircleFunction& sigma_plus)
        -> std::pair<CircleFunction, CircleFunction> {
        const GluingFunction g = family.at(kappa);
        const CircleFunction phi = compose_gluing_dt(g, sigma_plus);
        const BirkhoffFactors bf = birkhoff_factor(phi);
        if (bf.index != 1)
            throw IndexNotOne("homotopy path index = " + std::to_string(bf.index));
        std::vector<cplx> dk(std::size_t(2 * n));
        for (int j = 0; j < 2 * n; ++j) {
            const cplx lam = sigma_plus.sample_point(j);
            dk[std::size_t(j)] = family.dkappa(kappa, lam, sigma_plus.sample(j));
        }
        const CircleFunction u = bf.aminus * CircleFunction::from_samples(std::move(dk));
        auto [bp, bm] = h_split(u);
        return {(cplx(-1.0) * (bp / bf.aplus)).restrict_nonnegative(),
                (bm / bf.aminus).restrict_nonpositive()};
    };

    const double h = 1.0 / double(steps);
    for (int s = 0; s < steps; ++s) {
        const double kappa = h * double(s);
        try {
            auto k1 = velocity(kappa, sp);
            auto k2 = velocity(kappa + 0.5 * h, sp + cplx(0.5 * h) * k1.first);
            auto k3 = velocity(kappa + 0.5 * h, sp + cplx(0.5 * h) * k2.first);
            auto k4 = velocity(kappa + h, sp + cplx(h) * k3.first);
            const cplx w1(h / 6.0), w2(h / 3.0);
            sp = sp + w1 * k1.first + w2 * k2.first + w2 * k3.first + w1 * k4.first;
            sm = sm + w1 * k1.second + w2 * k2.second + w2 * k3.second + w1 * k4.second;
        } catch (const TArgumentOutOfDisk& e) {
            throw PathLeftValidityRegion(std::string("at kappa = ") + std::to_string(kappa) +
                                         ": " + e.what());
        }
    }
    return solve_riemann_newton(family.at(1.0), opt, std::make_pair(sp, sm));
}

enum class SolveMethod { newton, homotopy };

// The nonlinear Riemann transform: sigma_plus evaluated at 0.
inline cplx riemann_transform(const GluingFunction& g, const SolverOptions& opt = {}) {
    return solve_riemann_newton(g, opt).sigma_plus.mode(0);
}

// Reassembles the full solution of the unscaffolded problem from the
// solution of the scaffolded one:
//   sigma+ = sigma~+ F+ + sum a_l F+_l,   sigma- = sigma~- F- + sum b_l F-_l.
inline std::pair<CircleFunction, CircleFunction> reassemble(const ScaffoldedGluing& sg,
                                                            const RiemannSolution& sol) {
    const int n = sol.sigma_plus.half_order();
    std::vector<cplx> plus(std::size_t(2 * n)), minus(std::size_t(2 * n));
    for (int j = 0; j < 2 * n; ++j) {
        const cplx lam = sol.sigma_plus.sample_point(j);
        const ScaffoldFactors f = scaffold_factors(sg.nodes(), lam);
        cplx p = sol.sigma_plus.sample(j) * f.fplus;
        for (std::size_t l = 0; l < sg.inner_values().size(); ++l)
            p += sg.inner_values()[l] * f.fplus_l[l];
        cplx m = sol.sigma_minus.sample(j) * f.fminus;
        for (std::size_t l = 0; l < sg.outer_values().size(); ++l)
            m += sg.outer_values()[l] * f.fminus_l[l];
        plus[std::size_t(j)] = p;
        minus[std::size_t(j)] = m;
    }
    return {CircleFunction::from_samples(std::move(plus)),
            CircleFunction::from_samples(std::move(minus))};
}

struct WaveField {
    ScalarField3 field;
    // (flat index, diagnostic code) for every grid point that failed to solve
    std::vector<std::pair<std::size_t, std::string>> holes;
};

// Sweeps the grid, solving the scaffolded Riemann problem per point with
// nearest-neighbor warm starts.  Strips are x-slices, each serially
// warm-started from its own first column, so the partition (and hence the
// output) is independent of the job count.
inline WaveField wave_solution(const GluingFunction& g, cplx lambda1, cplx lambda2, cplx lambda3,
                               const GridBox& grid, const SolverOptions& opt = {},
                               int jobs = 1) {
    if (!g.zero_preserving)
        throw NodePlacement("wave_solution requires a zero-preserving gluing function");
    {
        const CircleFunction dg0 = compose_gluing_dt(g, CircleFunction(opt.half_order));
        const int idx = winding_index(dg0);
        if (idx != -2)
            throw IndexNotOne("wave_solution requires ind dg/dt(.,0) = -2, got " +
                              std::to_string(idx));
    }
    WaveField out;
    out.field = ScalarField3(grid);
    std::vector<std::vector<std::pair<std::size_t, std::string>>> strip_holes(
        std::size_t(grid.res[0]));

    parallel_strips(grid.res[0], jobs, [&](int i) {
        std::optional<std::pair<CircleFunction, CircleFunction>> warm;
        for (int j = 0; j < grid.res[1]; ++j) {
            for (int k = 0; k < grid.res[2]; ++k) {
                const cplx x(grid.coord(0, i)), y(grid.coord(1, j)), z(grid.coord(2, k));
                try {
                    const ScaffoldedGluing sg =
                        wave_scaffold(g, lambda1, lambda2, lambda3, x, y, z, opt.half_order);
                    RiemannSolution sol = solve_riemann_newton(sg.as_gluing(), opt, warm);
                    if (sol.tail_alert) {
                        // Newton can land on an aliased branch whose tail
                        // carries spurious mass; the homotopy path from
                        // sigma = 0 stays on the true one.
                        const GluingFamily fam = scaled_value_family(
                            g, NodeSet{{lambda1, lambda2}, {lambda3}}, {x, y}, {z});
                        // a short path suffices: the terminal Newton polish
                        // (inside the homotopy solver) does the converging
                        RiemannSolution hom = solve_riemann_homotopy(fam, opt, 16);
                        if (!hom.tail_alert) sol = std::move(hom);
                    }
                    out.field.at(i, j, k) = sol.sigma_plus.mode(0);
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

}  // namespace twistor
