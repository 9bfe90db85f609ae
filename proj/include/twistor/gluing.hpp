#pragma once

#include <functional>
#include <string>
#include <utility>

#include "twistor/circle.hpp"
#include "twistor/errors.hpp"

namespace twistor {

// Transition map g(lambda, t) on annulus x t-disk.  Closed-form gluings
// carry analytic eval/dt closures; ODE-sampled gluings wrap per-sample
// polynomial interpolants behind the same surface.
struct GluingFunction {
    std::function<cplx(cplx, cplx)> eval;
    std::function<cplx(cplx, cplx)> dt;      // d/dt of eval
    double epsilon = 0.5;                    // annulus eps < |lambda| < 1/eps
    double delta = 1.0;                      // t-disk radius
    bool zero_preserving = false;            // g(lambda, 0) == 0
    std::string kind = "closed-form";        // closed-form | sampled

    static GluingFunction closed_form(std::function<cplx(cplx, cplx)> eval,
                                      std::function<cplx(cplx, cplx)> dt,
                                      double delta, bool zero_preserving,
                                      double epsilon = 0.5) {
        GluingFunction g;
        g.eval = std::move(eval);
        g.dt = std::move(dt);
        g.delta = delta;
        g.zero_preserving = zero_preserving;
        g.epsilon = epsilon;
        return g;
    }
};

// lambda |-> g(lambda, sigma(lambda)) on the circle samples.
inline CircleFunction compose_gluing(const GluingFunction& g, const CircleFunction& sigma) {
    const int m = sigma.sample_count();
    std::vector<cplx> out(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) {
        const cplx t = sigma.sample(j);
        if (std::abs(t) >= g.delta)
            throw TArgumentOutOfDisk("|sigma(lambda_j)| = " + std::to_string(std::abs(t)) +
                                     " >= delta = " + std::to_string(g.delta));
        out[std::size_t(j)] = g.eval(sigma.sample_point(j), t);
    }
    return CircleFunction::from_samples(std::move(out));
}

// Same composition for the t-derivative.
inline CircleFunction compose_gluing_dt(const GluingFunction& g, const CircleFunction& sigma) {
    const int m = sigma.sample_count();
    std::vector<cplx> out(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) {
        const cplx t = sigma.sample(j);
        if (std::abs(t) >= g.delta)
            throw TArgumentOutOfDisk("|sigma(lambda_j)| >= delta");
        out[std::size_t(j)] = g.dt(sigma.sample_point(j), t);
    }
    return CircleFunction::from_samples(std::move(out));
}

}  // namespace twistor
