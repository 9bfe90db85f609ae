#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <type_traits>

#include "twistor/errors.hpp"

namespace twistor {

namespace ode_detail {

inline double abs_max(const std::complex<double>& v) { return std::abs(v); }

template <std::size_t N>
inline double abs_max(const std::array<std::complex<double>, N>& v) {
    double m = 0.0;
    for (const auto& x : v) m = std::max(m, std::abs(x));
    return m;
}

inline std::complex<double> axpy(std::complex<double> a, const std::complex<double>& x,
                                 const std::complex<double>& y) {
    return y + a * x;
}

template <std::size_t N>
inline std::array<std::complex<double>, N> axpy(std::complex<double> a,
                                                const std::array<std::complex<double>, N>& x,
                                                const std::array<std::complex<double>, N>& y) {
    std::array<std::complex<double>, N> r;
    for (std::size_t i = 0; i < N; ++i) r[i] = y[i] + a * x[i];
    return r;
}

}  // namespace ode_detail

// Dormand-Prince 5(4) embedded pair with step control.  Integrates
// dy/dx = f(x, y) along the straight segment from x0 to x1 in the complex
// x-plane (the independent variable is the real segment parameter).
template <class State>
State integrate_ode(const std::function<State(std::complex<double>, const State&)>& f,
                    std::complex<double> x0, std::complex<double> x1, State y,
                    double tol = config::ode_tol) {
    using ode_detail::abs_max;
    using ode_detail::axpy;
    using cd = std::complex<double>;

    const cd dir = x1 - x0;
    if (abs_max(State(y)) != abs_max(State(y)))  // NaN guard on entry
        throw ODEStepFailure("NaN initial state");
    if (std::abs(dir) == 0.0) return y;

    auto rhs = [&](double s, const State& v) -> State {
        State g = f(x0 + s * dir, v);
        // chain rule for the segment parameterization
        if constexpr (std::is_same_v<State, cd>) {
            return dir * g;
        } else {
            State r = g;
            for (auto& c : r) c *= dir;
            return r;
        }
    };

    static constexpr double a21 = 1.0 / 5.0;
    static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                            a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
    static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                            a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                            a65 = -5103.0 / 18656.0;
    static constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                            b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
    static constexpr double e1 = 35.0 / 384.0 - 5179.0 / 57600.0,
                            e3 = 500.0 / 1113.0 - 7571.0 / 16695.0,
                            e4 = 125.0 / 192.0 - 393.0 / 640.0,
                            e5 = -2187.0 / 6784.0 + 92097.0 / 339200.0,
                            e6 = 11.0 / 84.0 - 187.0 / 2100.0, e7 = -1.0 / 40.0;

    double s = 0.0;
    double h = 0.1;
    int rejected_in_a_row = 0;
    for (int step = 0; step < 100000 && s < 1.0; ++step) {
        h = std::min(h, 1.0 - s);
        const State k1 = rhs(s, y);
        const State k2 = rhs(s + h * a21, axpy(h * a21, k1, y));
        State t = axpy(h * a31, k1, y);
        const State k3 = rhs(s + h * (a31 + a32), axpy(h * a32, k2, t));
        t = axpy(h * a41, k1, y);
        t = axpy(h * a42, k2, t);
        const State k4 = rhs(s + h * 0.8, axpy(h * a43, k3, t));
        t = axpy(h * a51, k1, y);
        t = axpy(h * a52, k2, t);
        t = axpy(h * a53, k3, t);
        const State k5 = rhs(s + h * (8.0 / 9.0), axpy(h * a54, k4, t));
        t = axpy(h * a61, k1, y);
        t = axpy(h * a62, k2, t);
        t = axpy(h * a63, k3, t);
        t = axpy(h * a64, k4, t);
        const State k6 = rhs(s + h, axpy(h * a65, k5, t));
        t = axpy(h * b1, k1, y);
        t = axpy(h * b3, k3, t);
        t = axpy(h * b4, k4, t);
        t = axpy(h * b5, k5, t);
        const State y5 = axpy(h * b6, k6, t);
        const State k7 = rhs(s + h, y5);

        State err = axpy(h * e1, k1, State{});
        err = axpy(h * e3, k3, err);
        err = axpy(h * e4, k4, err);
        err = axpy(h * e5, k5, err);
        err = axpy(h * e6, k6, err);
        err = axpy(h * e7, k7, err);
        const double en = abs_max(err);
        if (en != en || abs_max(y5) != abs_max(y5))
            throw ODEStepFailure("non-finite state during integration");

        const double scale = tol * std::max(1.0, abs_max(y5));
        if (en <= scale) {
            s += h;
            y = y5;
            rejected_in_a_row = 0;
            const double grow = en == 0.0 ? 5.0 : 0.9 * std::pow(scale / en, 0.2);
            h *= std::clamp(grow, 0.2, 5.0);
        } else {
            if (++rejected_in_a_row > 60)
                throw ODEStepFailure("step size collapsed at s = " + std::to_string(s));
            h *= std::clamp(0.9 * std::pow(scale / en, 0.25), 0.05, 0.9);
        }
    }
    if (s < 1.0) throw ODEStepFailure("step budget exhausted");
    return y;
}

}  // namespace twistor
