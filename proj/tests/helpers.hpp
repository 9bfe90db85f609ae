#pragma once

#include <complex>
#include <random>
#include <vector>

#include "twistor/circle.hpp"

namespace testutil {

using twistor::cplx;

inline double rel_err(cplx got, cplx want) {
    const double scale = std::max(1.0, std::abs(want));
    return std::abs(got - want) / scale;
}

// max over samples of |f - g| relative to max |g|
inline double sample_dist(const twistor::CircleFunction& f,
                          const twistor::CircleFunction& g) {
    double num = 0.0, den = 1e-300;
    for (int j = 0; j < f.sample_count(); ++j) {
        num = std::max(num, std::abs(f.sample(j) - g.sample(j)));
        den = std::max(den, std::abs(g.sample(j)));
    }
    return num / den;
}

inline std::mt19937& rng() {
    static std::mt19937 r(20240817u);
    return r;
}

inline double runif(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng());
}

inline cplx crand(double scale = 1.0) {
    return {runif(-scale, scale), runif(-scale, scale)};
}

// random trigonometric polynomial with geometrically decaying modes
inline twistor::CircleFunction random_trig(int half_order, double amp = 1.0,
                                           double decay = 0.7) {
    std::vector<cplx> modes(2 * std::size_t(half_order), cplx(0.0));
    for (int k = -half_order; k < half_order; ++k)
        modes[std::size_t(k + half_order)] = crand(amp * std::pow(decay, std::abs(k)));
    return twistor::CircleFunction::from_modes(half_order, std::move(modes));
}

// nonvanishing index-0 circle function: 1 + small random trig polynomial
// whose spectral tail is far below the splitting tolerances
inline twistor::CircleFunction random_nonvanishing(int half_order) {
    std::vector<cplx> modes(2 * std::size_t(half_order), cplx(0.0));
    modes[std::size_t(half_order)] = cplx(1.0);
    for (int k = -half_order; k < half_order; ++k)
        if (k != 0)
            modes[std::size_t(k + half_order)] =
                crand(0.04 * std::pow(0.42, std::abs(k)));
    return twistor::CircleFunction::from_modes(half_order, std::move(modes));
}

}  // namespace testutil
