#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "twistor/errors.hpp"

namespace twistor {

// Uniform real 3-D grid description: origin + spacings + resolutions.
struct GridBox {
    std::array<double, 3> origin{0.0, 0.0, 0.0};
    std::array<double, 3> extent{0.0, 0.0, 0.0};  // full edge lengths
    std::array<int, 3> res{1, 1, 1};

    static GridBox centered_cube(double radius, int n) {
        GridBox b;
        b.origin = {-radius, -radius, -radius};
        b.extent = {2.0 * radius, 2.0 * radius, 2.0 * radius};
        b.res = {n, n, n};
        return b;
    }

    double spacing(int axis) const {
        return res[std::size_t(axis)] > 1
                   ? extent[std::size_t(axis)] / double(res[std::size_t(axis)] - 1)
                   : 0.0;
    }
    double coord(int axis, int i) const {
        return origin[std::size_t(axis)] + spacing(axis) * double(i);
    }
};

// Complex-valued field sampled on a uniform real grid, row-major with z
// fastest.  NaN entries mark invalid points (boundary ring of residual
// fields, unsolved holes).
struct ScalarField3 {
    GridBox box;
    std::vector<std::complex<double>> values;

    ScalarField3() = default;
    explicit ScalarField3(const GridBox& b)
        : box(b),
          values(std::size_t(b.res[0]) * std::size_t(b.res[1]) * std::size_t(b.res[2]),
                 std::complex<double>(0.0)) {}

    std::size_t index(int i, int j, int k) const {
        return (std::size_t(i) * std::size_t(box.res[1]) + std::size_t(j)) *
                   std::size_t(box.res[2]) +
               std::size_t(k);
    }
    std::complex<double>& at(int i, int j, int k) { return values[index(i, j, k)]; }
    const std::complex<double>& at(int i, int j, int k) const { return values[index(i, j, k)]; }

    static bool valid(std::complex<double> v) {
        return !std::isnan(v.real()) && !std::isnan(v.imag());
    }

    double max_abs_valid() const {
        double m = 0.0;
        for (const auto& v : values)
            if (valid(v)) m = std::max(m, std::abs(v));
        return m;
    }
};

}  // namespace twistor
