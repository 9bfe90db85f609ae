#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <utility>
#include <vector>

#include "twistor/errors.hpp"

namespace twistor {

using cplx = std::complex<double>;

namespace detail {

// In-place radix-2 FFT, sign = -1 forward / +1 inverse (no normalization).
// Falls back to the direct O(n^2) transform for non power-of-two sizes.
inline void fft(std::vector<cplx>& a, int sign) {
    const std::size_t n = a.size();
    if (n < 2) return;
    if ((n & (n - 1)) != 0) {
        std::vector<cplx> out(n, cplx(0.0));
        const double base = sign * 2.0 * std::numbers::pi / double(n);
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t m = 0; m < n; ++m)
                out[j] += a[m] * std::polar(1.0, base * double(j * m % n));
        a = std::move(out);
        return;
    }
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * std::numbers::pi / double(len);
        const cplx wl = std::polar(1.0, ang);
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                cplx u = a[i + k];
                cplx v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

}  // namespace detail

// Truncated Laurent series on the unit circle, kept in both the
// coefficient view (modes c_k, k in [-N, N-1]) and the sample view
// (values at lambda_j = exp(pi i j / N), j = 0 .. 2N-1).  Immutable.
class CircleFunction {
public:
    explicit CircleFunction(int half_order)
        : n_(half_order),
          modes_(2 * std::size_t(half_order), cplx(0.0)),
          samples_(2 * std::size_t(half_order), cplx(0.0)) {}

    static CircleFunction from_samples(std::vector<cplx> samples) {
        CircleFunction f(int(samples.size()) / 2);
        f.samples_ = std::move(samples);
        f.modes_ = f.samples_;
        detail::fft(f.modes_, -1);
        const double inv = 1.0 / double(f.samples_.size());
        // sample_j = sum_k c_k w^{jk}, w = exp(pi i / N); index k via k mod 2N
        for (std::size_t i = 0; i < f.modes_.size(); ++i) f.modes_[i] *= inv;
        f.modes_ = reorder_from_dft(f.modes_, f.n_);
        return f;
    }

    static CircleFunction from_modes(int half_order, std::vector<cplx> modes) {
        CircleFunction f(half_order);
        f.modes_ = std::move(modes);
        std::vector<cplx> dft = reorder_to_dft(f.modes_, half_order);
        detail::fft(dft, +1);
        f.samples_ = std::move(dft);
        return f;
    }

    template <class Fn>
    static CircleFunction from_function(int half_order, Fn&& fn) {
        std::vector<cplx> s(2 * std::size_t(half_order));
        for (std::size_t j = 0; j < s.size(); ++j)
            s[j] = fn(sample_point(half_order, int(j)));
        return from_samples(std::move(s));
    }

    // Single Laurent mode c * lambda^k.
    static CircleFunction monomial(int half_order, int k, cplx c = cplx(1.0)) {
        CircleFunction f(half_order);
        f.modes_[std::size_t(k + half_order)] = c;
        std::vector<cplx> dft = reorder_to_dft(f.modes_, half_order);
        detail::fft(dft, +1);
        f.samples_ = std::move(dft);
        return f;
    }

    int half_order() const { return n_; }
    int sample_count() const { return 2 * n_; }

    static cplx sample_point(int half_order, int j) {
        return std::polar(1.0, std::numbers::pi * double(j) / double(half_order));
    }
    cplx sample_point(int j) const { return sample_point(n_, j); }

    // Coefficient of lambda^k, k in [-N, N-1].
    cplx mode(int k) const { return modes_[std::size_t(k + n_)]; }
    const std::vector<cplx>& modes() const { return modes_; }
    cplx sample(int j) const { return samples_[std::size_t(j)]; }
    const std::vector<cplx>& samples() const { return samples_; }

    double max_abs() const {
        double m = 0.0;
        for (const cplx& s : samples_) m = std::max(m, std::abs(s));
        return m;
    }

    // Tail-mass adequacy: modes with |k| in the top quarter of the range
    // must carry a negligible share of the total coefficient mass.
    bool tail_ok(double rel = config::tail_mass_rel) const {
        double total = 0.0, tail = 0.0;
        const int cut = (3 * n_) / 4;
        for (int k = -n_; k < n_; ++k) {
            const double a = std::abs(mode(k));
            total += a;
            if (std::abs(k) >= cut) tail += a;
        }
        return total <= 1e-13 || tail <= rel * total;
    }

    // Taylor evaluation from the non-negative modes; valid when the
    // function is analytic in the disk (sigma_plus side).
    cplx eval_inside(cplx z) const {
        cplx acc(0.0);
        for (int k = n_ - 1; k >= 0; --k) acc = acc * z + mode(k);
        return acc;
    }

    // Laurent evaluation from the non-positive modes (sigma_minus side).
    cplx eval_outside(cplx z) const {
        const cplx zi = 1.0 / z;
        cplx acc(0.0);
        for (int k = -n_; k <= -1; ++k) acc = acc * zi + mode(k);
        acc *= zi;
        return acc + mode(0);
    }

    CircleFunction restrict_nonnegative() const {
        std::vector<cplx> m(modes_);
        for (int k = -n_; k < 0; ++k) m[std::size_t(k + n_)] = 0.0;
        return from_modes(n_, std::move(m));
    }

    CircleFunction restrict_nonpositive() const {
        std::vector<cplx> m(modes_);
        for (int k = 1; k < n_; ++k) m[std::size_t(k + n_)] = 0.0;
        return from_modes(n_, std::move(m));
    }

    friend CircleFunction operator+(const CircleFunction& a, const CircleFunction& b) {
        return zip(a, b, [](cplx x, cplx y) { return x + y; });
    }
    friend CircleFunction operator-(const CircleFunction& a, const CircleFunction& b) {
        return zip(a, b, [](cplx x, cplx y) { return x - y; });
    }
    friend CircleFunction operator*(const CircleFunction& a, const CircleFunction& b) {
        return zip(a, b, [](cplx x, cplx y) { return x * y; });
    }
    friend CircleFunction operator/(const CircleFunction& a, const CircleFunction& b) {
        return zip(a, b, [](cplx x, cplx y) { return x / y; });
    }
    friend CircleFunction operator*(cplx c, const CircleFunction& a) {
        std::vector<cplx> s(a.samples_);
        for (cplx& v : s) v *= c;
        return from_samples(std::move(s));
    }

private:
    template <class Op>
    static CircleFunction zip(const CircleFunction& a, const CircleFunction& b, Op op) {
        std::vector<cplx> s(a.samples_.size());
        for (std::size_t j = 0; j < s.size(); ++j) s[j] = op(a.samples_[j], b.samples_[j]);
        return from_samples(std::move(s));
    }

    // DFT bins hold mode k at index k mod 2N.
    static std::vector<cplx> reorder_to_dft(const std::vector<cplx>& modes, int n) {
        std::vector<cplx> dft(modes.size());
        for (int k = -n; k < n; ++k)
            dft[std::size_t((k + 2 * n) % (2 * n))] = modes[std::size_t(k + n)];
        return dft;
    }
    static std::vector<cplx> reorder_from_dft(const std::vector<cplx>& dft, int n) {
        std::vector<cplx> modes(dft.size());
        for (int k = -n; k < n; ++k)
            modes[std::size_t(k + n)] = dft[std::size_t((k + 2 * n) % (2 * n))];
        return modes;
    }

    int n_;
    std::vector<cplx> modes_;
    std::vector<cplx> samples_;
};

// Additive Riemann splitting: phi(lambda) = lambda*hplus(lambda) + hminus(lambda),
// hplus carrying modes k >= 0 (hplus_k = phi_{k+1}) and hminus modes k <= 0.
inline std::pair<CircleFunction, CircleFunction> h_split(const CircleFunction& phi) {
    const int n = phi.half_order();
    std::vector<cplx> plus(2 * std::size_t(n), cplx(0.0));
    std::vector<cplx> minus(2 * std::size_t(n), cplx(0.0));
    for (int k = 0; k < n - 1; ++k) plus[std::size_t(k + n)] = phi.mode(k + 1);
    for (int k = -n; k <= 0; ++k) minus[std::size_t(k + n)] = phi.mode(k);
    return {CircleFunction::from_modes(n, std::move(plus)),
            CircleFunction::from_modes(n, std::move(minus))};
}

namespace detail {

// Continuous-branch phase along the ordered samples, closed around the
// loop.  Returns per-sample unwrapped arguments plus the total increment.
struct UnwrappedPhase {
    std::vector<double> theta;
    double total;
};

inline UnwrappedPhase unwrap_phase(const CircleFunction& phi, double floor) {
    const int m = phi.sample_count();
    UnwrappedPhase u;
    u.theta.resize(std::size_t(m));
    double prev_raw = 0.0;
    for (int j = 0; j < m; ++j) {
        const cplx v = phi.sample(j);
        if (std::abs(v) <= floor)
            throw NearZeroOnCircle("sample " + std::to_string(j) + " has |phi| <= floor");
        const double raw = std::arg(v);
        if (j == 0) {
            u.theta[0] = raw;
        } else {
            double d = raw - prev_raw;
            while (d > std::numbers::pi) d -= 2.0 * std::numbers::pi;
            while (d < -std::numbers::pi) d += 2.0 * std::numbers::pi;
            if (std::abs(d) >= config::phase_jump_max)
                throw PhaseJumpTooLarge("adjacent-sample phase jump " + std::to_string(d));
            u.theta[std::size_t(j)] = u.theta[std::size_t(j - 1)] + d;
        }
        prev_raw = raw;
    }
    // closing jump from the last sample back to the first
    double d = std::arg(phi.sample(0)) - prev_raw;
    while (d > std::numbers::pi) d -= 2.0 * std::numbers::pi;
    while (d < -std::numbers::pi) d += 2.0 * std::numbers::pi;
    if (std::abs(d) >= config::phase_jump_max)
        throw PhaseJumpTooLarge("closing phase jump " + std::to_string(d));
    u.total = u.theta[std::size_t(m - 1)] + d - u.theta[0];
    return u;
}

}  // namespace detail

// Winding number of phi around 0 along the sample circle.
inline int winding_index(const CircleFunction& phi, double floor = config::index_floor) {
    const auto u = detail::unwrap_phase(phi, floor);
    return int(std::lround(u.total / (2.0 * std::numbers::pi)));
}

// Multiplicative splitting phi = mplus/mminus with mplus(0) = 1,
// mplus analytic inside, mminus analytic outside.  Requires ind phi = 0.
inline std::pair<CircleFunction, CircleFunction> mult_split(const CircleFunction& phi) {
    const auto u = detail::unwrap_phase(phi, config::index_floor);
    const int idx = int(std::lround(u.total / (2.0 * std::numbers::pi)));
    if (idx != 0) throw NonzeroIndex("ind phi = " + std::to_string(idx));
    const int n = phi.half_order();
    std::vector<cplx> log_samples(2 * std::size_t(n));
    for (int j = 0; j < 2 * n; ++j)
        log_samples[std::size_t(j)] =
            cplx(std::log(std::abs(phi.sample(j))), u.theta[std::size_t(j)]);
    const CircleFunction psi = CircleFunction::from_samples(std::move(log_samples));
    auto [hp, hm] = h_split(psi);

    std::vector<cplx> mp(2 * std::size_t(n)), mm(2 * std::size_t(n));
    for (int j = 0; j < 2 * n; ++j) {
        const cplx lam = phi.sample_point(j);
        mp[std::size_t(j)] = std::exp(lam * hp.sample(j));
        mm[std::size_t(j)] = std::exp(-hm.sample(j));
    }
    // aliasing from the samplewise exp leaves spectrally small stray modes;
    // project back onto the mode supports the splitting demands
    return {CircleFunction::from_samples(std::move(mp)).restrict_nonnegative(),
            CircleFunction::from_samples(std::move(mm)).restrict_nonpositive()};
}

struct BirkhoffFactors {
    int index;
    CircleFunction aplus;
    CircleFunction aminus;
};

// phi = lambda^n * aplus / aminus, n the winding index.
inline BirkhoffFactors birkhoff_factor(const CircleFunction& phi) {
    const int n = winding_index(phi);
    const int half = phi.half_order();
    std::vector<cplx> reduced(2 * std::size_t(half));
    for (int j = 0; j < 2 * half; ++j)
        reduced[std::size_t(j)] = phi.sample(j) * std::pow(phi.sample_point(j), -n);
    auto [mp, mm] = mult_split(CircleFunction::from_samples(std::move(reduced)));
    return {n, std::move(mp), std::move(mm)};
}

}  // namespace twistor
