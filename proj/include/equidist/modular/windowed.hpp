#pragma once

// Windowed horocycle averages
//   phi_L = (1/L) int_0^L xi(s w) (phi o exp(s Ad(t) w) - mu(phi)) ds
// on the modular surface, where Lie(U) = R, w = w_scale, xi(v) = e(xi v) and
// Ad(t) multiplies by e^t. Also a Monte Carlo estimate of mu(|phi_L|^2).

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "equidist/error.hpp"
#include "equidist/modular/eisenstein.hpp"
#include "equidist/modular/upper_half.hpp"
#include "equidist/wiener.hpp"

namespace equidist::modular {

struct WindowedValue {
    std::complex<double> value;
    double error_estimate = 0.0; ///< |Kronrod - Gauss| summed over panels
};

/// phi_L at the frame g. The horocycle segment of length R = L w_scale e^t is
/// split into max(8, 4R) panels, each integrated with the 15-point Kronrod rule.
inline WindowedValue windowed_average(const EisensteinObservable& obs, int xi, double w_scale, double t,
                                      double L, const FramePoint& g, int panels = 0) {
    using boost::math::quadrature::gauss_kronrod;
    detail::require(L > 0.0 && std::isfinite(L), "windowed_average: L must be positive");
    detail::require(w_scale > 0.0, "windowed_average: w_scale must be positive");
    const double speed = w_scale * std::exp(t);
    const double R = L * speed;
    detail::require(std::isfinite(R), "windowed_average: L ||Ad(t) w|| overflows");
    const double mu = obs.mu();
    if (panels <= 0) panels = static_cast<int>(std::max(8.0, std::ceil(4.0 * R)));
    const double h = L / panels;

    WindowedValue out;
    for (int k = 0; k < panels; ++k) {
        double err = 0.0;
        out.value += gauss_kronrod<double, 15>::integrate(
            [&](double s) {
                return wiener::unit_phase(xi * s * w_scale) * (obs(g.flow(s * speed)) - mu);
            },
            k * h, (k + 1) * h, 0, 0.0, &err);
        out.error_estimate += err;
    }
    out.value /= L;
    out.error_estimate /= L;
    detail::ensure(std::isfinite(out.value.real()) && std::isfinite(out.value.imag()),
                   "windowed_average: non-finite quadrature result");
    return out;
}

inline WindowedValue windowed_average(const EisensteinObservable& obs, int xi, double w_scale, double t,
                                      double L, UpperHalfPoint z, int panels = 0) {
    return windowed_average(obs, xi, w_scale, t, L, FramePoint{z.x, z.y, 0.0}, panels);
}

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit engine draw.
inline double unit_uniform(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

/// Haar-random frame on X: base point uniform in the fundamental domain for
/// dx dy / y^2 (rejection from the strip y >= sqrt(3)/2), angle uniform.
inline FramePoint sample_haar_frame(std::mt19937_64& eng) {
    const double y0 = std::sqrt(3.0) / 2.0;
    while (true) {
        const double x = unit_uniform(eng) - 0.5;
        const double y = y0 / (1.0 - unit_uniform(eng));
        const double th = 2.0 * std::numbers::pi * unit_uniform(eng);
        if (x * x + y * y >= 1.0) return {x, y, th};
    }
}

struct MonteCarloEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t samples = 0;
};

/// mu(|phi_L|^2) by Monte Carlo over Haar-random frames.
inline MonteCarloEstimate windowed_second_moment(const EisensteinObservable& obs, int xi, double w_scale,
                                                 double t, double L, std::size_t samples, std::uint64_t seed) {
    detail::require(samples >= 2, "windowed_second_moment: need at least two samples");
    std::mt19937_64 eng(seed);
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t k = 0; k < samples; ++k) {
        const FramePoint g = sample_haar_frame(eng);
        const double v = std::norm(windowed_average(obs, xi, w_scale, t, L, g).value);
        sum += v;
        sum2 += v * v;
    }
    const double n = static_cast<double>(samples);
    MonteCarloEstimate out;
    out.samples = samples;
    out.mean = sum / n;
    out.std_error = std::sqrt(std::max(0.0, sum2 / n - out.mean * out.mean) / (n - 1.0));
    return out;
}

} // namespace equidist::modular
