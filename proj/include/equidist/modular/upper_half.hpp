#pragma once

#include <cmath>
#include <complex>
#include <string>

#include "equidist/error.hpp"

namespace equidist::modular {

struct UpperHalfPoint {
    double x = 0.0;
    double y = 1.0;

    UpperHalfPoint() = default;
    UpperHalfPoint(double x_, double y_) : x(x_), y(y_) {
        detail::require(y > 0.0 && std::isfinite(x) && std::isfinite(y),
                        "UpperHalfPoint: need finite x and y > 0");
    }

    std::complex<double> as_complex() const { return {x, y}; }
    static UpperHalfPoint from_complex(std::complex<double> z) { return {z.real(), z.imag()}; }
};

/// Maximum number of translate/invert rounds in reduce().
inline constexpr int max_reduction_steps = 100000;

/// Representative in the standard fundamental domain |x| <= 1/2, |z| >= 1.
/// Boundary points are mapped to a canonical side (x = +1/2 on the vertical
/// edges, x >= 0 on the unit arc) so that Gamma-equivalent inputs agree.
inline UpperHalfPoint reduce(UpperHalfPoint z) {
    double x = z.x, y = z.y;
    for (int step = 0;; ++step) {
        detail::ensure(step < max_reduction_steps, "reduce: no convergence");
        x -= std::nearbyint(x);
        const double n2 = x * x + y * y;
        if (n2 >= 1.0) break;
        x = -x / n2;
        y = y / n2;
    }
    constexpr double snap = 1e-13;
    if (x < -0.5 + snap) x += 1.0;
    if (x * x + y * y < 1.0 + snap && x < 0.0) x = -x;
    return {x, y};
}

/// A point of X = SL_2(R)/SL_2(Z) as n(x) a(y) k(theta): base point x + iy
/// with the unit vector rotated by theta from vertical.
struct FramePoint {
    double x = 0.0;
    double y = 1.0;
    double theta = 0.0;

    /// Base point of the frame after flowing time s along the horocycle
    /// direction, g u(s) applied to i.
    UpperHalfPoint flow(double s) const {
        const double c = std::cos(theta), sn = std::sin(theta);
        const std::complex<double> w0(s, 1.0);
        const std::complex<double> w = (c * w0 + sn) / (-sn * w0 + c);
        return {x + y * w.real(), y * w.imag()};
    }
};

} // namespace equidist::modular
