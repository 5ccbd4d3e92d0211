#pragma once

#include <cmath>

#include "equidist/error.hpp"

namespace equidist::modular {

struct IntegralEstimate {
    double lhs = 0.0; ///< (1/R^2) int_0^R int_0^R max(1, |u - v|)^{-c} du dv
    double rhs = 0.0; ///< 7 R^{-c} / (1 - c)
    bool pass = false;
};

/// Closed form of the double integral: with g(s) = max(1, s)^{-c},
///   int int g(|u - v|) = 2 int_0^R (R - s) g(s) ds
///   = 2 [ R - 1/2 + R (R^{1-c} - 1)/(1 - c) - (R^{2-c} - 1)/(2 - c) ].
inline IntegralEstimate check_integral_estimate(double R, double c) {
    detail::require(R >= 1.0 && std::isfinite(R), "check_integral_estimate: need R >= 1");
    detail::require(c > 0.0 && c < 0.5, "check_integral_estimate: need 0 < c < 1/2");
    const double inner = R - 0.5 + R * (std::pow(R, 1.0 - c) - 1.0) / (1.0 - c) -
                         (std::pow(R, 2.0 - c) - 1.0) / (2.0 - c);
    IntegralEstimate out;
    out.lhs = 2.0 * inner / (R * R);
    out.rhs = 7.0 * std::pow(R, -c) / (1.0 - c);
    out.pass = out.lhs <= out.rhs;
    return out;
}

} // namespace equidist::modular
