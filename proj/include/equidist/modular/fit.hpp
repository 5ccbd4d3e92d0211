#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "equidist/error.hpp"

namespace equidist::modular {

struct DecayFit {
    double exponent = 0.0;  ///< k in  error ~ prefactor * Delta^{-k}
    double prefactor = 0.0;
    double residual = 0.0;  ///< RMS residual in log(error)
};

/// Least squares on  log error = log prefactor - exponent * log Delta,
/// with Delta supplied by its logarithm.
inline DecayFit fit_decay_log(std::span<const double> log_deltas, std::span<const double> errors) {
    detail::require(log_deltas.size() == errors.size(), "fit_decay: length mismatch");
    detail::require(log_deltas.size() >= 3, "fit_decay: need at least three points");
    const double n = static_cast<double>(errors.size());
    double mx = 0.0, my = 0.0;
    std::vector<double> ys;
    for (std::size_t k = 0; k < errors.size(); ++k) {
        detail::require(errors[k] > 0.0 && std::isfinite(errors[k]), "fit_decay: errors must be positive");
        detail::require(std::isfinite(log_deltas[k]), "fit_decay: Delta must be finite and positive");
        ys.push_back(std::log(errors[k]));
        mx += log_deltas[k];
        my += ys.back();
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < ys.size(); ++k) {
        sxx += (log_deltas[k] - mx) * (log_deltas[k] - mx);
        sxy += (log_deltas[k] - mx) * (ys[k] - my);
    }
    detail::require(sxx > 1e-24 * n * std::max(1.0, mx * mx), "fit_decay: Delta values are all equal");
    const double slope = sxy / sxx;
    DecayFit fit;
    fit.exponent = -slope;
    const double intercept = my - slope * mx;
    fit.prefactor = std::exp(intercept);
    double ss = 0.0;
    for (std::size_t k = 0; k < ys.size(); ++k) {
        const double r = ys[k] - (intercept + slope * log_deltas[k]);
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / n);
    return fit;
}

inline DecayFit fit_decay(std::span<const double> deltas, std::span<const double> errors) {
    std::vector<double> logs;
    for (double d : deltas) {
        detail::require(d > 0.0, "fit_decay: Delta must be positive");
        logs.push_back(std::log(d));
    }
    return fit_decay_log(logs, errors);
}

} // namespace equidist::modular
