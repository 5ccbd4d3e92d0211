#pragma once

// r-correlations of incomplete Eisenstein series along translated closed
// horocycles.
//
// The closed horocycle {x + i : x in [0,1)} carries the Wiener probability
// measure sigma with density rho_sigma. Translating by the diagonal flow for
// time t >= 0 gives the closed horocycle {x + i e^{-t}}, which equidistributes
// as t grows. In U_{1,1} coordinates, time t is the point (t/2, t/2): the
// single root takes the value t and floor(.) = t/2.

#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "equidist/error.hpp"
#include "equidist/geometry.hpp"
#include "equidist/modular/eisenstein.hpp"
#include "equidist/summation.hpp"
#include "equidist/wiener.hpp"

namespace equidist::modular {

using Complex = std::complex<double>;

/// Largest admissible translation time (e^{-30} ~ 9e-14).
inline constexpr double max_time = 30.0;
inline constexpr std::size_t min_nodes = 16;

class HorocycleMeasure {
public:
    explicit HorocycleMeasure(wiener::TorusMeasure density) : density_(std::move(density)) {
        detail::require(density_.dim() == 1, "HorocycleMeasure: density must live on the circle");
        detail::require(density_.is_probability(1e-12),
                        "HorocycleMeasure: density must be real with zeroth coefficient 1");
        detail::require(std::isfinite(wiener::wiener_norm(density_)), "HorocycleMeasure: infinite Wiener norm");
    }

    static HorocycleMeasure haar() { return HorocycleMeasure(wiener::TorusMeasure::haar(1)); }

    const wiener::TorusMeasure& density() const { return density_; }
    double base_height() const { return 1.0; }
    double wiener_norm() const { return wiener::wiener_norm(density_); }

private:
    wiener::TorusMeasure density_;
};

struct CorrelationOptions {
    std::size_t nodes = std::size_t{1} << 14;
    int threads = 0; ///< 0: EQUIDIST_THREADS or 1
};

namespace detail_ {

inline void validate(std::size_t r_obs, std::span<const double> times, std::size_t nodes) {
    detail::require(r_obs >= 1, "correlation: need at least one observable");
    detail::require(times.size() == r_obs, "correlation: one time per observable");
    detail::require(nodes >= min_nodes, "correlation: need N >= 16 quadrature nodes");
    for (double t : times) {
        detail::require(t >= 0.0, "correlation: times must be nonnegative");
        detail::require(t <= max_time, "correlation: time " + std::to_string(t) +
                                           " exceeds 30; e^{-t} is below the resolvable height");
    }
}

} // namespace detail_

/// integral_0^1 e(xi x) rho_sigma(x) prod_i phi_i(x + i e^{-t_i}) dx by the
/// composite midpoint rule on N nodes. Summation is pairwise in node order,
/// so the value does not depend on the thread count.
inline Complex twisted_correlation(const HorocycleMeasure& sigma, int xi,
                                   std::span<const EisensteinObservable> observables,
                                   std::span<const double> times, const CorrelationOptions& opt = {}) {
    detail_::validate(observables.size(), times, opt.nodes);
    std::vector<double> heights;
    for (double t : times) heights.push_back(std::exp(-t));
    const double n = static_cast<double>(opt.nodes);
    auto term = [&](std::size_t k) -> Complex {
        const double x = (static_cast<double>(k) + 0.5) / n;
        const double xs[1] = {x};
        Complex v = sigma.density().evaluate(xs);
        if (xi != 0) v *= wiener::unit_phase(xi * x);
        for (std::size_t i = 0; i < observables.size(); ++i) v *= observables[i]({x, heights[i]});
        return v;
    };
    const auto terms = parallel_tabulate(opt.nodes, term, resolve_threads(opt.threads));
    return pairwise_sum(terms) / n;
}

inline Complex correlation(const HorocycleMeasure& sigma, std::span<const EisensteinObservable> observables,
                           std::span<const double> times, const CorrelationOptions& opt = {}) {
    return twisted_correlation(sigma, 0, observables, times, opt);
}

/// U_{1,1} coordinates (t/2, t/2) of modular time t.
inline geometry::Coordinates cone_point(double t) { return {0.5 * t, 0.5 * t}; }

/// Delta_r for modular times, via the U_{1,1} root action and rho = e^{floor}.
inline geometry::LogMagnitude modular_delta(std::span<const double> times) {
    std::vector<geometry::Coordinates> pts;
    for (double t : times) pts.push_back(cone_point(t));
    const auto action = geometry::RootAction::horospherical(1, 1);
    const geometry::TranslationTuple tuple(std::move(pts), geometry::Domain::cone(1, 1));
    return geometry::tuple_stats(action, tuple, geometry::floor_growth(1, 1)).Delta_r;
}

struct CorrelationSample {
    std::vector<double> times;
    geometry::LogMagnitude delta;
    Complex value;
    double mu_product = 0.0;
    double abs_error = 0.0;
    std::size_t nodes = 0;
};

/// One experiment row: correlation, the product of the mu(phi_i), and the
/// distance between them.
inline CorrelationSample sample_correlation(const HorocycleMeasure& sigma,
                                            std::span<const EisensteinObservable> observables,
                                            std::span<const double> times, const CorrelationOptions& opt = {}) {
    CorrelationSample s;
    s.times.assign(times.begin(), times.end());
    s.delta = modular_delta(times);
    s.value = correlation(sigma, observables, times, opt);
    s.mu_product = 1.0;
    for (const auto& o : observables) s.mu_product *= o.mu();
    s.abs_error = std::abs(s.value - s.mu_product);
    s.nodes = opt.nodes;
    return s;
}

} // namespace equidist::modular
