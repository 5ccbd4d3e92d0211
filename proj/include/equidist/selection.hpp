#pragma once

// Pigeonhole choice of (p, q) and of the averaging window L.
//
// All comparisons are done on logarithms. When every quantity involved is an
// exact power of two the comparison is carried out in integer arithmetic on
// the exponents; otherwise a relative tolerance of 1e-12 decides ties.

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "equidist/error.hpp"
#include "equidist/geometry.hpp"

namespace equidist::selection {

inline constexpr double tie_tolerance = 1e-12;

/// A nonnegative quantity in log form, remembering an exact base-2 exponent
/// when the quantity is a power of two.
struct Quantity {
    double log = 0.0;                 // natural log; -inf for zero
    std::optional<std::int64_t> log2; // exact exponent when dyadic

    static Quantity from_value(double v) {
        detail::require(v >= 0.0 && std::isfinite(v), "quantity must be finite and nonnegative");
        Quantity q;
        q.log = v == 0.0 ? -INFINITY : std::log(v);
        if (v > 0.0) {
            int e = 0;
            if (std::frexp(v, &e) == 0.5) q.log2 = e - 1;
        }
        return q;
    }
    static Quantity from_log(double l) { return {l, std::nullopt}; }
    bool is_zero() const { return std::isinf(log) && log < 0; }
};

namespace detail_ {

/// Sign of  log x - (log y + (num/den) log theta). Zero means equal within
/// tolerance (or exactly, on the dyadic path).
inline int compare(const Quantity& x, const Quantity& y, std::int64_t num, std::int64_t den,
                   const Quantity& theta) {
    if (x.is_zero()) return y.is_zero() ? 0 : -1;
    if (y.is_zero()) return 1;
    if (x.log2 && y.log2 && theta.log2) {
        const std::int64_t lhs = den * *x.log2;
        const std::int64_t rhs = den * *y.log2 + num * *theta.log2;
        return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
    }
    const double lhs = x.log;
    const double rhs = y.log + static_cast<double>(num) / static_cast<double>(den) * theta.log;
    const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
    if (std::abs(lhs - rhs) <= tie_tolerance * scale) return 0;
    return lhs < rhs ? -1 : 1;
}

inline const Quantity& one() {
    static const Quantity q{0.0, 0};
    return q;
}

} // namespace detail_

struct PigeonholeResult {
    int p = 0; ///< 1 <= p <= r-1
    int q = 0; ///< 0 <= q <= r-2
    friend bool operator==(const PigeonholeResult&, const PigeonholeResult&) = default;
};

/// Smallest (p, q) in lexicographic order with
///   beta_{p+1} < beta_1 theta^{(q+1)/r} < beta_1 theta^{q/r} <= beta_p
/// (1-based beta). Requires beta nonincreasing, beta_1 > 0, beta_r <= beta_1 theta.
inline PigeonholeResult pigeonhole(std::span<const Quantity> beta, const Quantity& theta) {
    using detail_::compare;
    const auto r = static_cast<std::int64_t>(beta.size());
    detail::require(r >= 2, "pigeonhole: need r >= 2");
    detail::require(theta.log < 0.0 && !theta.is_zero(), "pigeonhole: theta must lie in (0,1)");
    detail::require(!beta[0].is_zero(), "pigeonhole: beta_1 must be positive");
    for (std::int64_t k = 0; k + 1 < r; ++k)
        detail::require(compare(beta[k + 1], beta[k], 0, 1, theta) <= 0,
                        "pigeonhole: betas must be nonincreasing");
    detail::require(compare(beta[r - 1], beta[0], 1, 1, theta) <= 0,
                    "pigeonhole: need beta_r <= beta_1 * theta");

    for (std::int64_t p = 1; p <= r - 1; ++p)
        for (std::int64_t q = 0; q <= r - 2; ++q) {
            // beta_{p+1} < beta_1 theta^{(q+1)/r}
            if (compare(beta[p], beta[0], q + 1, r, theta) >= 0) continue;
            // beta_1 theta^{q/r} <= beta_p
            if (compare(beta[p - 1], beta[0], q, r, theta) < 0) continue;
            return {static_cast<int>(p), static_cast<int>(q)};
        }
    throw numerical_error("pigeonhole: no admissible (p, q) found");
}

inline PigeonholeResult pigeonhole(std::span<const double> beta, double theta) {
    std::vector<Quantity> b;
    b.reserve(beta.size());
    for (double v : beta) b.push_back(Quantity::from_value(v));
    detail::require(theta > 0.0 && theta < 1.0, "pigeonhole: theta must lie in (0,1)");
    return pigeonhole(b, Quantity::from_value(theta));
}

struct InequalityCheck {
    double lhs_log = 0.0;   ///< log of the left-hand side
    double bound_log = 0.0; ///< log of the bound it is compared with
    bool holds = false;
};

struct WindowChoice {
    int p = 0;
    int q = 0;
    geometry::LogMagnitude L;
    double theta = 0.0;
    double log_theta = 0.0;
    InequalityCheck upper;     ///< L ||w^(1)||   <= theta^{-1}
    InequalityCheck lower;     ///< L ||w^(p)||   >= theta^{-1/(2r)} > 1
    InequalityCheck separated; ///< L ||w^(p+1)|| <  theta^{1/(2r)}
};

/// Applies the pigeonhole lemma to beta_i = ||w^(i)|| and sets
/// L = ||w^(1)||^{-1} theta^{-(q+1/2)/r}. The three window inequalities are
/// verified and reported; a violation raises numerical_error.
inline WindowChoice choose_window(std::span<const Quantity> norms, const Quantity& theta) {
    using detail_::compare;
    const auto r = static_cast<std::int64_t>(norms.size());
    detail::require(r >= 2, "choose_window: need r >= 2");
    detail::require(norms[0].log > 0.0, "choose_window: degenerate selection (M_r = 1)");
    detail::require(theta.log < 0.0 && !theta.is_zero(), "choose_window: theta must be < 1");
    // theta >= M_r^{-1}, i.e. 1 <= M_r * theta.
    detail::require(compare(detail_::one(), norms[0], 1, 1, theta) <= 0,
                    "choose_window: theta must be at least M_r^{-1}");

    const PigeonholeResult pq = pigeonhole(norms, theta);
    WindowChoice out;
    out.p = pq.p;
    out.q = pq.q;
    out.log_theta = theta.log;
    out.theta = std::exp(theta.log);
    const double rr = static_cast<double>(r);
    const double shift = -(static_cast<double>(pq.q) + 0.5) / rr * theta.log; // log(theta^{-(q+1/2)/r})
    out.L.log = -norms[0].log + shift;

    const auto& wp = norms[static_cast<std::size_t>(pq.p - 1)];
    const auto& wp1 = norms[static_cast<std::size_t>(pq.p)];

    out.upper = {shift, -theta.log, false};
    out.lower = {wp.log - norms[0].log + shift, -theta.log / (2.0 * rr), false};
    out.separated = {wp1.is_zero() ? -INFINITY : wp1.log - norms[0].log + shift,
                     theta.log / (2.0 * rr), false};

    const bool exact = theta.log2 && wp.log2 && norms[0].log2 && (wp1.is_zero() || wp1.log2);
    if (exact) {
        // 2r log2(L beta_k) = 2r (e_k - e_1) - (2q + 1) log2(theta)
        const std::int64_t s = *theta.log2;
        const std::int64_t base = -(2 * pq.q + 1) * s;
        out.upper.holds = base <= -2 * r * s;
        out.lower.holds = 2 * r * (*wp.log2 - *norms[0].log2) + base >= -s;
        out.separated.holds =
            wp1.is_zero() || 2 * r * (*wp1.log2 - *norms[0].log2) + base < s;
    } else {
        auto le = [](double a, double b) {
            return a <= b + tie_tolerance * std::max({1.0, std::abs(a), std::abs(b)});
        };
        out.upper.holds = le(out.upper.lhs_log, out.upper.bound_log);
        out.lower.holds = le(out.lower.bound_log, out.lower.lhs_log);
        out.separated.holds = out.separated.lhs_log < out.separated.bound_log;
    }
    detail::ensure(out.upper.holds && out.lower.holds && out.separated.holds,
                   "choose_window: window inequalities violated");
    return out;
}

inline WindowChoice choose_window(std::span<const double> norms, double theta) {
    std::vector<Quantity> b;
    for (double v : norms) b.push_back(Quantity::from_value(v));
    detail::require(theta > 0.0 && theta < 1.0, "choose_window: theta must lie in (0,1)");
    return choose_window(b, Quantity::from_value(theta));
}

inline WindowChoice choose_window(const geometry::DirectionSelection& sel, double log_theta) {
    detail::require(!sel.degenerate, "choose_window: degenerate selection (M_r = 1)");
    std::vector<Quantity> b;
    for (const auto& v : sel.images) b.push_back(Quantity::from_log(v.log));
    return choose_window(b, Quantity::from_log(log_theta));
}

} // namespace equidist::selection
