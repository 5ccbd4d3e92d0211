#pragma once

// Incomplete Eisenstein series E_f(z) = sum over Gamma_inf \ Gamma of f(Im gamma z)
// for a height profile f supported in [y_lo, y_hi] with y_lo >= 1.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "equidist/error.hpp"
#include "equidist/modular/upper_half.hpp"

namespace equidist::modular {

class BumpProfile {
public:
    enum class Kind { indicator, smooth };

    BumpProfile(Kind kind, double y_lo, double y_hi, double amplitude = 1.0)
        : kind_(kind), y_lo_(y_lo), y_hi_(y_hi), amplitude_(amplitude) {
        detail::require(y_lo_ >= 1.0, "BumpProfile: support must lie in [1, inf)");
        detail::require(y_hi_ > y_lo_ && std::isfinite(y_hi_), "BumpProfile: need y_lo < y_hi < inf");
        detail::require(std::isfinite(amplitude_), "BumpProfile: amplitude must be finite");
    }

    static BumpProfile indicator(double y_lo, double y_hi) { return {Kind::indicator, y_lo, y_hi}; }
    /// exp(4 - 1/(u(1-u))) with u the relative position in the support; peak value 1.
    static BumpProfile smooth(double y_lo, double y_hi) { return {Kind::smooth, y_lo, y_hi}; }

    BumpProfile scaled(double s) const { return {kind_, y_lo_, y_hi_, amplitude_ * s}; }

    double operator()(double y) const {
        if (kind_ == Kind::indicator) return (y >= y_lo_ && y <= y_hi_) ? amplitude_ : 0.0;
        if (y <= y_lo_ || y >= y_hi_) return 0.0;
        const double u = (y - y_lo_) / (y_hi_ - y_lo_);
        return amplitude_ * std::exp(4.0 - 1.0 / (u * (1.0 - u)));
    }

    Kind kind() const { return kind_; }
    double y_lo() const { return y_lo_; }
    double y_hi() const { return y_hi_; }
    double amplitude() const { return amplitude_; }

private:
    Kind kind_;
    double y_lo_, y_hi_, amplitude_;
};

/// mu(E_f) = (3/pi) integral of f(y) y^{-2} dy, by unfolding.
inline double mu_integral(const BumpProfile& f) {
    using boost::math::quadrature::gauss_kronrod;
    double err = 0.0;
    const double v = gauss_kronrod<double, 61>::integrate(
        [&](double y) { return f(y) / (y * y); }, f.y_lo(), f.y_hi(), 20, 1e-13, &err);
    detail::ensure(err <= 1e-9 * std::max(1.0, std::abs(v)), "mu_integral: quadrature did not converge");
    return 3.0 / std::numbers::pi * v;
}

class EisensteinObservable {
public:
    explicit EisensteinObservable(BumpProfile profile, double constant = 0.0)
        : profile_(std::move(profile)), constant_(constant) {}

    /// The constant function c (no Eisenstein part).
    static EisensteinObservable constant(double c) { return EisensteinObservable(c); }

    const std::optional<BumpProfile>& profile() const { return profile_; }
    double constant_term() const { return constant_; }

    /// Sum over coprime (c, d) up to sign of f(y / |cz + d|^2), enumerated at z
    /// itself: |c| <= 1/sqrt(y y_lo) and, for each c, the d-window where the
    /// height reaches y_lo.
    double direct(UpperHalfPoint z) const {
        if (!profile_) return constant_;
        const BumpProfile& f = *profile_;
        double acc = f(z.y);
        const double c_max = 1.0 / std::sqrt(z.y * f.y_lo());
        for (long c = 1; static_cast<double>(c) <= c_max; ++c) {
            const double cd = static_cast<double>(c);
            const double s2 = z.y / f.y_lo() - cd * cd * z.y * z.y;
            if (s2 < 0.0) continue;
            const double s = std::sqrt(s2);
            const double center = -cd * z.x;
            for (long d = static_cast<long>(std::ceil(center - s)); static_cast<double>(d) <= center + s; ++d) {
                if (std::gcd(c, d) != 1) continue;
                const double re = cd * z.x + static_cast<double>(d);
                acc += f(z.y / (re * re + cd * cd * z.y * z.y));
            }
        }
        return acc + constant_;
    }

    /// E_f(z), evaluated at the reduced representative.
    double operator()(UpperHalfPoint z) const { return direct(reduce(z)); }

    /// mu of the observable.
    double mu() const { return constant_ + (profile_ ? mu_integral(*profile_) : 0.0); }

private:
    explicit EisensteinObservable(double c) : constant_(c) {}

    std::optional<BumpProfile> profile_;
    double constant_ = 0.0;
};

/// (3/pi) integral of E over the fundamental domain with area dx dy / y^2.
/// Independent of the unfolding: integrates the enumerated sum directly,
/// splitting each vertical line at the heights where a term enters or leaves
/// the support.
inline double mu_fundamental_domain(const EisensteinObservable& obs, double tol = 1e-9) {
    using boost::math::quadrature::gauss_kronrod;
    if (!obs.profile()) return obs.constant_term();
    const BumpProfile& f = *obs.profile();
    const double top = std::max(f.y_hi(), 2.0);

    auto column = [&](double x) {
        const double bottom = std::sqrt(std::max(0.0, 1.0 - x * x));
        std::vector<double> cuts{bottom, top};
        for (double level : {f.y_lo(), f.y_hi()}) {
            cuts.push_back(level);
            // y / ((x + d)^2 + y^2) = level
            for (int d = -1; d <= 1; ++d) {
                const double u = x + d;
                const double disc = 1.0 / (level * level) - 4.0 * u * u;
                if (disc < 0.0) continue;
                cuts.push_back(0.5 * (1.0 / level + std::sqrt(disc)));
                cuts.push_back(0.5 * (1.0 / level - std::sqrt(disc)));
            }
        }
        std::sort(cuts.begin(), cuts.end());
        double total = 0.0;
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            const double a = std::max(cuts[k], bottom), b = std::min(cuts[k + 1], top);
            if (b <= a) continue;
            double err = 0.0;
            total += gauss_kronrod<double, 31>::integrate(
                [&](double y) { return obs.direct({x, y}) / (y * y); }, a, b, 12, tol, &err);
        }
        return total;
    };
    double err = 0.0;
    const double v = gauss_kronrod<double, 31>::integrate(column, -0.5, 0.5, 12, tol, &err);
    detail::ensure(err <= 1e-6 * std::max(1.0, std::abs(v)),
                   "mu_fundamental_domain: quadrature did not converge");
    return 3.0 / std::numbers::pi * v;
}

/// Surrogate for a C^k norm of the profile: max_{j<=k} sup |f^{(j)}| on a
/// dense grid, derivatives by fourth-order central differences.
inline double profile_ck_norm(const BumpProfile& f, int k = 1, int grid = 4096) {
    detail::require(k >= 0 && k <= 2, "profile_ck_norm: k must be 0, 1 or 2");
    const double h = (f.y_hi() - f.y_lo()) / grid;
    double best = 0.0;
    for (int i = 0; i <= grid; ++i) {
        const double y = f.y_lo() + i * h;
        best = std::max(best, std::abs(f(y)));
        if (k >= 1) {
            const double d1 = (-f(y + 2 * h) + 8 * f(y + h) - 8 * f(y - h) + f(y - 2 * h)) / (12 * h);
            best = std::max(best, std::abs(d1));
        }
        if (k >= 2) {
            const double d2 = (-f(y + 2 * h) + 16 * f(y + h) - 30 * f(y) + 16 * f(y - h) - f(y - 2 * h)) /
                              (12 * h * h);
            best = std::max(best, std::abs(d2));
        }
    }
    return best;
}

} // namespace equidist::modular
