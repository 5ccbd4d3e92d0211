#pragma once

// Fourier data on the k-torus R^k / Z^k.
//
// A series stores the coefficients c_k of  f(x) = sum_k c_k e(<k, x>),
// e(s) = exp(2 pi i s). For a measure these are the coefficients of its
// density against Haar measure, so the Fourier transform at the character
// chi is c_{-chi}. Characters are integer vectors; psi_xi(x) = e(<xi, x>).

#include <cmath>
#include <complex>
#include <type_traits>
#include <cstddef>
#include <functional>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "equidist/error.hpp"
#include "equidist/summation.hpp"

namespace equidist::wiener {

using Complex = std::complex<double>;
using Frequency = std::vector<int>;

/// e(s) = exp(2 pi i s)
inline Complex unit_phase(double s) {
    const double a = 2.0 * std::numbers::pi * s;
    return {std::cos(a), std::sin(a)};
}

inline double pairing(std::span<const int> k, std::span<const double> x) {
    double acc = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i) acc += k[i] * x[i];
    return acc;
}

struct measure_tag {};
struct observable_tag {};

/// Finitely supported coefficient map, optionally standing in for a summable
/// series through a certified bound on the discarded tail.
template <class Tag>
class TorusSeries {
public:
    using Coefficients = std::map<Frequency, Complex>;

    explicit TorusSeries(std::size_t dim) : dim_(dim) {
        detail::require(dim_ >= 1, "TorusSeries: dimension must be positive");
    }

    TorusSeries(std::size_t dim, const Coefficients& coeffs, double tail_bound = 0.0)
        : TorusSeries(dim) {
        detail::require(tail_bound >= 0.0 && std::isfinite(tail_bound),
                        "TorusSeries: tail bound must be finite and nonnegative");
        tail_bound_ = tail_bound;
        for (const auto& [k, v] : coeffs) add(k, v);
    }

    /// Haar measure / constant function 1.
    static TorusSeries haar(std::size_t dim) {
        TorusSeries s(dim);
        s.add(Frequency(dim, 0), 1.0);
        return s;
    }

    std::size_t dim() const { return dim_; }
    double tail_bound() const { return tail_bound_; }
    const Coefficients& coefficients() const { return coeffs_; }
    std::size_t support_size() const { return coeffs_.size(); }

    Complex coefficient(const Frequency& k) const {
        auto it = coeffs_.find(k);
        return it == coeffs_.end() ? Complex{} : it->second;
    }

    /// Adds v to the coefficient at k; exact zeros are not stored.
    void add(const Frequency& k, Complex v) {
        detail::require(k.size() == dim_, "TorusSeries: frequency has wrong dimension");
        detail::require(std::isfinite(v.real()) && std::isfinite(v.imag()),
                        "TorusSeries: non-finite coefficient");
        Complex& slot = coeffs_[k];
        slot += v;
        if (slot == Complex{}) coeffs_.erase(k);
    }

    /// Conjugate symmetry c_{-k} = conj(c_k), i.e. a real-valued density.
    bool is_real(double tol = 1e-14) const {
        for (const auto& [k, v] : coeffs_) {
            Frequency neg(k);
            for (int& x : neg) x = -x;
            if (std::abs(coefficient(neg) - std::conj(v)) > tol) return false;
        }
        return true;
    }

    Complex evaluate(std::span<const double> x) const {
        detail::require(x.size() == dim_, "TorusSeries: point has wrong dimension");
        std::vector<Complex> terms;
        terms.reserve(coeffs_.size());
        for (const auto& [k, v] : coeffs_) terms.push_back(v * unit_phase(pairing(k, x)));
        return pairwise_sum(terms);
    }

    /// Coefficients of x -> f(x + w).
    TorusSeries translate(std::span<const double> w) const {
        detail::require(w.size() == dim_, "TorusSeries: translation has wrong dimension");
        TorusSeries out(dim_);
        out.tail_bound_ = tail_bound_;
        for (const auto& [k, v] : coeffs_) out.add(k, v * unit_phase(pairing(k, w)));
        return out;
    }

    TorusSeries& operator+=(const TorusSeries& other) {
        detail::require(other.dim_ == dim_, "TorusSeries: dimension mismatch");
        for (const auto& [k, v] : other.coeffs_) add(k, v);
        tail_bound_ += other.tail_bound_;
        return *this;
    }
    friend TorusSeries operator+(TorusSeries a, const TorusSeries& b) { return a += b; }

    friend TorusSeries operator*(Complex s, const TorusSeries& f) {
        TorusSeries out(f.dim_);
        out.tail_bound_ = std::abs(s) * f.tail_bound_;
        for (const auto& [k, v] : f.coeffs_) out.add(k, s * v);
        return out;
    }

    // Measure-only API.

    /// sigma-hat(chi) = integral of e(<chi, x>) d sigma = c_{-chi}.
    Complex fourier_transform(const Frequency& chi) const
        requires std::is_same_v<Tag, measure_tag>
    {
        Frequency neg(chi);
        for (int& x : neg) x = -x;
        return coefficient(neg);
    }

    bool is_probability(double tol = 1e-14) const
        requires std::is_same_v<Tag, measure_tag>
    {
        return std::abs(coefficient(Frequency(dim_, 0)) - 1.0) <= tol && is_real(tol);
    }

private:
    std::size_t dim_;
    Coefficients coeffs_;
    double tail_bound_ = 0.0;
};

using TorusMeasure = TorusSeries<measure_tag>;
using TorusObservable = TorusSeries<observable_tag>;

/// Builds a finite truncation of a summable series: every frequency with
/// max |k_i| <= radius. The caller must certify the discarded mass.
template <class Tag>
TorusSeries<Tag> truncate(std::size_t dim, int radius, const std::function<Complex(const Frequency&)>& coef,
                          double tail_bound) {
    detail::require(radius >= 0, "truncate: radius must be nonnegative");
    detail::require(std::isfinite(tail_bound) && tail_bound >= 0.0,
                    "truncate: an infinite series needs a finite certified tail bound");
    TorusSeries<Tag> out(dim, {}, tail_bound);
    Frequency k(dim, -radius);
    while (true) {
        out.add(k, coef(k));
        std::size_t i = 0;
        while (i < dim && k[i] == radius) k[i++] = -radius;
        if (i == dim) break;
        ++k[i];
    }
    return out;
}

/// ||f||_W = sum_k |c_k| (plus the certified tail bound, if any).
template <class Tag>
double wiener_norm(const TorusSeries<Tag>& f) {
    std::vector<double> mags;
    mags.reserve(f.support_size());
    for (const auto& [k, v] : f.coefficients()) mags.push_back(std::abs(v));
    return pairwise_sum(mags) + f.tail_bound();
}

/// Pointwise product f g in the Wiener algebra (coefficient convolution).
template <class Tag>
TorusSeries<Tag> multiply(const TorusSeries<Tag>& f, const TorusSeries<Tag>& g) {
    detail::require(f.dim() == g.dim(), "multiply: dimension mismatch");
    TorusSeries<Tag> out(f.dim());
    for (const auto& [k, a] : f.coefficients())
        for (const auto& [m, b] : g.coefficients()) {
            Frequency s(k);
            for (std::size_t i = 0; i < s.size(); ++i) s[i] += m[i];
            out.add(s, a * b);
        }
    return out;
}

/// Convolution of measures: densities convolve, coefficients multiply.
inline TorusMeasure convolve(const TorusMeasure& sigma, const TorusMeasure& tau) {
    detail::require(sigma.dim() == tau.dim(), "convolve: dimension mismatch");
    TorusMeasure out(sigma.dim());
    for (const auto& [k, a] : sigma.coefficients()) out.add(k, a * tau.coefficient(k));
    return out;
}

/// The functional nu_xi(eta) = integral of psi_xi * eta d nu, evaluated
/// exactly on trigonometric polynomials by coefficient pairing.
class TwistedFunctional {
public:
    TwistedFunctional(TorusMeasure nu, Frequency xi) : nu_(std::move(nu)), xi_(std::move(xi)) {
        detail::require(xi_.size() == nu_.dim(), "character_twist: frequency has wrong dimension");
    }

    Complex operator()(const TorusObservable& eta) const {
        detail::require(eta.dim() == nu_.dim(), "character_twist: observable has wrong dimension");
        std::vector<Complex> terms;
        for (const auto& [k, h] : eta.coefficients()) {
            Frequency partner(k.size());
            for (std::size_t i = 0; i < k.size(); ++i) partner[i] = -xi_[i] - k[i];
            const Complex c = nu_.coefficient(partner);
            if (c != Complex{}) terms.push_back(h * c);
        }
        return pairwise_sum(terms);
    }

    const Frequency& frequency() const { return xi_; }
    const TorusMeasure& measure() const { return nu_; }

private:
    TorusMeasure nu_;
    Frequency xi_;
};

inline TwistedFunctional character_twist(const TorusMeasure& nu, const Frequency& xi) {
    return TwistedFunctional(nu, xi);
}

struct Defect {
    Complex lhs;
    Complex rhs;
    double defect = 0.0;
};

/// Translation equivariance of nu_xi: nu_xi(eta o T_w) against xi(-w) nu_xi(eta).
/// Exact for translation-invariant (Haar) nu; a non-invariant nu shows a defect.
inline Defect equivariance_check(const TorusMeasure& nu, const Frequency& xi,
                                 std::span<const double> w, const TorusObservable& eta) {
    const auto twist = character_twist(nu, xi);
    Defect out;
    out.lhs = twist(eta.translate(w));
    out.rhs = unit_phase(-pairing(xi, w)) * twist(eta);
    out.defect = std::abs(out.lhs - out.rhs);
    return out;
}

struct ExpansionCheck {
    Complex direct;
    Complex expanded;
    double defect = 0.0;           ///< |direct - expanded|
    double certified_defect = 0.0; ///< defect + tail_bound * sup |Phi|
};

/// Compares sigma(Phi) computed directly with sum_k c_k nu_k(Phi), where c_k
/// are the density coefficients of sigma and nu_k the Haar twists.
/// `direct` returns sigma(Phi); `twisted(k)` returns nu_k(Phi).
template <class Direct, class Twisted>
ExpansionCheck character_expansion_check(const TorusMeasure& sigma, Direct&& direct, Twisted&& twisted,
                                         double phi_sup = 1.0) {
    ExpansionCheck out;
    out.direct = direct();
    std::vector<Complex> terms;
    terms.reserve(sigma.support_size());
    for (const auto& [k, c] : sigma.coefficients()) terms.push_back(c * Complex(twisted(k)));
    out.expanded = pairwise_sum(terms);
    out.defect = std::abs(out.direct - out.expanded);
    out.certified_defect = out.defect + sigma.tail_bound() * phi_sup;
    return out;
}

/// Visits the uniform grid with n points per axis, x_i = j_i / n.
inline void for_each_grid_point(std::size_t dim, std::size_t n,
                                const std::function<void(std::size_t, std::span<const double>)>& fn) {
    std::size_t total = 1;
    for (std::size_t i = 0; i < dim; ++i) total *= n;
    std::vector<double> x(dim);
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rem = idx;
        for (std::size_t i = 0; i < dim; ++i) {
            x[i] = static_cast<double>(rem % n) / static_cast<double>(n);
            rem /= n;
        }
        fn(idx, x);
    }
}

/// Rectangle rule on the n^dim grid; exact for trigonometric polynomials with
/// all |k_i| < n.
inline Complex grid_integral(std::size_t dim, std::size_t n,
                             const std::function<Complex(std::span<const double>)>& f) {
    detail::require(n >= 1, "grid_integral: need at least one node per axis");
    std::vector<Complex> vals;
    for_each_grid_point(dim, n, [&](std::size_t, std::span<const double> x) { vals.push_back(f(x)); });
    return pairwise_sum(vals) / static_cast<double>(vals.size());
}

/// max over the grid of |f(x)|.
template <class Tag>
double grid_sup(const TorusSeries<Tag>& f, std::size_t n) {
    double best = 0.0;
    for_each_grid_point(f.dim(), n, [&](std::size_t, std::span<const double> x) {
        best = std::max(best, std::abs(f.evaluate(x)));
    });
    return best;
}

} // namespace equidist::wiener
