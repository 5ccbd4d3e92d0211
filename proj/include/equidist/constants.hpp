#pragma once

// Constant ledgers for the r-correlation bounds.
//
// Given the equidistribution/mixing inputs and the growth constants of the
// norm family, builds the table (d_r, D_r, delta_r, eps_r) by the inductive
// recursion, either in the general form (D_r super-exponential, carried in
// logarithms) or in the explicit power-law form (D_r linear in r, valid above
// a per-r threshold on Delta_r).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "equidist/error.hpp"

namespace equidist::constants {

/// Growth constants of the norm family: S3 gives (B_d, b_d), S4 gives M_d.
struct NormGrowth {
    enum class Kind { tabulated, power_law };
    Kind kind = Kind::tabulated;

    // tabulated: entry k holds the value for d = k + 1
    std::vector<double> B, b, M;
    // power law: B_d = L1^d, b_d = ell * d, M_d = L2^d
    double L1 = 1.0, ell = 1.0, L2 = 1.0;

    static NormGrowth power_law(double L1, double ell, double L2) {
        NormGrowth g;
        g.kind = Kind::power_law;
        g.L1 = L1;
        g.ell = ell;
        g.L2 = L2;
        return g;
    }

    static NormGrowth tabulate(int d_max, const std::function<double(int)>& B_of,
                               const std::function<double(int)>& b_of,
                               const std::function<double(int)>& M_of) {
        NormGrowth g;
        for (int d = 1; d <= d_max; ++d) {
            g.B.push_back(B_of(d));
            g.b.push_back(b_of(d));
            g.M.push_back(M_of(d));
        }
        return g;
    }

    int max_degree() const {
        return kind == Kind::power_law ? std::numeric_limits<int>::max()
                                       : static_cast<int>(B.size());
    }

    double B_at(int d) const { return kind == Kind::power_law ? std::pow(L1, d) : lookup(B, d, "B"); }
    double b_at(int d) const { return kind == Kind::power_law ? ell * d : lookup(b, d, "b"); }
    double M_at(int d) const { return kind == Kind::power_law ? std::pow(L2, d) : lookup(M, d, "M"); }

private:
    static double lookup(const std::vector<double>& v, int d, const char* name) {
        detail::require(d >= 1 && d <= static_cast<int>(v.size()),
                        std::string("NormGrowth: ") + name + "_" + std::to_string(d) +
                            " is not tabulated");
        return v[static_cast<std::size_t>(d - 1)];
    }
};

struct AssumptionParams {
    int d_o = 1;
    double D_o = 1.0;     // EQ1 prefactor, >= 1
    double delta_o = 0.5; // EQ1 exponent, in (0, 1]
    double C = 1.0;       // EQ2 prefactor, >= 1
    double c = 0.25;      // EQ2 exponent, in (0, 1/2)
    double A = 1.0;       // S2 prefactor, >= 1
    double a = 1.0;       // S2 exponent, > 0
    NormGrowth growth;

    /// Range checks. Throws precondition_error on the first violation.
    void validate() const {
        detail::require(d_o >= 1, "params: d_o must be a positive integer");
        detail::require(D_o >= 1.0, "params: D_o must be >= 1");
        detail::require(delta_o > 0.0 && delta_o <= 1.0, "params: delta_o must lie in (0, 1]");
        detail::require(C >= 1.0, "params: C must be >= 1");
        detail::require(c > 0.0 && c < 0.5, "params: c must lie in (0, 1/2)");
        detail::require(A >= 1.0, "params: A must be >= 1");
        detail::require(a > 0.0 && std::isfinite(a), "params: a must be positive");
        const double b_floor = std::max(0.5, a / 4.0);
        if (growth.kind == NormGrowth::Kind::power_law) {
            detail::require(growth.L1 >= 1.0 && growth.L2 >= 1.0 && growth.ell >= 1.0,
                            "params: power-law growth needs L1, L2, ell >= 1");
            detail::require(growth.ell > b_floor, "params: b_d = ell*d must exceed max(1/2, a/4)");
        } else {
            detail::require(!growth.B.empty() && growth.B.size() == growth.b.size() &&
                                growth.B.size() == growth.M.size(),
                            "params: tabulated B, b, M must be nonempty and of equal length");
            for (std::size_t k = 0; k < growth.B.size(); ++k) {
                const std::string d = std::to_string(k + 1);
                detail::require(growth.B[k] >= 1.0, "params: B_" + d + " must be >= 1");
                detail::require(growth.M[k] >= 1.0, "params: M_" + d + " must be >= 1");
                detail::require(growth.b[k] > b_floor, "params: b_" + d + " must exceed max(1/2, a/4)");
            }
        }
    }

    /// c_1 = min(a/2, c/4)
    double c1() const { return std::min(a / 2.0, c / 4.0); }
    /// P_1 = sqrt(14 C)
    double P1() const { return std::sqrt(14.0 * C); }
    /// Q = 2 max(A, P_1)
    double Q() const { return 2.0 * std::max(A, P1()); }
    /// P_d = (M_d B_{d+d_o}^2 + 2 B_d^2)^{1/(2 b_{d+d_o})}
    double P(int d) const {
        const double Bd = growth.B_at(d), Bdo = growth.B_at(d + d_o);
        return std::pow(growth.M_at(d) * Bdo * Bdo + 2.0 * Bd * Bd, 1.0 / (2.0 * growth.b_at(d + d_o)));
    }
    /// B'_{d_o} = M_{d_o} B_{2 d_o}^2 + 2 B_{d_o}
    double B_prime() const {
        const double B2 = growth.B_at(2 * d_o);
        return growth.M_at(d_o) * B2 * B2 + 2.0 * growth.B_at(d_o);
    }
};

enum class LedgerMode { theorem_a, theorem_b };

inline const char* to_string(LedgerMode m) {
    return m == LedgerMode::theorem_a ? "theorem-A" : "theorem-B";
}

struct LedgerRow {
    int r = 0;
    int d = 0;                 ///< d_r
    long double log_D = 0.0L;  ///< ln D_r (authoritative; D may overflow)
    double delta = 0.0;        ///< delta_r
    double eps = std::numeric_limits<double>::quiet_NaN(); ///< eps_r, undefined for r = 1
    double P_prev = std::numeric_limits<double>::quiet_NaN(); ///< P_{d_{r-1}}
    double Q_r = std::numeric_limits<double>::quiet_NaN();    ///< theorem-B only
    double log_threshold = 0.0; ///< ln of the Delta_r the row requires (theorem-B: P^{1/eps_r})

    double D() const { return static_cast<double>(std::exp(log_D)); }
    double log10_D() const { return static_cast<double>(log_D / std::log(10.0L)); }
};

struct BoundLedger {
    LedgerMode mode = LedgerMode::theorem_a;
    int d_o = 1;
    double c_1 = 0.0, P_1 = 0.0, Q = 0.0, B_prime = 0.0, D1_prime = 0.0;
    std::map<int, double> P_d;
    std::vector<LedgerRow> rows;

    // theorem-B extras
    double lambda = std::numeric_limits<double>::quiet_NaN();
    double gamma = std::numeric_limits<double>::quiet_NaN();
    double H_1 = std::numeric_limits<double>::quiet_NaN();
    double log_H_2 = std::numeric_limits<double>::quiet_NaN();
    double growth_bound = std::numeric_limits<double>::quiet_NaN(); ///< L1 (L2 + 2)

    int r_max() const { return static_cast<int>(rows.size()); }

    const LedgerRow& row(int r) const {
        detail::require(r >= 1 && r <= r_max(), "ledger: no row for r = " + std::to_string(r));
        return rows[static_cast<std::size_t>(r - 1)];
    }

    double H_2() const { return std::exp(log_H_2); }

    /// ln of the global threshold H_2^{(r-1)! r! (r+1)! lambda^r}.
    double log_theorem_threshold(int r) const {
        const double lf = std::lgamma(r) + std::lgamma(r + 1.0) + std::lgamma(r + 2.0);
        return std::exp(lf + r * std::log(lambda)) * log_H_2;
    }

    /// ln of the factorial lower bound 1 / ((r!)^2 (r+1)! lambda^r).
    double log_factorial_floor(int r) const { return log_factorial_floor(r, lambda); }

    static double log_factorial_floor(int r, double lambda) {
        return -(2.0 * std::lgamma(r + 1.0) + std::lgamma(r + 2.0) + r * std::log(lambda));
    }
};

/// Row r = 1: d_1 = 2 d_o, delta_1 = c delta_o / (2(c + 2 b_{2 d_o})),
/// D_1 = max(D_o, 5 max(sqrt C, sqrt(D_o B'_{d_o}))).
inline LedgerRow base_case(const AssumptionParams& params, BoundLedger* ledger = nullptr) {
    params.validate();
    const double Bp = params.B_prime();
    const double D1p = 5.0 * std::max(std::sqrt(params.C), std::sqrt(params.D_o * Bp));
    LedgerRow row;
    row.r = 1;
    row.d = 2 * params.d_o;
    row.delta = params.c * params.delta_o / (2.0 * (params.c + 2.0 * params.growth.b_at(2 * params.d_o)));
    row.log_D = std::log(static_cast<long double>(std::max(params.D_o, D1p)));
    detail::ensure(row.delta < params.delta_o && params.delta_o <= 1.0,
                   "base_case: expected delta_1 < delta_o <= 1");
    if (ledger) {
        ledger->d_o = params.d_o;
        ledger->B_prime = Bp;
        ledger->D1_prime = D1p;
        ledger->c_1 = params.c1();
        ledger->P_1 = params.P1();
        ledger->Q = params.Q();
    }
    return row;
}

namespace detail_ {

inline long double log_add(long double x, long double y) {
    const long double hi = std::max(x, y), lo = std::min(x, y);
    return hi + std::log1p(std::exp(lo - hi));
}

/// Shared part of a recursion step: d_r, eps_r, delta_r, P_{d_{r-1}}.
inline LedgerRow step_common(const AssumptionParams& params, BoundLedger& ledger, int r) {
    detail::require(r >= 2, "recurse: r must be at least 2");
    detail::require(ledger.r_max() == r - 1,
                    "recurse: ledger must be filled through r - 1 = " + std::to_string(r - 1));
    const LedgerRow& prev = ledger.rows.back();
    const int d_prev = prev.d;
    const double b = params.growth.b_at(d_prev + params.d_o);
    const double c1 = params.c1();
    const double rr = r;
    const double denom = 2.0 * c1 / rr + 2.0 * rr * b;

    LedgerRow row;
    row.r = r;
    row.d = d_prev + params.d_o;
    row.eps = prev.delta / denom;
    row.delta = c1 * prev.delta / (rr * denom);
    row.P_prev = params.P(d_prev);
    ledger.P_d[d_prev] = row.P_prev;
    detail::ensure(row.eps > 0.0 && row.eps < 1.0, "recurse: eps_r left (0,1)");
    detail::ensure(row.delta > 0.0 && row.delta < prev.delta, "recurse: delta_r not decreasing");
    return row;
}

} // namespace detail_

/// Theorem-A step: D_r = 2 P_1 P_{d_{r-1}}^{r b_{d_{r-1}+d_o}} D_{r-1}^{1/2} + r Q.
inline LedgerRow recurse(const AssumptionParams& params, BoundLedger& ledger, int r) {
    params.validate();
    LedgerRow row = detail_::step_common(params, ledger, r);
    const LedgerRow& prev = ledger.rows.back();
    const long double b = params.growth.b_at(prev.d + params.d_o);
    const long double log_first = std::log(2.0L * static_cast<long double>(ledger.P_1)) +
                                  r * b * std::log(static_cast<long double>(row.P_prev)) +
                                  0.5L * prev.log_D;
    const long double log_second = std::log(static_cast<long double>(r) * ledger.Q);
    row.log_D = detail_::log_add(log_first, log_second);
    row.log_threshold = 0.0;
    ledger.rows.push_back(row);
    return row;
}

inline BoundLedger theorem_a_ledger(const AssumptionParams& params, int r_max) {
    detail::require(r_max >= 1, "ledger: r_max must be positive");
    params.validate();
    detail::require(params.growth.max_degree() >= (r_max + 1) * params.d_o,
                    "ledger: tabulated growth must extend to d = (r_max + 1) d_o = " +
                        std::to_string((r_max + 1) * params.d_o));
    BoundLedger ledger;
    ledger.mode = LedgerMode::theorem_a;
    ledger.rows.push_back(base_case(params, &ledger));
    for (int r = 2; r <= r_max; ++r) recurse(params, ledger, r);
    return ledger;
}

/// Smallest lambda (to 1e-9, by bisection) such that
/// delta_r >= 1 / ((r!)^2 (r+1)! lambda^r) for every tabulated row.
inline double certify_lambda(const BoundLedger& ledger) {
    auto certified = [&](double lambda) {
        for (const auto& row : ledger.rows)
            if (std::log(row.delta) < BoundLedger::log_factorial_floor(row.r, lambda)) return false;
        return true;
    };
    double lo = 1.0, hi = 2.0;
    while (!certified(hi)) {
        lo = hi;
        hi *= 2.0;
        detail::ensure(std::isfinite(hi), "certify_lambda: no finite lambda");
    }
    while (hi - lo > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        (certified(mid) ? hi : lo) = mid;
    }
    return hi;
}

/// Explicit ledger for power-law growth: theta = P_{d_{r-1}} Delta^{-eps_r},
/// D_r = 2 P_1 D_{r-1}^{1/2} + r Q_r with Q_r = Q P_{d_{r-1}}^{c_1/r}.
inline BoundLedger explicit_ledger(const AssumptionParams& params, int r_max) {
    params.validate();
    detail::require(params.growth.kind == NormGrowth::Kind::power_law,
                    "explicit_ledger: requires power-law norm growth");
    detail::require(r_max >= 1, "ledger: r_max must be positive");
    BoundLedger ledger;
    ledger.mode = LedgerMode::theorem_b;
    ledger.growth_bound = params.growth.L1 * (params.growth.L2 + 2.0);
    ledger.rows.push_back(base_case(params, &ledger));
    for (int r = 2; r <= r_max; ++r) {
        LedgerRow row = detail_::step_common(params, ledger, r);
        detail::ensure(row.P_prev <= ledger.growth_bound,
                       "explicit_ledger: P_{d_{r-1}} exceeds L1 (L2 + 2)");
        const LedgerRow& prev = ledger.rows.back();
        row.Q_r = ledger.Q * std::pow(row.P_prev, ledger.c_1 / r);
        const long double D = 2.0L * ledger.P_1 * std::exp(0.5L * prev.log_D) +
                              static_cast<long double>(r) * row.Q_r;
        row.log_D = std::log(D);
        row.log_threshold = std::log(row.P_prev) / row.eps;
        ledger.rows.push_back(row);
    }
    ledger.lambda = certify_lambda(ledger);
    ledger.gamma = 2.0 * std::max(ledger.c_1, 2.0 * params.growth.ell) / ledger.lambda;
    ledger.log_H_2 = ledger.gamma * std::log(ledger.growth_bound);
    ledger.H_1 = 1.0;
    for (const auto& row : ledger.rows) ledger.H_1 = std::max(ledger.H_1, row.D() / row.r);
    return ledger;
}

struct BoundValue {
    double value = 0.0;
    double log_value = -std::numeric_limits<double>::infinity();
    bool threshold_met = true; ///< theorem-B: Delta_r above the row's validity threshold
};

/// D_r Delta_r^{-delta_r} ||phi_o||_W prod S(phi_i), with Delta_r given by its log.
inline BoundValue bound_evaluate(const BoundLedger& ledger, int r, double log_Delta,
                                 double wiener_norm, std::span<const double> s_norms) {
    const LedgerRow& row = ledger.row(r);
    detail::require(log_Delta >= 0.0, "bound_evaluate: Delta_r must be >= 1");
    detail::require(wiener_norm >= 0.0, "bound_evaluate: Wiener norm must be nonnegative");
    detail::require(s_norms.size() == static_cast<std::size_t>(r),
                    "bound_evaluate: expected one S-norm per observable");
    BoundValue out;
    if (ledger.mode == LedgerMode::theorem_b && r >= 2) out.threshold_met = log_Delta > row.log_threshold;
    long double lv = row.log_D - static_cast<long double>(row.delta) * log_Delta;
    bool zero = wiener_norm == 0.0;
    lv += zero ? 0.0L : std::log(static_cast<long double>(wiener_norm));
    for (double s : s_norms) {
        detail::require(s >= 0.0, "bound_evaluate: S-norms must be nonnegative");
        if (s == 0.0) zero = true;
        else lv += std::log(static_cast<long double>(s));
    }
    if (zero) {
        out.value = 0.0;
        return out;
    }
    out.log_value = static_cast<double>(lv);
    out.value = static_cast<double>(std::exp(lv));
    return out;
}

namespace detail_ {
inline std::string sci(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}
} // namespace detail_

/// CSV with columns r,d_r,D_r,log10_D_r,delta_r,eps_r,threshold,log10_threshold.
/// Numbers are written with 17 significant digits.
inline void write_csv(const BoundLedger& ledger, std::ostream& os) {
    using detail_::sci;
    os << "r,d_r,D_r,log10_D_r,delta_r,eps_r,threshold,log10_threshold\n";
    const double ln10 = std::log(10.0);
    for (const auto& row : ledger.rows) {
        os << row.r << ',' << row.d << ',' << sci(row.D()) << ',' << sci(row.log10_D()) << ','
           << sci(row.delta) << ',' << sci(row.eps) << ',' << sci(std::exp(row.log_threshold)) << ','
           << sci(row.log_threshold / ln10) << '\n';
    }
}

} // namespace equidist::constants
