#pragma once

// Diagonal T-action on Lie(U): roots, the star norm, tuple statistics and the
// choice of a one-parameter direction used by the averaging argument.
//
// T is handled in additive coordinates t in R^k. A root is a linear
// functional alpha, and Ad(t) scales u_alpha by exp(alpha(t)). Every
// multiplicative quantity is carried together with its logarithm.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "equidist/error.hpp"

namespace equidist::geometry {

using Coordinates = std::vector<double>;

/// A positive quantity stored as its natural logarithm. value() may overflow
/// to +inf; log is always authoritative.
struct LogMagnitude {
    double log = 0.0;

    double value() const { return std::exp(log); }
    static LogMagnitude from_value(double v) { return {std::log(v)}; }

    friend bool operator==(const LogMagnitude&, const LogMagnitude&) = default;
};

class RootAction {
public:
    RootAction(std::size_t dim_t, std::vector<Coordinates> roots,
               std::vector<int> multiplicities = {}, bool declared_proper = false)
        : dim_t_(dim_t), roots_(std::move(roots)), multiplicities_(std::move(multiplicities)) {
        detail::require(dim_t_ >= 1, "RootAction: dim_t must be positive");
        detail::require(!roots_.empty(), "RootAction: at least one root is required");
        if (multiplicities_.empty()) multiplicities_.assign(roots_.size(), 1);
        detail::require(multiplicities_.size() == roots_.size(),
                        "RootAction: one multiplicity per root");
        for (std::size_t a = 0; a < roots_.size(); ++a) {
            detail::require(roots_[a].size() == dim_t_,
                            "RootAction: root " + std::to_string(a) + " has wrong length");
            const bool nonzero = std::any_of(roots_[a].begin(), roots_[a].end(),
                                             [](double v) { return v != 0.0; });
            detail::require(nonzero, "RootAction: root " + std::to_string(a) + " is zero");
            for (double v : roots_[a])
                detail::require(std::isfinite(v), "RootAction: non-finite root coefficient");
            detail::require(multiplicities_[a] >= 1, "RootAction: multiplicities must be positive");
        }
        if (declared_proper)
            detail::require(spans_dual(),
                            "RootAction: declared proper but roots do not span the dual space");
    }

    /// U_{m,n}: roots alpha_{i,j}(t) = t_i + t_{m+j}, one per matrix entry,
    /// ordered row-major in (i, j).
    static RootAction horospherical(int m, int n) {
        detail::require(m >= 1 && n >= 1, "horospherical: m, n must be positive");
        const auto k = static_cast<std::size_t>(m + n);
        std::vector<Coordinates> roots;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) {
                Coordinates a(k, 0.0);
                a[static_cast<std::size_t>(i)] = 1.0;
                a[static_cast<std::size_t>(m + j)] = 1.0;
                roots.push_back(std::move(a));
            }
        return RootAction(k, std::move(roots));
    }

    std::size_t dim_t() const { return dim_t_; }
    std::size_t root_count() const { return roots_.size(); }
    const std::vector<Coordinates>& roots() const { return roots_; }
    const std::vector<int>& multiplicities() const { return multiplicities_; }

    /// Total dimension of Lie(U) in the chosen weight basis.
    std::size_t lie_dim() const {
        return static_cast<std::size_t>(
            std::accumulate(multiplicities_.begin(), multiplicities_.end(), 0));
    }

    /// Offset of e_{alpha,1} in the concatenated weight basis.
    std::size_t basis_offset(std::size_t root) const {
        return static_cast<std::size_t>(std::accumulate(
            multiplicities_.begin(), multiplicities_.begin() + static_cast<std::ptrdiff_t>(root), 0));
    }

    std::vector<std::string> basis_labels() const {
        std::vector<std::string> out;
        for (std::size_t a = 0; a < roots_.size(); ++a)
            for (int k = 1; k <= multiplicities_[a]; ++k)
                out.push_back("e_{" + std::to_string(a) + "," + std::to_string(k) + "}");
        return out;
    }

    /// alpha(t) in additive form.
    double evaluate(std::size_t root, std::span<const double> t) const {
        check_dim(t);
        const auto& a = roots_[root];
        double acc = 0.0;
        for (std::size_t k = 0; k < dim_t_; ++k) acc += a[k] * t[k];
        return acc;
    }

    /// Rank test: do the roots span (R^k)^*? Equivalent to log ||.||_* being a norm.
    bool spans_dual() const {
        std::vector<Coordinates> m = roots_;
        std::size_t rank = 0;
        for (std::size_t col = 0; col < dim_t_ && rank < m.size(); ++col) {
            std::size_t pivot = rank;
            for (std::size_t r = rank + 1; r < m.size(); ++r)
                if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
            if (std::abs(m[pivot][col]) < 1e-12) continue;
            std::swap(m[pivot], m[rank]);
            for (std::size_t r = rank + 1; r < m.size(); ++r) {
                const double f = m[r][col] / m[rank][col];
                for (std::size_t c = col; c < dim_t_; ++c) m[r][c] -= f * m[rank][c];
            }
            ++rank;
        }
        return rank == dim_t_;
    }

    void check_dim(std::span<const double> t) const {
        detail::require(t.size() == dim_t_, "RootAction: coordinate length " +
                                                std::to_string(t.size()) + " != dim_t " +
                                                std::to_string(dim_t_));
    }

private:
    std::size_t dim_t_;
    std::vector<Coordinates> roots_;
    std::vector<int> multiplicities_;
};

/// log ||t||_* = max_alpha |alpha(t)|.
inline double log_star_norm(const RootAction& action, std::span<const double> t) {
    double best = 0.0;
    for (std::size_t a = 0; a < action.root_count(); ++a)
        best = std::max(best, std::abs(action.evaluate(a, t)));
    return best;
}

/// ||t||_* = max over roots of max(e^{alpha(t)}, e^{-alpha(t)}); always >= 1.
inline double star_norm(const RootAction& action, std::span<const double> t) {
    return std::exp(log_star_norm(action, t));
}

inline Coordinates difference(std::span<const double> a, std::span<const double> b) {
    Coordinates d(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) d[k] = a[k] - b[k];
    return d;
}

/// floor(t) = min(t_1, ..., t_{m+n}).
inline double floor_expanding(std::span<const double> t, int m, int n) {
    detail::require(m >= 0 && n >= 0 && t.size() == static_cast<std::size_t>(m + n),
                    "floor_expanding: expected " + std::to_string(m + n) + " coordinates, got " +
                        std::to_string(t.size()));
    detail::require(!t.empty(), "floor_expanding: empty coordinates");
    return *std::min_element(t.begin(), t.end());
}

/// Which subset T_+ the entries of a tuple are drawn from.
struct Domain {
    enum class Kind { unconstrained, horospherical_cone };
    Kind kind = Kind::unconstrained;
    int m = 0;
    int n = 0;

    static Domain any() { return {}; }
    static Domain cone(int m, int n) { return {Kind::horospherical_cone, m, n}; }

    /// Nonnegative coordinates with sum_{i<=m} t_i = sum_{j>m} t_j.
    bool contains(std::span<const double> t) const {
        if (kind == Kind::unconstrained) return true;
        if (t.size() != static_cast<std::size_t>(m + n)) return false;
        double lhs = 0.0, rhs = 0.0, scale = 1.0;
        for (std::size_t k = 0; k < t.size(); ++k) {
            if (t[k] < 0.0) return false;
            (static_cast<int>(k) < m ? lhs : rhs) += t[k];
            scale = std::max(scale, std::abs(t[k]));
        }
        return std::abs(lhs - rhs) <= 1e-12 * scale * static_cast<double>(t.size());
    }
};

class TranslationTuple {
public:
    TranslationTuple(std::vector<Coordinates> entries, Domain domain = Domain::any())
        : entries_(std::move(entries)), domain_(domain) {
        detail::require(!entries_.empty(), "TranslationTuple: r must be at least 1");
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            detail::require(entries_[i].size() == entries_[0].size(),
                            "TranslationTuple: entries must share a dimension");
            detail::require(domain_.contains(entries_[i]),
                            "TranslationTuple: entry " + std::to_string(i) +
                                " violates the declared domain");
        }
    }

    std::size_t size() const { return entries_.size(); }
    const Coordinates& operator[](std::size_t i) const { return entries_[i]; }
    const std::vector<Coordinates>& entries() const { return entries_; }
    const Domain& domain() const { return domain_; }

private:
    std::vector<Coordinates> entries_;
    Domain domain_;
};

/// Caller-supplied growth function, returned additively: log rho(t), which
/// must be >= 0 on the tuple entries.
using LogGrowth = std::function<double(std::span<const double>)>;

/// rho(t) = exp(floor(t)) on the U_{m,n} cone.
inline LogGrowth floor_growth(int m, int n) {
    return [m, n](std::span<const double> t) { return floor_expanding(t, m, n); };
}

struct TupleStats {
    LogMagnitude rho_r;   ///< min_i rho(t_i)
    LogMagnitude m_r;     ///< min_{i != j} ||t_i t_j^{-1}||_*, +inf when r = 1
    LogMagnitude M_r;     ///< max_{i,j} ||t_i t_j^{-1}||_*
    LogMagnitude Delta_r; ///< rho(t_1) if r = 1, else min(rho_r, m_r)
};

inline TupleStats tuple_stats(const RootAction& action, const TranslationTuple& tuple,
                              const LogGrowth& log_rho) {
    const std::size_t r = tuple.size();
    TupleStats s;
    s.rho_r.log = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < r; ++i) {
        action.check_dim(tuple[i]);
        const double lr = log_rho(tuple[i]);
        detail::require(lr >= 0.0 && !std::isnan(lr),
                        "tuple_stats: rho(t_" + std::to_string(i) + ") < 1");
        s.rho_r.log = std::min(s.rho_r.log, lr);
    }
    s.m_r.log = std::numeric_limits<double>::infinity();
    s.M_r.log = 0.0;
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = i + 1; j < r; ++j) {
            const double d = log_star_norm(action, difference(tuple[i], tuple[j]));
            s.m_r.log = std::min(s.m_r.log, d);
            s.M_r.log = std::max(s.M_r.log, d);
        }
    s.Delta_r.log = r == 1 ? log_rho(tuple[0]) : std::min(s.rho_r.log, s.m_r.log);
    return s;
}

/// Result of choosing w = Ad(t_j^{-1}) e_{alpha,1} and ordering its images
/// w^{(k)} = Ad(t_k) w by decreasing norm. Indices are 0-based.
struct DirectionSelection {
    bool degenerate = false;   ///< M_r = 1: every root sees all entries as equal
    std::size_t root = 0;      ///< alpha
    std::size_t i = 0;         ///< index attaining M_r as t_i t_j^{-1}
    std::size_t j = 0;
    std::size_t l = 0;         ///< position of t_j after relabeling (norm exactly 1)
    LogMagnitude M_r;
    LogMagnitude w_scale;      ///< w = w_scale * e_{alpha,1}
    std::vector<std::size_t> relabeling; ///< relabeling[k] = original index of position k
    std::vector<LogMagnitude> images;    ///< ||w^{(k)}|| in relabeled order, decreasing
    std::vector<double> w;               ///< w in the full weight basis

    std::vector<double> log_image_norms() const {
        std::vector<double> out;
        out.reserve(images.size());
        for (const auto& v : images) out.push_back(v.log);
        return out;
    }
};

inline DirectionSelection select_direction(const RootAction& action, const TranslationTuple& tuple) {
    const std::size_t r = tuple.size();
    detail::require(r >= 2, "select_direction: need r >= 2");
    for (std::size_t k = 0; k < r; ++k) action.check_dim(tuple[k]);

    DirectionSelection sel;
    // Lexicographic (root, i, j) scan with strict improvement gives the
    // lexicographically smallest maximiser.
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < action.root_count(); ++a)
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < r; ++j) {
                const double v = action.evaluate(a, tuple[i]) - action.evaluate(a, tuple[j]);
                if (v > best) {
                    best = v;
                    sel.root = a;
                    sel.i = i;
                    sel.j = j;
                }
            }
    sel.M_r.log = std::max(0.0, best);
    sel.degenerate = !(best > 0.0);

    const double alpha_j = action.evaluate(sel.root, tuple[sel.j]);
    sel.w_scale.log = -alpha_j;
    sel.w.assign(action.lie_dim(), 0.0);
    sel.w[action.basis_offset(sel.root)] = std::exp(-alpha_j);

    std::vector<double> log_norm(r);
    for (std::size_t k = 0; k < r; ++k)
        log_norm[k] = action.evaluate(sel.root, tuple[k]) - alpha_j;
    log_norm[sel.j] = 0.0;

    sel.relabeling.resize(r);
    std::iota(sel.relabeling.begin(), sel.relabeling.end(), std::size_t{0});
    const std::size_t top = sel.degenerate ? sel.relabeling[0] : sel.i;
    std::stable_sort(sel.relabeling.begin(), sel.relabeling.end(),
                     [&](std::size_t x, std::size_t y) {
                         if (log_norm[x] != log_norm[y]) return log_norm[x] > log_norm[y];
                         return x == top && y != top;
                     });
    // The maximiser must come first with exactly log M_r.
    if (!sel.degenerate) log_norm[sel.i] = sel.M_r.log;
    sel.images.reserve(r);
    for (std::size_t k = 0; k < r; ++k) {
        sel.images.push_back({log_norm[sel.relabeling[k]]});
        if (sel.relabeling[k] == sel.j) sel.l = k;
    }
    return sel;
}

} // namespace equidist::geometry
