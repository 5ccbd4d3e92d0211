#pragma once

// Acceptance criteria as callable checks, shared by the acceptance binary and
// the `verify` subcommand.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "equidist/equidist.hpp"
#include "golden.hpp"
#include "oracles.hpp"

namespace acceptance {

using namespace equidist;

struct Outcome {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
    double limit_seconds = 0.0; ///< 0: no runtime limit
};

/// Runs a manifest with the given thread count and returns its outputs.
using ManifestRunner =
    std::function<std::map<std::string, std::string>(const std::string& manifest_json, int threads)>;

namespace detail_ {

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

inline double uniform(std::mt19937_64& eng, double lo, double hi) {
    return lo + (hi - lo) * modular::unit_uniform(eng);
}

inline int uniform_int(std::mt19937_64& eng, int lo, int hi) {
    return lo + static_cast<int>(eng() % static_cast<std::uint64_t>(hi - lo + 1));
}

template <class F>
Outcome timed(int id, std::string name, double limit, F&& body) {
    Outcome o;
    o.id = id;
    o.name = std::move(name);
    o.limit_seconds = limit;
    const auto start = std::chrono::steady_clock::now();
    std::ostringstream detail;
    try {
        o.pass = body(detail);
    } catch (const std::exception& e) {
        o.pass = false;
        detail << "exception: " << e.what();
    }
    o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (limit > 0.0 && o.seconds > limit) {
        o.pass = false;
        detail << " runtime " << o.seconds << " s exceeds " << limit << " s";
    }
    o.detail = detail.str();
    return o;
}

} // namespace detail_

/// The worked example: d_o = 1, D_o = 1, delta_o = 1, C = 1, c = 0.4,
/// A = 1, a = 1, B = 1, b_d = d, M = 1.
inline constants::AssumptionParams example_params(bool power_law, int d_max = 40) {
    constants::AssumptionParams p;
    p.d_o = 1;
    p.D_o = 1.0;
    p.delta_o = 1.0;
    p.C = 1.0;
    p.c = 0.4;
    p.A = 1.0;
    p.a = 1.0;
    p.growth = power_law ? constants::NormGrowth::power_law(1.0, 1.0, 1.0)
                         : constants::NormGrowth::tabulate(
                               d_max, [](int) { return 1.0; }, [](int d) { return double(d); },
                               [](int) { return 1.0; });
    return p;
}

inline oracle::Params to_oracle(const constants::AssumptionParams& p) {
    const auto g = p.growth;
    return {p.d_o, p.D_o, p.delta_o, p.C, p.c, p.A, p.a,
            {[g](int d) { return g.B[d - 1]; }, [g](int d) { return g.b[d - 1]; },
             [g](int d) { return g.M[d - 1]; }}};
}

inline constants::AssumptionParams random_params(std::mt19937_64& eng, int r_max) {
    using detail_::uniform;
    constants::AssumptionParams p;
    p.d_o = detail_::uniform_int(eng, 1, 3);
    p.D_o = uniform(eng, 1.0, 20.0);
    p.delta_o = uniform(eng, 0.01, 1.0);
    p.C = uniform(eng, 1.0, 20.0);
    p.c = uniform(eng, 0.01, 0.49);
    p.A = uniform(eng, 1.0, 20.0);
    p.a = uniform(eng, 0.05, 4.0);
    const double b_floor = std::max(0.5, p.a / 4.0);
    const double b_slope = uniform(eng, 0.0, 2.0), b_base = b_floor + uniform(eng, 0.01, 1.0);
    const double L1 = uniform(eng, 1.0, 3.0), L2 = uniform(eng, 1.0, 3.0);
    p.growth = constants::NormGrowth::tabulate(
        (r_max + 1) * p.d_o, [L1](int d) { return std::pow(L1, d); },
        [b_base, b_slope](int d) { return b_base + b_slope * d; }, [L2](int d) { return std::pow(L2, d); });
    return p;
}

// ---- 1 ----

inline Outcome criterion_1() {
    return detail_::timed(1, "constants ledger", 1.0, [](std::ostream& os) {
        bool ok = true;
        const auto ledger = constants::theorem_a_ledger(example_params(false), 2);
        const auto ref = oracle::theorem_a(to_oracle(example_params(false)), 2);
        const double d1 = ledger.row(1).delta, D1 = ledger.row(1).D(), d2 = ledger.row(2).delta;
        ok &= detail_::rel(d1, 1.0 / 22.0) <= 1e-9 && detail_::rel(d1, ref[0].delta) <= 1e-9;
        ok &= detail_::rel(D1, 5.0 * std::sqrt(3.0)) <= 1e-9 && detail_::rel(D1, (double)std::exp(ref[0].log_D)) <= 1e-9;
        ok &= detail_::rel(d2, ref[1].delta) <= 1e-9 && detail_::rel(d2, 1.87829e-4) <= 1e-5;
        os << "delta_1=" << d1 << " D_1=" << D1 << " delta_2=" << d2;

        std::mt19937_64 eng(golden::seed);
        int bad = 0;
        for (int trial = 0; trial < 100; ++trial) {
            const auto p = random_params(eng, 12);
            const auto l = constants::theorem_a_ledger(p, 12);
            const auto o = oracle::theorem_a(to_oracle(p), 12);
            for (int r = 1; r <= 12; ++r) {
                const auto& row = l.row(r);
                bool good = row.d == (r + 1) * p.d_o;
                good &= detail_::rel(row.delta, o[r - 1].delta) <= 1e-9;
                good &= std::abs(static_cast<double>(row.log_D - o[r - 1].log_D)) <=
                        1e-9 * std::max(1.0L, std::abs(o[r - 1].log_D));
                if (r > 1) good &= row.delta < l.row(r - 1).delta;
                if (!good) ++bad;
            }
        }
        os << "; random sets: " << bad << " bad rows of 1200";
        return ok && bad == 0;
    });
}

// ---- 2 ----

inline Outcome criterion_2() {
    return detail_::timed(2, "pigeonhole and window", 10.0, [](std::ostream& os) {
        std::mt19937_64 eng(golden::seed + 2);
        int mismatches = 0, violations = 0, dyadic = 0, real = 0;
        for (int trial = 0; trial < 10000; ++trial) {
            const int r = detail_::uniform_int(eng, 2, 8);
            if (trial % 2 == 0) {
                // beta_i = 2^{e_i}, theta = 2^s, with beta_1 >= 1/theta.
                const std::int64_t s = -detail_::uniform_int(eng, 1, 12);
                std::vector<std::int64_t> e(r);
                e[0] = -s + detail_::uniform_int(eng, 0, 20);
                e[r - 1] = e[0] + s - detail_::uniform_int(eng, 0, 10);
                for (int k = 1; k + 1 < r; ++k) e[k] = detail_::uniform_int(eng, int(e[r - 1]), int(e[0]));
                std::sort(e.begin() + 1, e.end() - 1, std::greater<>());
                std::vector<selection::Quantity> beta;
                for (auto x : e) beta.push_back(selection::Quantity::from_value(std::ldexp(1.0, int(x))));
                const auto theta = selection::Quantity::from_value(std::ldexp(1.0, int(s)));
                const auto want = oracle::brute_pigeonhole_dyadic(e, s);
                const auto win = selection::choose_window(beta, theta);
                if (!want || want->p != win.p || want->q != win.q) ++mismatches;
                // 2r log2(L beta_k) = 2r (e_k - e_1) - (2q + 1) s
                const std::int64_t base = -(2 * win.q + 1) * s;
                const std::int64_t p = win.p;
                bool good = r * e[p] < r * e[0] + (win.q + 1) * s && r * e[0] + win.q * s <= r * e[p - 1];
                good &= base <= -2 * r * s;
                good &= 2 * r * (e[p - 1] - e[0]) + base >= -s;
                good &= 2 * r * (e[p] - e[0]) + base < s;
                if (!good) ++violations;
                ++dyadic;
            } else {
                const double lt = -detail_::uniform(eng, 0.05, 6.0);
                std::vector<double> lb(r);
                lb[0] = -lt + detail_::uniform(eng, 0.0, 8.0);
                lb[r - 1] = lb[0] + lt - detail_::uniform(eng, 0.0, 4.0);
                for (int k = 1; k + 1 < r; ++k) lb[k] = detail_::uniform(eng, lb[r - 1], lb[0]);
                std::sort(lb.begin() + 1, lb.end() - 1, std::greater<>());
                std::vector<selection::Quantity> beta;
                for (double v : lb) beta.push_back(selection::Quantity::from_log(v));
                const auto want = oracle::brute_pigeonhole_log(lb, lt);
                const auto win = selection::choose_window(beta, selection::Quantity::from_log(lt));
                if (!want || want->p != win.p || want->q != win.q) ++mismatches;
                const double tol = 1e-12 * (1.0 + std::abs(lb[0]) + std::abs(lt));
                const double logL = -lb[0] - (win.q + 0.5) / r * lt;
                bool good = logL + lb[0] <= -lt + tol;
                good &= logL + lb[win.p - 1] >= -lt / (2.0 * r) - tol;
                good &= logL + lb[win.p] < lt / (2.0 * r) + tol;
                good &= std::abs(logL - win.L.log) <= tol;
                if (!good) ++violations;
                ++real;
            }
        }
        os << dyadic << " dyadic + " << real << " real instances; oracle mismatches " << mismatches
           << ", inequality violations " << violations;
        return mismatches == 0 && violations == 0;
    });
}

// ---- 3 ----

inline Outcome criterion_3() {
    return detail_::timed(3, "integral estimate", 0.0, [](std::ostream& os) {
        bool ok = true;
        double worst = 0.0;
        for (double R : {1.0, 10.0, 1e2, 1e3, 1e4})
            for (double c : {0.05, 0.1, 0.25, 0.4, 0.49}) {
                const auto est = modular::check_integral_estimate(R, c);
                const double ref = oracle::integral_estimate_2d(R, c);
                worst = std::max(worst, detail_::rel(est.lhs, ref));
                ok &= est.pass && est.lhs <= est.rhs && detail_::rel(est.lhs, ref) <= 1e-6;
            }
        os << "25 grid points; worst closed-form vs 2-D quadrature rel err " << worst;
        return ok;
    });
}

// ---- 4 ----

template <class Tag>
wiener::TorusSeries<Tag> random_series(std::mt19937_64& eng, std::size_t dim, int degree, int terms) {
    wiener::TorusSeries<Tag> s(dim);
    for (int k = 0; k < terms; ++k) {
        wiener::Frequency f(dim);
        for (auto& x : f) x = detail_::uniform_int(eng, -degree, degree);
        s.add(f, {detail_::uniform(eng, -1.0, 1.0), detail_::uniform(eng, -1.0, 1.0)});
    }
    return s;
}

inline Outcome criterion_4() {
    return detail_::timed(4, "Wiener algebra", 10.0, [](std::ostream& os) {
        using wiener::TorusObservable;
        std::mt19937_64 eng(golden::seed + 4);
        int axiom_fail = 0, sup_fail = 0;
        for (int trial = 0; trial < 200; ++trial) {
            const std::size_t dim = trial % 2 ? 2 : 1;
            const auto f = random_series<wiener::observable_tag>(eng, dim, 8, 6);
            const auto g = random_series<wiener::observable_tag>(eng, dim, 8, 6);
            const std::complex<double> s(detail_::uniform(eng, -3, 3), detail_::uniform(eng, -3, 3));
            const double nf = wiener::wiener_norm(f), ng = wiener::wiener_norm(g);
            const double tol = 1e-12 * (1.0 + nf + ng);
            bool good = nf >= 0.0 && wiener::wiener_norm(TorusObservable(dim)) == 0.0;
            good &= wiener::wiener_norm(f + g) <= nf + ng + tol;
            good &= std::abs(wiener::wiener_norm(s * f) - std::abs(s) * nf) <= tol * (1.0 + std::abs(s));
            good &= wiener::wiener_norm(wiener::multiply(f, g)) <= nf * ng * (1.0 + 1e-12);
            if (!good) ++axiom_fail;
            if (trial < 20) {
                const std::size_t n = dim == 1 ? 4096 : 64;
                if (wiener::grid_sup(f, n) > nf * (1.0 + 1e-12)) ++sup_fail;
            }
        }

        double eq_defect = 0.0;
        for (int trial = 0; trial < 1000; ++trial) {
            const std::size_t dim = 1 + trial % 3;
            const auto eta = random_series<wiener::observable_tag>(eng, dim, 8, 10);
            wiener::Frequency xi(dim);
            for (auto& x : xi) x = detail_::uniform_int(eng, -8, 8);
            std::vector<double> w(dim);
            for (auto& x : w) x = detail_::uniform(eng, -1.0, 1.0);
            eq_defect = std::max(eq_defect, wiener::equivariance_check(wiener::TorusMeasure::haar(dim), xi, w, eta).defect);
        }

        // sigma(Phi) directly on a grid that integrates trigonometric
        // polynomials exactly, against sum_k c_k nu_k(Phi) with Haar twists.
        double exp_defect = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            const std::size_t dim = 1 + trial % 2;
            auto sigma = random_series<wiener::measure_tag>(eng, dim, 3, 4);
            const auto phi = random_series<wiener::observable_tag>(eng, dim, 3, 6);
            const auto haar = wiener::TorusMeasure::haar(dim);
            const auto chk = wiener::character_expansion_check(
                sigma,
                [&] {
                    return wiener::grid_integral(dim, 16, [&](std::span<const double> x) {
                        return sigma.evaluate(x) * phi.evaluate(x);
                    });
                },
                [&](const wiener::Frequency& k) { return wiener::character_twist(haar, k)(phi); });
            exp_defect = std::max(exp_defect, chk.certified_defect);
        }
        os << "norm axiom failures " << axiom_fail << ", sup-norm failures " << sup_fail
           << ", max equivariance defect " << eq_defect << ", max expansion defect " << exp_defect;
        return axiom_fail == 0 && sup_fail == 0 && eq_defect <= 1e-12 && exp_defect <= 1e-12;
    });
}

// ---- 5 ----

inline Outcome criterion_5() {
    return detail_::timed(5, "modular geometry", 60.0, [](std::ostream& os) {
        using modular::UpperHalfPoint;
        std::mt19937_64 eng(golden::seed + 5);
        const modular::EisensteinObservable obs(modular::BumpProfile::smooth(1.5, 3.0));
        double red_err = 0.0, eis_err = 0.0;
        auto dist = [](UpperHalfPoint a, UpperHalfPoint b) { return std::hypot(a.x - b.x, a.y - b.y); };
        for (int k = 0; k < 10000; ++k) {
            const UpperHalfPoint z(detail_::uniform(eng, -3.0, 3.0), std::exp(detail_::uniform(eng, -4.0, 1.5)));
            const auto rz = modular::reduce(z);
            const auto zc = z.as_complex();
            red_err = std::max({red_err, dist(modular::reduce(rz), rz),
                                dist(modular::reduce({z.x + 1.0, z.y}), rz),
                                dist(modular::reduce(UpperHalfPoint::from_complex(-1.0 / zc)), rz),
                                std::abs(oracle::reduce_complex(zc) - rz.as_complex())});
            const double e = obs.direct(rz);
            eis_err = std::max({eis_err, std::abs(obs.direct(z) - e),
                                std::abs(obs.direct(UpperHalfPoint::from_complex(-1.0 / zc)) - e)});
        }
        double mu_err = 0.0;
        for (const auto& f : {modular::BumpProfile::indicator(2.0, 3.0), modular::BumpProfile::smooth(2.0, 3.0),
                              modular::BumpProfile::smooth(1.0, 1.8)}) {
            const modular::EisensteinObservable o(f);
            mu_err = std::max(mu_err, detail_::rel(o.mu(), modular::mu_fundamental_domain(o)));
        }
        os << "reduce max deviation " << red_err << ", Eisenstein invariance " << eis_err
           << ", unfolding vs 2-D rel err " << mu_err;
        return red_err <= 1e-10 && eis_err <= 1e-10 && mu_err <= 1e-3;
    });
}

// ---- 6 ----

struct DecayTable {
    std::vector<std::vector<double>> times;
    std::vector<double> log_delta;
    std::vector<double> error;
};

inline DecayTable decay_table(std::size_t r, const std::vector<double>& ts, std::size_t nodes, int threads = 0) {
    const modular::EisensteinObservable obs(modular::BumpProfile::smooth(2.0, 3.0));
    const std::vector<modular::EisensteinObservable> v(r, obs);
    modular::CorrelationOptions opt;
    opt.nodes = nodes;
    opt.threads = threads;
    DecayTable tab;
    for (double t : ts) {
        std::vector<double> tt{t};
        if (r == 2) tt.push_back(2.0 * t);
        const auto s = modular::sample_correlation(modular::HorocycleMeasure::haar(), v, tt, opt);
        tab.times.push_back(tt);
        tab.log_delta.push_back(s.delta.log);
        tab.error.push_back(s.abs_error);
    }
    return tab;
}

inline std::vector<double> time_grid(double lo, double hi, double step) {
    std::vector<double> out;
    for (int k = 0; lo + k * step <= hi + 1e-9; ++k) out.push_back(lo + k * step);
    return out;
}

inline Outcome criterion_6a() {
    return detail_::timed(6, "equidistribution trend, r = 1", 300.0, [](std::ostream& os) {
        const auto tab = decay_table(1, time_grid(2.0, 12.0, 1.0), golden::decay_nodes);
        auto err_at = [&](int t) { return tab.error[static_cast<std::size_t>(t - 2)]; };
        int inversions = 0, step1 = 0;
        for (int t : {4, 6, 8, 10})
            if (err_at(t + 2) > err_at(t)) ++inversions;
        for (int t = 4; t < 12; ++t)
            if (err_at(t + 1) > err_at(t)) ++step1;
        const auto fit = modular::fit_decay_log(tab.log_delta, tab.error);
        // Diagnostic only: the same trend with the quadrature resolved.
        const auto fine = decay_table(1, time_grid(4.0, 12.0, 2.0), golden::resolved_nodes);
        int fine_inv = 0;
        for (std::size_t k = 0; k + 1 < fine.error.size(); ++k)
            if (fine.error[k + 1] > fine.error[k]) ++fine_inv;
        os << "inversions over t = 4,6,..,12: " << inversions << " at N = " << golden::decay_nodes << " ("
           << fine_inv << " at N = " << golden::resolved_nodes << "; unit steps 4..12: " << step1
           << "); fitted exponent " << fit.exponent << " vs golden " << golden::r1_exponent;
        return inversions <= 1 && fit.exponent > 0.0 &&
               std::abs(fit.exponent - golden::r1_exponent) <= 0.2 * golden::r1_exponent;
    });
}

inline Outcome criterion_6b() {
    return detail_::timed(6, "equidistribution trend, r = 2 along (t, 2t)", 300.0, [](std::ostream& os) {
        const auto tab = decay_table(2, time_grid(1.0, 6.0, 0.5), golden::decay_nodes);
        const auto fit = modular::fit_decay_log(tab.log_delta, tab.error);
        os << "fitted exponent in Delta_2 " << fit.exponent << " vs golden " << golden::r2_exponent;
        return fit.exponent > 0.0 && std::abs(fit.exponent - golden::r2_exponent) <= 0.2 * golden::r2_exponent;
    });
}

// ---- 7 ----

inline Outcome criterion_7() {
    return detail_::timed(7, "explicit ledger", 0.0, [](std::ostream& os) {
        const auto p = example_params(true);
        const auto l = constants::explicit_ledger(p, 10);
        bool ok = true;
        for (int r = 1; r <= 10; ++r) {
            const auto& row = l.row(r);
            ok &= std::log(row.delta) >= l.log_factorial_floor(r);
            ok &= row.D() <= l.H_1 * r;
            if (r >= 2) {
                // P_d = (M_d B_{d+1}^2 + 2 B_d^2)^{1/(2 b_{d+1})} = 3^{1/(2(d+1))} here
                const double P = std::pow(3.0, 1.0 / (2.0 * (row.d)));
                ok &= P <= p.growth.L1 * (p.growth.L2 + 2.0) && row.P_prev <= l.growth_bound;
                ok &= detail_::rel(row.P_prev, P) <= 1e-14;
            }
        }
        std::vector<double> deltas;
        for (const auto& row : l.rows) deltas.push_back(row.delta);
        const double lam = oracle::lambda_closed_form(deltas);
        ok &= std::abs(l.lambda - lam) <= 1e-8 * lam;
        ok &= detail_::rel(l.lambda, golden::lambda) <= 1e-8;
        os << "lambda " << l.lambda << " (closed form " << lam << "), H_1 " << l.H_1;
        return ok;
    });
}

// ---- 8 ----

inline std::vector<std::string> determinism_manifests() {
    return {
        R"({"schema_version":1,"mode":"ledger","seed":7,
            "params":{"d_o":1,"D_o":1,"delta_o":1,"C":1,"c":0.4,"A":1,"a":1,
                      "growth":{"kind":"power_law","L1":1,"ell":1,"L2":1}},
            "ledger":{"kind":"theorem-B","r_max":10}})",
        R"({"schema_version":1,"mode":"schedule",
            "schedule":{"action":{"horospherical":[2,1]},
                        "tuples":[{"entries":[[1,2,3],[0,0,0]]},
                                  {"entries":[[3,0,1],[1,1,1],[0,2,2]],"log_theta":-1.5}]}})",
        R"({"schema_version":1,"mode":"correlate","seed":3,
            "correlate":{"profile":{"kind":"smooth","y_lo":2,"y_hi":3},
                         "sigma":{"dim":1,"coeffs":[{"chi":[0],"re":1},{"chi":[1],"re":0.25},{"chi":[-1],"re":0.25}]},
                         "times":[[2],[3],[4],[5],[6]],"nodes":4096}})",
        R"({"schema_version":1,"mode":"fit","fit":{"deltas":[1,2,4,8],"errors":[1,0.8,0.5,0.3]}})",
    };
}

inline Outcome criterion_8(const ManifestRunner& run) {
    return detail_::timed(8, "determinism across reruns and threads", 0.0, [&](std::ostream& os) {
        int differing = 0, files = 0;
        for (const auto& m : determinism_manifests()) {
            const auto ref = run(m, 1);
            for (int threads : {1, 4, 8}) {
                const auto out = run(m, threads);
                for (const auto& [name, body] : ref) {
                    ++files;
                    auto it = out.find(name);
                    if (it == out.end() || it->second != body) ++differing;
                }
            }
        }
        os << files << " file comparisons, " << differing << " differ";
        return differing == 0;
    });
}

inline std::vector<Outcome> run_all(const ManifestRunner& run) {
    return {criterion_1(),  criterion_2(),  criterion_3(), criterion_4(), criterion_5(),
            criterion_6a(), criterion_6b(), criterion_7(), criterion_8(run)};
}

} // namespace acceptance
