#pragma once

// Manifest runner behind the command-line tool. Every mode produces a map of
// output file name -> contents; nothing touches the filesystem until the
// caller writes the map, so reruns can be compared byte for byte.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "equidist/equidist.hpp"
#include "equidist/io.hpp"

namespace equidist::app {

using io::json;
using io::schema_error;

inline constexpr int manifest_schema_version = 1;
inline constexpr const char* library_version = "1.0.0";

using Outputs = std::map<std::string, std::string>;

struct RunOptions {
    std::optional<std::size_t> nodes; ///< overrides the manifest's node count
    int threads = 0;                  ///< 0: EQUIDIST_THREADS or 1
    std::optional<std::uint64_t> seed;
    std::string base_dir = ".";       ///< resolves relative paths in the manifest
};

namespace detail_ {

inline std::string sci(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

inline const json& block(const json& m, const char* key) { return io::detail_::field(m, "", key); }

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

inline std::string gnuplot_script(const std::string& csv, const std::string& title, int xcol, int ycol,
                                  const std::string& xlabel, const std::string& ylabel, bool logx, bool logy) {
    std::ostringstream os;
    os << "# gnuplot -persist " << csv.substr(0, csv.rfind('.')) << ".gp\n"
       << "set datafile separator ','\n"
       << "set key off\n"
       << "set title '" << title << "'\n"
       << "set xlabel '" << xlabel << "'\n"
       << "set ylabel '" << ylabel << "'\n";
    if (logx) os << "set logscale x\n";
    if (logy) os << "set logscale y\n";
    os << "plot '" << csv << "' every ::1 using " << xcol << ':' << ycol << " with linespoints pt 7\n";
    return os.str();
}

} // namespace detail_

/// Checks the top-level shape shared by all modes; returns the mode.
inline std::string validate_manifest(const json& m) {
    if (!m.is_object() || m.empty()) throw schema_error("", "manifest must be a non-empty object");
    const json& v = io::detail_::field(m, "", "schema_version");
    if (!v.is_number_integer() || v.get<int>() != manifest_schema_version)
        throw schema_error("/schema_version", "unsupported schema version (expected " +
                                                  std::to_string(manifest_schema_version) + ")");
    const json& mode = io::detail_::field(m, "", "mode");
    if (!mode.is_string()) throw schema_error("/mode", "expected a string");
    const std::string s = mode.get<std::string>();
    if (s != "ledger" && s != "schedule" && s != "correlate" && s != "fit" && s != "verify")
        throw schema_error("/mode", "expected one of ledger, schedule, correlate, fit, verify");
    if (!m.contains(s) && s != "verify") throw schema_error("", "missing required field '" + s + "'");
    if (m.contains("seed") && !m["seed"].is_number_unsigned())
        throw schema_error("/seed", "expected a nonnegative integer");
    return s;
}

inline std::uint64_t effective_seed(const json& m, const RunOptions& opt) {
    if (opt.seed) return *opt.seed;
    return m.contains("seed") ? m["seed"].get<std::uint64_t>() : 0;
}

// ---- ledger ----

inline constants::BoundLedger build_ledger(const constants::AssumptionParams& p, const std::string& kind,
                                           int r_max, const std::string& path) {
    if (kind == "theorem-A") return io::detail_::checked(path, [&] { return constants::theorem_a_ledger(p, r_max); });
    if (kind == "theorem-B") return io::detail_::checked(path, [&] { return constants::explicit_ledger(p, r_max); });
    throw schema_error(path + "/kind", "expected 'theorem-A' or 'theorem-B'");
}

inline Outputs run_ledger(const json& m, const RunOptions& opt) {
    const auto params = io::params_from_json(detail_::block(m, "params"));
    const json& spec = detail_::block(m, "ledger");
    const std::string kind = io::detail_::field(spec, "/ledger", "kind").get<std::string>();
    const int r_max = io::detail_::integer(io::detail_::field(spec, "/ledger", "r_max"), "/ledger/r_max");
    if (r_max < 1) throw schema_error("/ledger/r_max", "must be positive");
    const auto ledger = build_ledger(params, kind, r_max, "/ledger");

    Outputs out;
    std::ostringstream csv;
    constants::write_csv(ledger, csv);
    out["ledger.csv"] = csv.str();
    out["ledger.gp"] = detail_::gnuplot_script("ledger.csv", "delta_r", 1, 5, "r", "delta_r", false, true);

    json summary = {{"mode", "ledger"},
                    {"ledger_kind", constants::to_string(ledger.mode)},
                    {"seed", effective_seed(m, opt)},
                    {"c_1", ledger.c_1},
                    {"P_1", ledger.P_1},
                    {"Q", ledger.Q},
                    {"B_prime", ledger.B_prime},
                    {"D1_prime", ledger.D1_prime}};
    json pd = json::object();
    for (const auto& [d, v] : ledger.P_d) pd[std::to_string(d)] = v;
    summary["P_d"] = pd;
    if (ledger.mode == constants::LedgerMode::theorem_b) {
        summary["lambda"] = ledger.lambda;
        summary["gamma"] = ledger.gamma;
        summary["H_1"] = ledger.H_1;
        summary["log_H_2"] = ledger.log_H_2;
        summary["growth_bound"] = ledger.growth_bound;
    }
    out["summary.json"] = detail_::dump(summary);
    return out;
}

// ---- schedule ----

inline Outputs run_schedule(const json& m, const RunOptions& opt) {
    const json& spec = detail_::block(m, "schedule");
    const auto action = io::action_from_json(io::detail_::field(spec, "/schedule", "action"), "/schedule/action");
    const json& tuples = io::detail_::field(spec, "/schedule", "tuples");
    if (!tuples.is_array() || tuples.empty()) throw schema_error("/schedule/tuples", "expected a non-empty array");

    std::ostringstream csv;
    csv << "tuple,r,root,i,j,log_M_r,log_theta,p,q,L,log_L,upper,lower,separated\n";
    json rows = json::array();
    for (std::size_t k = 0; k < tuples.size(); ++k) {
        const std::string path = "/schedule/tuples/" + std::to_string(k);
        const json& tj = tuples[k];
        const json& entries = io::detail_::field(tj, path, "entries");
        if (!entries.is_array()) throw schema_error(path + "/entries", "expected an array of points");
        std::vector<geometry::Coordinates> pts;
        for (std::size_t i = 0; i < entries.size(); ++i)
            pts.push_back(io::detail_::numbers(entries[i], path + "/entries/" + std::to_string(i)));
        const geometry::TranslationTuple tuple =
            io::detail_::checked(path, [&] { return geometry::TranslationTuple(pts, geometry::Domain::any()); });
        const auto sel = io::detail_::checked(path, [&] { return geometry::select_direction(action, tuple); });
        if (sel.degenerate) throw schema_error(path, "degenerate tuple: M_r = 1");
        // theta defaults to M_r^{-1/2}, an admissible value in [M_r^{-1}, 1).
        const double log_theta = tj.contains("log_theta")
                                     ? io::detail_::get_number(tj, path, "log_theta")
                                     : -0.5 * sel.M_r.log;
        const auto win = io::detail_::checked(path, [&] { return selection::choose_window(sel, log_theta); });
        csv << k << ',' << tuple.size() << ',' << sel.root << ',' << sel.i << ',' << sel.j << ','
            << detail_::sci(sel.M_r.log) << ',' << detail_::sci(log_theta) << ',' << win.p << ',' << win.q
            << ',' << detail_::sci(win.L.value()) << ',' << detail_::sci(win.L.log) << ','
            << win.upper.holds << ',' << win.lower.holds << ',' << win.separated.holds << '\n';
        rows.push_back({{"tuple", k}, {"p", win.p}, {"q", win.q}, {"log_L", win.L.log},
                        {"relabeling", sel.relabeling}, {"log_image_norms", sel.log_image_norms()}});
    }
    Outputs out;
    out["schedule.csv"] = csv.str();
    out["schedule.gp"] = detail_::gnuplot_script("schedule.csv", "window length", 6, 11, "log M_r", "log L",
                                                 false, false);
    out["summary.json"] = detail_::dump({{"mode", "schedule"}, {"seed", effective_seed(m, opt)}, {"rows", rows}});
    return out;
}

// ---- correlate ----

struct CorrelationRow {
    std::vector<double> times;
    double log_delta = 0.0;
    std::complex<double> value;
    double mu_product = 0.0;
    double abs_error = 0.0;
};

inline Outputs run_correlate(const json& m, const RunOptions& opt) {
    using namespace modular;
    const json& spec = detail_::block(m, "correlate");
    const std::string base = "/correlate";
    const auto profile = io::profile_from_json(io::detail_::field(spec, base, "profile"), base + "/profile");
    const auto sigma_density = spec.contains("sigma") ? io::measure_from_json(spec["sigma"], base + "/sigma")
                                                      : wiener::TorusMeasure::haar(1);
    const auto sigma = io::detail_::checked(base + "/sigma", [&] { return HorocycleMeasure(sigma_density); });
    const int xi = spec.contains("xi") ? io::detail_::integer(spec["xi"], base + "/xi") : 0;

    std::size_t nodes = CorrelationOptions{}.nodes;
    if (spec.contains("nodes")) {
        const int n = io::detail_::integer(spec["nodes"], base + "/nodes");
        if (n < static_cast<int>(min_nodes)) throw schema_error(base + "/nodes", "need at least 16 nodes");
        nodes = static_cast<std::size_t>(n);
    }
    if (opt.nodes) nodes = *opt.nodes;
    if (nodes < min_nodes) throw schema_error("--nodes", "need at least 16 nodes");

    const json& times = io::detail_::field(spec, base, "times");
    if (!times.is_array() || times.empty()) throw schema_error(base + "/times", "expected a non-empty array");
    std::vector<std::vector<double>> grid;
    std::size_t r = 0;
    for (std::size_t k = 0; k < times.size(); ++k) {
        const std::string p = base + "/times/" + std::to_string(k);
        grid.push_back(io::detail_::numbers(times[k], p));
        if (grid.back().empty()) throw schema_error(p, "expected at least one time");
        if (k == 0) r = grid.back().size();
        if (grid.back().size() != r) throw schema_error(p, "every row needs the same number of times");
        for (double t : grid.back())
            if (t < 0.0 || t > max_time) throw schema_error(p, "times must lie in [0, 30]");
    }

    const std::vector<EisensteinObservable> obs(r, EisensteinObservable(profile));
    CorrelationOptions copt;
    copt.nodes = nodes;
    copt.threads = opt.threads;

    std::optional<constants::BoundLedger> ledger;
    if (m.contains("params")) {
        const auto params = io::params_from_json(m["params"]);
        const std::string kind =
            spec.contains("ledger_kind") ? spec["ledger_kind"].get<std::string>() : std::string("theorem-A");
        ledger = build_ledger(params, kind, static_cast<int>(r), base + "/ledger_kind");
    }
    const double s_norm = profile_ck_norm(profile, 1);

    std::ostringstream csv;
    csv << "r";
    for (std::size_t i = 1; i <= r; ++i) csv << ",t_" << i;
    csv << ",Delta_add,Delta_mult,value_re,value_im,mu_product,abs_error,N_nodes\n";

    std::vector<CorrelationRow> rows;
    json summary_rows = json::array();
    int violations = 0;
    for (const auto& ts : grid) {
        CorrelationRow row;
        row.times = ts;
        row.log_delta = modular_delta(ts).log;
        row.value = twisted_correlation(sigma, xi, obs, ts, copt);
        row.mu_product = 1.0;
        if (xi == 0)
            for (const auto& o : obs) row.mu_product *= o.mu();
        else
            row.mu_product = 0.0;
        row.abs_error = std::abs(row.value - row.mu_product);
        rows.push_back(row);

        csv << r;
        for (double t : ts) csv << ',' << detail_::sci(t);
        csv << ',' << detail_::sci(row.log_delta) << ',' << detail_::sci(std::exp(row.log_delta)) << ','
            << detail_::sci(row.value.real()) << ',' << detail_::sci(row.value.imag()) << ','
            << detail_::sci(row.mu_product) << ',' << detail_::sci(row.abs_error) << ',' << nodes << '\n';

        json sr = {{"times", ts}, {"Delta_add", row.log_delta}, {"measured_error", row.abs_error}};
        if (ledger) {
            const std::vector<double> s(r, s_norm);
            const auto b = constants::bound_evaluate(*ledger, static_cast<int>(r), row.log_delta,
                                                     sigma.wiener_norm(), s);
            sr["bound"] = b.value;
            sr["threshold_met"] = b.threshold_met;
            sr["bound_dominates"] = b.value >= row.abs_error;
            if (b.threshold_met && b.value < row.abs_error) ++violations;
        }
        summary_rows.push_back(sr);
    }

    json summary = {{"mode", "correlate"},
                    {"seed", effective_seed(m, opt)},
                    {"r", r},
                    {"xi", xi},
                    {"N_nodes", nodes},
                    {"profile", io::to_json(profile)},
                    {"sigma", io::to_json(sigma.density())},
                    {"sigma_wiener_norm", sigma.wiener_norm()},
                    {"s_norm_surrogate", s_norm},
                    {"library_version", library_version},
                    {"rows", summary_rows}};
    if (ledger) {
        summary["ledger_kind"] = constants::to_string(ledger->mode);
        summary["soft_check_violations"] = violations;
    }
    std::vector<double> ld, err;
    for (const auto& row : rows)
        if (row.abs_error > 0.0) {
            ld.push_back(row.log_delta);
            err.push_back(row.abs_error);
        }
    try {
        const auto fit = fit_decay_log(ld, err);
        summary["fit"] = {{"exponent", fit.exponent}, {"prefactor", fit.prefactor}, {"residual", fit.residual}};
    } catch (const precondition_error& e) {
        summary["fit"] = {{"skipped", e.what()}};
    }

    Outputs out;
    out["correlation.csv"] = csv.str();
    const int dcol = static_cast<int>(r) + 3, ecol = static_cast<int>(r) + 7;
    out["correlation.gp"] = detail_::gnuplot_script("correlation.csv", "correlation error", dcol, ecol,
                                                    "Delta", "|error|", true, true);
    out["summary.json"] = detail_::dump(summary);
    return out;
}

// ---- fit ----

inline Outputs run_fit(const json& m, const RunOptions& opt) {
    const json& spec = detail_::block(m, "fit");
    std::vector<double> deltas, errors;
    std::string source = "inline";
    if (spec.contains("input")) {
        if (!spec["input"].is_string()) throw schema_error("/fit/input", "expected a path string");
        const std::string rel = spec["input"].get<std::string>();
        const std::string path = rel.starts_with("/") ? rel : opt.base_dir + "/" + rel;
        std::ifstream in(path);
        if (!in) throw schema_error("/fit/input", "referenced file does not exist: " + rel);
        std::string line;
        std::getline(in, line);
        const auto header = detail_::split_csv_line(line);
        int dcol = -1, ecol = -1;
        for (std::size_t k = 0; k < header.size(); ++k) {
            if (header[k] == "Delta_mult") dcol = static_cast<int>(k);
            if (header[k] == "abs_error") ecol = static_cast<int>(k);
        }
        if (dcol < 0 || ecol < 0) throw schema_error("/fit/input", "CSV needs Delta_mult and abs_error columns");
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto cells = detail_::split_csv_line(line);
            const auto cell = [&](int col) {
                try {
                    return std::stod(cells.at(static_cast<std::size_t>(col)));
                } catch (const std::exception&) {
                    throw schema_error("/fit/input", "malformed CSV row: " + line);
                }
            };
            deltas.push_back(cell(dcol));
            errors.push_back(cell(ecol));
        }
        source = rel;
    } else {
        deltas = io::detail_::numbers(io::detail_::field(spec, "/fit", "deltas"), "/fit/deltas");
        errors = io::detail_::numbers(io::detail_::field(spec, "/fit", "errors"), "/fit/errors");
    }
    const auto fit = io::detail_::checked("/fit", [&] { return modular::fit_decay(deltas, errors); });

    std::ostringstream csv;
    csv << "Delta_mult,abs_error,fitted\n";
    for (std::size_t k = 0; k < deltas.size(); ++k)
        csv << detail_::sci(deltas[k]) << ',' << detail_::sci(errors[k]) << ','
            << detail_::sci(fit.prefactor * std::pow(deltas[k], -fit.exponent)) << '\n';
    Outputs out;
    out["fit.csv"] = csv.str();
    out["fit.gp"] = detail_::gnuplot_script("fit.csv", "decay fit", 1, 2, "Delta", "|error|", true, true) +
                    "replot 'fit.csv' every ::1 using 1:3 with lines\n";
    out["summary.json"] = detail_::dump({{"mode", "fit"},
                                         {"seed", effective_seed(m, opt)},
                                         {"source", source},
                                         {"points", deltas.size()},
                                         {"exponent", fit.exponent},
                                         {"prefactor", fit.prefactor},
                                         {"residual", fit.residual}});
    return out;
}

/// Runs ledger, schedule, correlate or fit. The verify mode lives with the
/// property suite.
inline Outputs run(const json& m, const RunOptions& opt) {
    const std::string mode = validate_manifest(m);
    Outputs out;
    if (mode == "ledger") out = run_ledger(m, opt);
    else if (mode == "schedule") out = run_schedule(m, opt);
    else if (mode == "correlate") out = run_correlate(m, opt);
    else if (mode == "fit") out = run_fit(m, opt);
    else throw schema_error("/mode", "verify is not handled by app::run");
    out["manifest.json"] = detail_::dump(m);
    return out;
}

} // namespace equidist::app
