#pragma once

// JSON encodings of the library's parameter records. Requires nlohmann/json
// (single header, included as <json.hpp>).

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "equidist/constants.hpp"
#include "equidist/geometry.hpp"
#include "equidist/modular/eisenstein.hpp"
#include "equidist/wiener.hpp"

namespace equidist::io {

using nlohmann::json;

/// A document that does not match the manifest schema.
class schema_error : public std::runtime_error {
public:
    schema_error(const std::string& path, const std::string& what)
        : std::runtime_error(path + ": " + what), path_(path) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

namespace detail_ {

inline const json& field(const json& j, const std::string& path, const char* key) {
    if (!j.is_object()) throw schema_error(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw schema_error(path, std::string("missing required field '") + key + "'");
    return *it;
}

inline double number(const json& j, const std::string& path) {
    if (!j.is_number()) throw schema_error(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw schema_error(path, "expected a finite number");
    return v;
}

inline int integer(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw schema_error(path, "expected an integer");
    return j.get<int>();
}

inline std::vector<double> numbers(const json& j, const std::string& path) {
    if (!j.is_array()) throw schema_error(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t k = 0; k < j.size(); ++k) out.push_back(number(j[k], path + "/" + std::to_string(k)));
    return out;
}

inline double get_number(const json& j, const std::string& path, const char* key) {
    return number(field(j, path, key), path + "/" + key);
}

inline double get_number_or(const json& j, const std::string& path, const char* key, double fallback) {
    return j.contains(key) ? get_number(j, path, key) : fallback;
}

/// Runs a library constructor or validator, reporting precondition failures
/// as schema errors at `path`.
template <class F>
auto checked(const std::string& path, F&& f) {
    try {
        return f();
    } catch (const precondition_error& e) {
        throw schema_error(path, e.what());
    }
}

} // namespace detail_

// ---- NormGrowth / AssumptionParams ----

inline json to_json(const constants::NormGrowth& g) {
    if (g.kind == constants::NormGrowth::Kind::power_law)
        return {{"kind", "power_law"}, {"L1", g.L1}, {"ell", g.ell}, {"L2", g.L2}};
    return {{"kind", "tabulated"}, {"B", g.B}, {"b", g.b}, {"M", g.M}};
}

inline constants::NormGrowth growth_from_json(const json& j, const std::string& path = "/params/growth") {
    using namespace detail_;
    const json& kind = field(j, path, "kind");
    if (kind == "power_law")
        return constants::NormGrowth::power_law(get_number(j, path, "L1"), get_number(j, path, "ell"),
                                                get_number(j, path, "L2"));
    if (kind == "tabulated") {
        constants::NormGrowth g;
        g.B = numbers(field(j, path, "B"), path + "/B");
        g.b = numbers(field(j, path, "b"), path + "/b");
        g.M = numbers(field(j, path, "M"), path + "/M");
        return g;
    }
    throw schema_error(path + "/kind", "expected 'power_law' or 'tabulated'");
}

inline json to_json(const constants::AssumptionParams& p) {
    return {{"d_o", p.d_o}, {"D_o", p.D_o}, {"delta_o", p.delta_o}, {"C", p.C}, {"c", p.c},
            {"A", p.A},     {"a", p.a},     {"growth", to_json(p.growth)}};
}

inline constants::AssumptionParams params_from_json(const json& j, const std::string& path = "/params") {
    using namespace detail_;
    constants::AssumptionParams p;
    p.d_o = integer(field(j, path, "d_o"), path + "/d_o");
    p.D_o = get_number(j, path, "D_o");
    p.delta_o = get_number(j, path, "delta_o");
    p.C = get_number(j, path, "C");
    p.c = get_number(j, path, "c");
    p.A = get_number(j, path, "A");
    p.a = get_number(j, path, "a");
    p.growth = growth_from_json(field(j, path, "growth"), path + "/growth");
    checked(path, [&] { p.validate(); return 0; });
    return p;
}

// ---- RootAction ----

inline json to_json(const geometry::RootAction& action) {
    return {{"dim_t", action.dim_t()}, {"roots", action.roots()}, {"multiplicities", action.multiplicities()}};
}

/// Either {"horospherical": [m, n]} or {"dim_t", "roots", "multiplicities"?}.
inline geometry::RootAction action_from_json(const json& j, const std::string& path = "/action") {
    using namespace detail_;
    if (j.is_object() && j.contains("horospherical")) {
        const json& mn = j["horospherical"];
        if (!mn.is_array() || mn.size() != 2) throw schema_error(path + "/horospherical", "expected [m, n]");
        const int m = integer(mn[0], path + "/horospherical/0"), n = integer(mn[1], path + "/horospherical/1");
        return checked(path, [&] { return geometry::RootAction::horospherical(m, n); });
    }
    const int dim = integer(field(j, path, "dim_t"), path + "/dim_t");
    const json& roots = field(j, path, "roots");
    if (!roots.is_array()) throw schema_error(path + "/roots", "expected an array of root vectors");
    std::vector<geometry::Coordinates> rs;
    for (std::size_t k = 0; k < roots.size(); ++k) rs.push_back(numbers(roots[k], path + "/roots/" + std::to_string(k)));
    std::vector<int> mult;
    if (j.contains("multiplicities")) {
        const json& mj = j["multiplicities"];
        if (!mj.is_array()) throw schema_error(path + "/multiplicities", "expected an array of integers");
        for (std::size_t k = 0; k < mj.size(); ++k)
            mult.push_back(integer(mj[k], path + "/multiplicities/" + std::to_string(k)));
    }
    if (dim < 1) throw schema_error(path + "/dim_t", "must be positive");
    return checked(path, [&] { return geometry::RootAction(static_cast<std::size_t>(dim), rs, mult); });
}

// ---- Torus series ----

template <class Tag>
json to_json(const wiener::TorusSeries<Tag>& s) {
    json coeffs = json::array();
    for (const auto& [k, v] : s.coefficients()) coeffs.push_back({{"chi", k}, {"re", v.real()}, {"im", v.imag()}});
    json out = {{"dim", s.dim()}, {"coeffs", coeffs}};
    if (s.tail_bound() > 0.0) out["tail_bound"] = s.tail_bound();
    return out;
}

/// {"dim": n, "coeffs": [{"chi": [...], "re": x, "im": y}, ...], "tail_bound"?: t}
template <class Tag>
wiener::TorusSeries<Tag> series_from_json(const json& j, const std::string& path) {
    using namespace detail_;
    const int dim = integer(field(j, path, "dim"), path + "/dim");
    if (dim < 1) throw schema_error(path + "/dim", "must be positive");
    const json& coeffs = field(j, path, "coeffs");
    if (!coeffs.is_array()) throw schema_error(path + "/coeffs", "expected an array");
    wiener::TorusSeries<Tag> out(static_cast<std::size_t>(dim), {}, get_number_or(j, path, "tail_bound", 0.0));
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        const std::string p = path + "/coeffs/" + std::to_string(k);
        const json& chi = field(coeffs[k], p, "chi");
        if (!chi.is_array() || chi.size() != static_cast<std::size_t>(dim))
            throw schema_error(p + "/chi", "expected an integer array of length dim");
        wiener::Frequency f;
        for (std::size_t i = 0; i < chi.size(); ++i) f.push_back(integer(chi[i], p + "/chi/" + std::to_string(i)));
        out.add(f, {get_number(coeffs[k], p, "re"), get_number_or(coeffs[k], p, "im", 0.0)});
    }
    return out;
}

inline wiener::TorusMeasure measure_from_json(const json& j, const std::string& path = "/sigma") {
    return series_from_json<wiener::measure_tag>(j, path);
}

// ---- Profiles ----

inline json to_json(const modular::BumpProfile& f) {
    return {{"kind", f.kind() == modular::BumpProfile::Kind::smooth ? "smooth" : "indicator"},
            {"y_lo", f.y_lo()},
            {"y_hi", f.y_hi()},
            {"amplitude", f.amplitude()}};
}

inline modular::BumpProfile profile_from_json(const json& j, const std::string& path = "/profile") {
    using namespace detail_;
    const json& kind = field(j, path, "kind");
    modular::BumpProfile::Kind k;
    if (kind == "smooth") k = modular::BumpProfile::Kind::smooth;
    else if (kind == "indicator") k = modular::BumpProfile::Kind::indicator;
    else throw schema_error(path + "/kind", "expected 'smooth' or 'indicator'");
    const double lo = get_number(j, path, "y_lo"), hi = get_number(j, path, "y_hi");
    const double amp = get_number_or(j, path, "amplitude", 1.0);
    return checked(path, [&] { return modular::BumpProfile(k, lo, hi, amp); });
}

} // namespace equidist::io
