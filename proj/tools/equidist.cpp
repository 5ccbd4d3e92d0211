// equidist: runs ledger, schedule, correlate, fit and verify manifests.
//
// Exit codes: 0 success, 1 verify found a failing criterion, 2 invalid
// manifest or arguments, 3 numerical failure. Errors go to stderr as JSON.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "acceptance_suite.hpp"
#include "app.hpp"

namespace fs = std::filesystem;
using equidist::io::json;

namespace {

struct Flags {
    std::string manifest;
    std::string out = ".";
    std::size_t nodes = 0;
    int threads = 0;
    std::uint64_t seed = 0;
};

int fail(int code, const std::string& kind, const std::string& message, const std::string& path = "") {
    json err = {{"error", kind}, {"message", message}, {"exit_code", code}};
    if (!path.empty()) err["path"] = path;
    std::cerr << err.dump() << '\n';
    return code;
}

json load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw equidist::io::schema_error("", "cannot read manifest '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return json::parse(ss.str());
    } catch (const json::parse_error& e) {
        throw equidist::io::schema_error("", std::string("manifest is not valid JSON: ") + e.what());
    }
}

void write_outputs(const fs::path& dir, const equidist::app::Outputs& outputs) {
    fs::create_directories(dir);
    for (const auto& [name, body] : outputs) {
        std::ofstream f(dir / name, std::ios::binary);
        f << body;
        if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    }
}

equidist::app::Outputs run_verify(const json& manifest, const equidist::app::RunOptions& opt) {
    auto runner = [&](const std::string& text, int threads) {
        equidist::app::RunOptions o;
        o.threads = threads;
        return equidist::app::run(json::parse(text), o);
    };
    std::ostringstream csv;
    csv << "criterion,name,pass,seconds,detail\n";
    bool all = true;
    json rows = json::array();
    for (const auto& o : acceptance::run_all(runner)) {
        std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", o.id, o.name.c_str(), o.detail.c_str());
        std::string detail = o.detail;
        for (char& c : detail)
            if (c == ',') c = ';';
        csv << o.id << ',' << o.name << ',' << (o.pass ? 1 : 0) << ',' << o.seconds << ',' << detail << '\n';
        rows.push_back({{"criterion", o.id}, {"name", o.name}, {"pass", o.pass}, {"detail", o.detail}});
        all &= o.pass;
    }
    equidist::app::Outputs out;
    out["verify.csv"] = csv.str();
    out["summary.json"] = json({{"mode", "verify"},
                                {"seed", equidist::app::effective_seed(manifest, opt)},
                                {"all_pass", all},
                                {"criteria", rows}})
                              .dump(2) +
                          "\n";
    out["manifest.json"] = manifest.dump(2) + "\n";
    return out;
}

int execute(const std::string& mode, const Flags& flags, const CLI::App& sub) {
    try {
        equidist::app::RunOptions opt;
        opt.threads = flags.threads;
        if (sub.count("--nodes")) opt.nodes = flags.nodes;
        if (sub.count("--seed")) opt.seed = flags.seed;

        json manifest;
        if (!flags.manifest.empty()) {
            manifest = load_manifest(flags.manifest);
            opt.base_dir = fs::path(flags.manifest).parent_path().string();
            if (opt.base_dir.empty()) opt.base_dir = ".";
        } else if (mode == "verify") {
            manifest = {{"schema_version", equidist::app::manifest_schema_version}, {"mode", "verify"}};
        } else {
            throw equidist::io::schema_error("", "--manifest is required for " + mode);
        }

        equidist::app::Outputs outputs;
        if (mode == "verify") {
            equidist::app::validate_manifest(manifest);
            outputs = run_verify(manifest, opt);
        } else {
            const std::string declared = equidist::app::validate_manifest(manifest);
            if (declared != mode)
                throw equidist::io::schema_error("/mode", "manifest mode '" + declared + "' does not match subcommand '" +
                                                              mode + "'");
            outputs = equidist::app::run(manifest, opt);
        }
        write_outputs(flags.out, outputs);
        if (mode == "verify") return json::parse(outputs["summary.json"])["all_pass"].get<bool>() ? 0 : 1;
        return 0;
    } catch (const equidist::io::schema_error& e) {
        return fail(2, "schema", e.what(), e.path().empty() ? "/" : e.path());
    } catch (const json::exception& e) {
        return fail(2, "schema", e.what());
    } catch (const equidist::precondition_error& e) {
        return fail(2, "precondition", e.what());
    } catch (const equidist::numerical_error& e) {
        return fail(3, "numerical", e.what());
    } catch (const std::exception& e) {
        return fail(3, "runtime", e.what());
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Effective equidistribution toolkit"};
    app.require_subcommand(1);
    Flags flags;
    std::vector<std::pair<std::string, CLI::App*>> subs;
    for (const char* name : {"ledger", "schedule", "correlate", "fit", "verify"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--manifest", flags.manifest, "manifest JSON");
        sub->add_option("--out", flags.out, "output directory");
        sub->add_option("--nodes", flags.nodes, "quadrature nodes (overrides the manifest)");
        sub->add_option("--threads", flags.threads, "worker threads (default: EQUIDIST_THREADS or 1)");
        sub->add_option("--seed", flags.seed, "seed recorded in the outputs");
        subs.emplace_back(name, sub);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(2, "arguments", e.what());
    }
    for (const auto& [name, sub] : subs)
        if (sub->parsed()) return execute(name, flags, *sub);
    return fail(2, "arguments", "no subcommand");
}
