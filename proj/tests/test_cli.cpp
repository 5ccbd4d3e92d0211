#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
    int code = -1;
    std::string err;
};

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("equidist_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Result run(const std::string& args, const fs::path& work) {
    const fs::path err = work / "stderr.txt";
    const std::string cmd = std::string(EQUIDIST_CLI) + " " + args + " > " + (work / "stdout.txt").string() + " 2> " +
                            err.string();
    const int status = std::system(cmd.c_str());
    Result r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = slurp(err);
    return r;
}

fs::path write_manifest(const fs::path& dir, const json& m) {
    const fs::path p = dir / "manifest.json";
    std::ofstream(p) << m.dump();
    return p;
}

std::string manifest(const std::string& name) { return std::string(EQUIDIST_SOURCE_DIR) + "/manifests/" + name; }

} // namespace

TEST(Cli, EmptyManifestIsSchemaError) {
    const auto w = scratch("empty");
    const auto m = write_manifest(w, json::object());
    const auto r = run("ledger --manifest " + m.string() + " --out " + (w / "out").string(), w);
    EXPECT_EQ(r.code, 2);
    const auto e = json::parse(r.err);
    EXPECT_EQ(e["exit_code"], 2);
    EXPECT_EQ(e["error"], "schema");
    EXPECT_FALSE(fs::exists(w / "out" / "summary.json"));
}

TEST(Cli, InvalidJsonIsSchemaError) {
    const auto w = scratch("garbage");
    std::ofstream(w / "m.json") << "{ not json";
    EXPECT_EQ(run("fit --manifest " + (w / "m.json").string(), w).code, 2);
}

TEST(Cli, MissingManifestFile) {
    const auto w = scratch("missing");
    EXPECT_EQ(run("fit --manifest " + (w / "nope.json").string(), w).code, 2);
}

TEST(Cli, ModeMustMatchSubcommand) {
    const auto w = scratch("mismatch");
    const auto r = run("fit --manifest " + manifest("ledger_example.json") + " --out " + w.string(), w);
    EXPECT_EQ(r.code, 2);
    EXPECT_EQ(json::parse(r.err)["path"], "/mode");
}

TEST(Cli, UnknownFlag) {
    const auto w = scratch("flag");
    EXPECT_EQ(run("ledger --frobnicate 3", w).code, 2);
}

TEST(Cli, LedgerOutputs) {
    const auto w = scratch("ledger");
    const auto r = run("ledger --manifest " + manifest("ledger_example.json") + " --out " + w.string(), w);
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream csv(slurp(w / "ledger.csv"));
    std::string header, first;
    std::getline(csv, header);
    std::getline(csv, first);
    EXPECT_EQ(first.rfind("1,2,", 0), 0u) << first;
    EXPECT_NE(first.find("4.5454545454545456e-02"), std::string::npos) << first;
    const auto s = json::parse(slurp(w / "summary.json"));
    EXPECT_EQ(s["mode"], "ledger");
    EXPECT_TRUE(s.contains("lambda"));
    EXPECT_TRUE(fs::exists(w / "ledger.gp"));
    EXPECT_TRUE(fs::exists(w / "manifest.json"));
}

TEST(Cli, ScheduleOutputs) {
    const auto w = scratch("schedule");
    const auto r = run("schedule --manifest " + manifest("schedule_example.json") + " --out " + w.string(), w);
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream csv(slurp(w / "schedule.csv"));
    std::string header;
    std::getline(csv, header);
    EXPECT_EQ(header, "tuple,r,root,i,j,log_M_r,log_theta,p,q,L,log_L,upper,lower,separated");
}

TEST(Cli, CorrelateOutputs) {
    const auto w = scratch("correlate");
    const auto r = run("correlate --manifest " + manifest("correlate_r1.json") + " --nodes 4096 --out " + w.string(), w);
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream csv(slurp(w / "correlation.csv"));
    std::string header, line;
    std::getline(csv, header);
    EXPECT_EQ(header, "r,t_1,Delta_add,Delta_mult,value_re,value_im,mu_product,abs_error,N_nodes");
    int rows = 0;
    while (std::getline(csv, line)) {
        ++rows;
        EXPECT_NE(line.find(",4096"), std::string::npos) << line;
    }
    EXPECT_EQ(rows, 11);
    const auto s = json::parse(slurp(w / "summary.json"));
    EXPECT_TRUE(s.contains("fit"));
    for (const auto& row : s["rows"]) EXPECT_GT(row["measured_error"].get<double>(), 0.0);
}

TEST(Cli, CorrelateTimeOutOfRange) {
    const auto w = scratch("late");
    json m = json::parse(slurp(manifest("correlate_r1.json")));
    m["correlate"]["times"] = {{31.0}};
    const auto r = run("correlate --manifest " + write_manifest(w, m).string() + " --out " + (w / "o").string(), w);
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(json::parse(r.err)["message"].get<std::string>().find("[0, 30]"), std::string::npos);
}

TEST(Cli, FitFromShippedCsv) {
    const auto w = scratch("fit");
    const auto r = run("fit --manifest " + manifest("fit_example.json") + " --out " + w.string(), w);
    ASSERT_EQ(r.code, 0) << r.err;
    const auto s = json::parse(slurp(w / "summary.json"));
    EXPECT_GT(s["exponent"].get<double>(), 0.0);
    EXPECT_EQ(s["points"], 11);
}

TEST(Cli, FitMalformedCsv) {
    const auto w = scratch("fitbad");
    std::ofstream(w / "bad.csv") << "Delta_mult,abs_error\n1,0.5\nx,0.2\n3,0.1\n";
    const json m = {{"schema_version", 1}, {"mode", "fit"}, {"fit", {{"input", "bad.csv"}}}};
    const auto r = run("fit --manifest " + write_manifest(w, m).string() + " --out " + (w / "o").string(), w);
    EXPECT_EQ(r.code, 2);
    EXPECT_EQ(json::parse(r.err)["path"], "/fit/input");
}

TEST(Cli, ThreadCountDoesNotChangeOutputs) {
    const auto w = scratch("threads");
    const std::string base = "correlate --manifest " + manifest("correlate_r2.json") + " --nodes 2048";
    ASSERT_EQ(run(base + " --threads 1 --out " + (w / "a").string(), w).code, 0);
    ASSERT_EQ(run(base + " --threads 4 --out " + (w / "b").string(), w).code, 0);
    ASSERT_EQ(run(base + " --threads 8 --out " + (w / "c").string(), w).code, 0);
    for (const char* f : {"correlation.csv", "summary.json"}) {
        EXPECT_EQ(slurp(w / "a" / f), slurp(w / "b" / f)) << f;
        EXPECT_EQ(slurp(w / "a" / f), slurp(w / "c" / f)) << f;
    }
}

TEST(Cli, EnvironmentThreadsFallback) {
    const auto w = scratch("env");
    const std::string base = "correlate --manifest " + manifest("correlate_r2.json") + " --nodes 2048";
    ASSERT_EQ(run(base + " --out " + (w / "a").string(), w).code, 0);
    ASSERT_EQ(setenv("EQUIDIST_THREADS", "3", 1), 0);
    const auto r = run(base + " --out " + (w / "b").string(), w);
    unsetenv("EQUIDIST_THREADS");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(slurp(w / "a" / "correlation.csv"), slurp(w / "b" / "correlation.csv"));
}

TEST(Cli, SeedRecorded) {
    const auto w = scratch("seed");
    ASSERT_EQ(run("ledger --manifest " + manifest("ledger_example.json") + " --seed 77 --out " + w.string(), w).code, 0);
    EXPECT_EQ(json::parse(slurp(w / "summary.json"))["seed"], 77);
}
