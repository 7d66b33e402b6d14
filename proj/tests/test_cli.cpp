#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "pc2/cli.hpp"

using namespace pc2;
using io::json;

namespace {

struct Result {
    int code;
    json doc;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "pc2");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    json doc;
    if (code != 2 && out.str().rfind('{', 0) == 0) doc = json::parse(out.str());
    return {code, doc, err.str()};
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("pc2_cli_test_" + name)).string();
}

void write(const std::string& path, const json& j) { io::write_text_file(path, j.dump()); }

}  // namespace

TEST(Cli, Bound) {
    const Result r = run({"bound"});
    ASSERT_EQ(r.code, 0);
    EXPECT_NEAR(r.doc["ratio"].get<double>(), 2 * kSqrt3 / (2 * kSqrt3 - kPi), 1e-9);
    EXPECT_EQ(r.doc["bound"], 11);
    EXPECT_NE(r.err.find("bound 11"), std::string::npos);
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"bogus"}).code, 2);
    EXPECT_EQ(run({"bound", "--no-such-flag"}).code, 2);
    EXPECT_EQ(run({"lemma", "verify", "4"}).code, 2);
    EXPECT_EQ(run({"lemma", "verify", "2", "--grid", "50"}).code, 2);
    EXPECT_EQ(run({"cover", "solve", temp_path("missing.json")}).code, 2);
    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, ConfigGenerateVerifyRoundTrip) {
    const std::string path = temp_path("config.json");
    const std::string svg = temp_path("fig1.svg");
    const Result gen = run({"config", "generate", "--d-frac", "0.999999", "--angles", "120", "--shifts", "32", "--out",
                            path, "--svg", svg});
    ASSERT_EQ(gen.code, 0);
    EXPECT_EQ(gen.doc["count"], 55);
    EXPECT_EQ(gen.doc["points"].size(), 55u);
    EXPECT_TRUE(gen.doc["compressible"].get<bool>());
    EXPECT_TRUE(std::filesystem::exists(svg));
    const Result ver = run({"config", "verify", path});
    EXPECT_EQ(ver.code, 0);
    EXPECT_TRUE(ver.doc["valid"].get<bool>());

    json tampered = io::read_json_file(path);
    tampered["points"].erase(tampered["points"].begin());
    write(path, tampered);
    EXPECT_EQ(run({"config", "verify", path}).code, 1);
}

TEST(Cli, Lemmas) {
    const Result l1 = run({"lemma", "verify", "1", "--trials", "20", "--rotations", "200", "--attempts", "500"});
    EXPECT_EQ(l1.code, 0);
    EXPECT_EQ(l1.doc["failures"].size(), 0u);
    const Result l2 = run({"lemma", "verify", "2", "--grid", "200"});
    EXPECT_EQ(l2.code, 0);
    EXPECT_GE(l2.doc["min_arc"].get<double>(), kPi / 3 - 1e-9);
    const Result l3 = run({"lemma", "verify", "3", "--trials", "2000"});
    EXPECT_EQ(l3.code, 0);
    EXPECT_TRUE(l3.doc["passed"].get<bool>());
    const Result l3bad = run({"lemma", "verify", "3", "--trials", "2000", "--d-frac", "1.01"});
    EXPECT_EQ(l3bad.code, 1);
    EXPECT_FALSE(l3bad.doc["deep_hole_contained"].get<bool>());
}

TEST(Cli, HandicapAndCover) {
    const std::string pts = temp_path("pts.json");
    write(pts, json::array({json::array({0.0, 0.0}), json::array({3.0, 0.0})}));
    const Result h = run({"handicap", "check", pts});
    EXPECT_EQ(h.code, 0);
    EXPECT_EQ(h.doc["verdict"], "coverable");

    const std::string sol = temp_path("sol.json");
    const Result s = run({"--seed", "4", "cover", "solve", pts, "--out", sol});
    ASSERT_EQ(s.code, 0);
    EXPECT_EQ(s.doc["status"], "covered");
    // thin wrapper: identical to the library call
    SolveOptions opt;
    opt.seed = 4;
    const CoverSolution direct = solve_cover(PointSet{{0, 0}, {3, 0}}, opt);
    EXPECT_EQ(io::centers_from_json(s.doc), direct.centers);
    EXPECT_EQ(run({"cover", "verify", pts, sol}).code, 0);

    const std::string bad = temp_path("bad.json");
    write(bad, json::array({json::array({0.0, 0.0}), json::array({1.0, 0.0})}));
    EXPECT_EQ(run({"cover", "verify", pts, bad}).code, 1);

    const Result rem = run({"cover", "removability", pts, "--partitions", "10"});
    EXPECT_EQ(rem.code, 0);
    EXPECT_EQ(rem.doc["removals"].size(), 2u);
}

TEST(Cli, Translates) {
    const std::string ts = temp_path("ts.json");
    const Result lat = run({"translates", "lattice", "--n", "5", "--out", ts});
    ASSERT_EQ(lat.code, 0);
    EXPECT_EQ(lat.doc["translates"].size(), 25u);
    EXPECT_TRUE(lat.doc["triangle_tiling"]["covered"].get<bool>());
    EXPECT_EQ(run({"translates", "certify", ts}).code, 0);

    const std::string one = temp_path("ts1.json");
    ASSERT_EQ(run({"translates", "lattice", "--n", "1", "--out", one}).code, 0);
    EXPECT_EQ(run({"translates", "certify", one}).code, 1);

    const Result search = run({"translates", "search", "--k", "10", "--budget", "200", "--resolution", "64"});
    EXPECT_EQ(search.code, 0);
    EXPECT_FALSE(search.doc["certified"].get<bool>());
    EXPECT_GT(search.doc["uncovered_estimate"]["fraction"].get<double>(), 0.0);
}

TEST(Cli, Render) {
    const std::string svg = temp_path("fig4.svg");
    const Result r = run({"render", "fig4", "--n", "5", "--svg", svg});
    EXPECT_EQ(r.code, 0);
    EXPECT_TRUE(std::filesystem::exists(svg));
    EXPECT_EQ(run({"render", "nonsense"}).code, 2);
}

TEST(Cli, BinaryExitCodes) {
    const std::string bin = PC2_BINARY;
    const int ok = std::system((bin + " bound > /dev/null 2>&1").c_str());
    EXPECT_EQ(WEXITSTATUS(ok), 0);
    const int usage = std::system((bin + " --frobnicate > /dev/null 2>&1").c_str());
    EXPECT_EQ(WEXITSTATUS(usage), 2);
}
