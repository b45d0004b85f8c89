#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "kambeam/cli.hpp"
#include "kambeam/config.hpp"
#include "kambeam/errors.hpp"
#include "kambeam/report.hpp"
#include "kambeam/sampling.hpp"

using namespace kambeam;
namespace fs = std::filesystem;

namespace {

int config_error_line(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.line();
    }
    return -1;
}

fs::path temp_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("kambeam_unit_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override { unsetenv(kOutDirEnv); }
};

}  // namespace

TEST(Report, EmptyResults) {
    EXPECT_EQ(emit_report(json::array()), "{\"results\":[],\"schema\":1}\n");
    EXPECT_EQ(make_report()["schema"], 1);
}

TEST(Report, CanonicalNumbers) {
    json j;
    j["b"] = 0.1;
    j["a"] = std::numeric_limits<double>::infinity();
    j["c"] = 3;
    const auto s = emit_canonical(j);
    EXPECT_EQ(s, "{\"a\":null,\"b\":0.10000000000000001,\"c\":3}");
    EXPECT_EQ(json::parse(s)["b"].get<double>(), 0.1);
    EXPECT_TRUE(number_or_null(std::nan("")).is_null());
}

TEST(Report, SitesSerialization) {
    EXPECT_EQ(to_json(Site{1, -2}).dump(), "[1,-2]");
    EXPECT_EQ(to_json(BigSite{mpz_class("123456789012345678901234567890"), mpz_class(2)}).dump(),
              "[\"123456789012345678901234567890\",\"2\"]");
}

TEST(Config, ParsesSectionsAndValues) {
    const auto cfg = parse_config(
        "# comment\n"
        "[simulate]\n"
        "sites = (1,0) (3,0)  ; trailing\n"
        "xi = 1e-3 2e-3\n"
        "T = 5\n"
        "trajectory = yes\n"
        "\n"
        "[verify]\n"
        "sites = [[1,0],[3,2]]\n");
    const auto* sim = cfg.section("simulate");
    ASSERT_NE(sim, nullptr);
    EXPECT_EQ(sim->get_doubles("xi", {}), (std::vector<double>{1e-3, 2e-3}));
    EXPECT_EQ(sim->get_double("T", 0.0), 5.0);
    EXPECT_EQ(sim->get_int("T", 0), 5);
    EXPECT_TRUE(sim->get_bool("trajectory", false));
    EXPECT_EQ(sim->get_double("dt", 0.25), 0.25);
    const auto sites = sim->get_sites("sites", {});
    ASSERT_EQ(sites.size(), 2u);
    EXPECT_EQ(sites[1].n1, 3);
    EXPECT_EQ(cfg.section("verify")->get_sites("sites", {}).size(), 2u);
    EXPECT_EQ(cfg.section("missing"), nullptr);
}

TEST(Config, SiteFormats) {
    const auto a = parse_sites("(1,0) (3,2)");
    const auto b = parse_sites("[[1,0],[3,2]]");
    const auto c = parse_sites("1 0 3 2");
    EXPECT_EQ(a, b);
    EXPECT_EQ(a, c);
    const auto big = parse_sites("(5, 596046447753906250)");
    EXPECT_EQ(big[0].n2, mpz_class("596046447753906250"));
}

TEST(Config, ErrorsCarryLines) {
    EXPECT_EQ(config_error_line("x = 1\n"), 1);
    EXPECT_EQ(config_error_line("[a]\nfoo\n"), 2);
    EXPECT_EQ(config_error_line("[a]\nx = 1\ny = 2\nx = 3\n"), 4);
    EXPECT_EQ(config_error_line("[a\n"), 1);
}

TEST(Config, BadValuesAndUnknownKeys) {
    const auto cfg = parse_config("[s]\nT = abc\nwindow = 2.5\nzz = 1\n");
    const auto* s = cfg.section("s");
    try {
        s->get_double("T", 0.0);
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.key(), "s.T");
        EXPECT_EQ(e.line(), 2);
    }
    EXPECT_THROW(s->get_int("window", 0), ConfigError);
    try {
        s->require_known({"T", "window"});
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.key(), "s.zz");
        EXPECT_EQ(e.line(), 4);
    }
    EXPECT_THROW(load_config("/nonexistent/kambeam.ini"), ConfigError);
}

TEST(Sampling, StratifiedCoversEveryStratum) {
    Rng rng(9);
    const Box box{{0.0, -1.0}, {2.0, 1.0}};
    const std::size_t n = 50;
    const auto pts = stratified_samples(box, n, rng);
    ASSERT_EQ(pts.size(), n);
    for (std::size_t d = 0; d < 2; ++d) {
        std::set<std::size_t> strata;
        for (const auto& p : pts) {
            const double u = (p[d] - box.lo[d]) / (box.hi[d] - box.lo[d]);
            ASSERT_GE(u, 0.0);
            ASSERT_LT(u, 1.0);
            strata.insert(static_cast<std::size_t>(u * n));
        }
        EXPECT_EQ(strata.size(), n);
    }
    EXPECT_DOUBLE_EQ(box.volume(), 4.0);
    EXPECT_THROW((Box{{1.0}, {0.0}}.validate()), DomainError);
}

TEST(Sampling, RngIsPortable) {
    Rng a(42), b(42);
    for (int i = 0; i < 10; ++i) EXPECT_EQ(a.next(), b.next());
    Rng c(1);
    for (int i = 0; i < 1000; ++i) EXPECT_LT(c.below(7), 7u);
}

TEST_F(CliTest, SitegenWritesDecimalStrings) {
    RunOptions o;
    o.overrides["b"] = "2";
    const auto r = run("sitegen", o);
    EXPECT_EQ(r.exit_code, 0) << r.message;
    EXPECT_NE(r.report.find("\"596046447753906250\""), std::string::npos);
    EXPECT_TRUE(r.files.empty());
    const auto j = json::parse(r.report);
    EXPECT_EQ(j["schema"], 1);
}

TEST_F(CliTest, VerifyRectangleExitsTwo) {
    const auto dir = temp_dir("verify");
    const auto sites = dir / "sites.txt";
    std::ofstream(sites) << "(1,0) (3,0) (1,2)\n";
    RunOptions o;
    o.overrides["sites_file"] = sites.string();
    o.overrides["window"] = "50";
    const auto r = run("verify", o);
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_NE(r.report.find("rectangle_triple"), std::string::npos);
}

TEST_F(CliTest, MissingConfigExitsOne) {
    RunOptions o;
    o.config_path = "/nonexistent/missing.ini";
    const auto r = run("simulate", o);
    EXPECT_EQ(r.exit_code, 1);
    EXPECT_NE(r.message.find("ConfigError"), std::string::npos);
}

TEST_F(CliTest, UnknownKeyAndCommand) {
    RunOptions o;
    o.overrides["bogus"] = "1";
    EXPECT_EQ(run("schedule", o).exit_code, 1);
    EXPECT_EQ(run("nonsense", RunOptions{}).exit_code, 1);
}

TEST_F(CliTest, ScheduleCsv) {
    RunOptions o;
    o.format = "csv";
    o.overrides["nu_max"] = "3";
    const auto r = run("schedule", o);
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_EQ(std::count(r.report.begin(), r.report.end(), '\n'), 5);
}

TEST_F(CliTest, OutputDirectoryFromEnvironment) {
    const auto dir = temp_dir("env");
    setenv(kOutDirEnv, dir.c_str(), 1);
    const auto r = run("schedule", RunOptions{});
    unsetenv(kOutDirEnv);
    EXPECT_EQ(r.exit_code, 0);
    ASSERT_EQ(r.files.size(), 1u);
    EXPECT_EQ(fs::path(r.files[0]), dir / "schedule.json");
    EXPECT_EQ(slurp(dir / "schedule.json"), r.report);
}

TEST_F(CliTest, ByteDeterministic) {
    RunOptions o;
    o.overrides["sites"] = "(1,0) (3,2)";
    o.overrides["samples"] = "100";
    o.overrides["K"] = "3";
    o.overrides["window"] = "8";
    const auto a = run("measure", o);
    const auto b = run("measure", o);
    EXPECT_EQ(a.exit_code, 0) << a.message;
    EXPECT_EQ(a.report, b.report);
    const auto j = json::parse(a.report);
    EXPECT_TRUE(j["results"][0]["per_family"].contains("R_knm"));
}

TEST_F(CliTest, SitesFileRoundTrip) {
    const auto dir = temp_dir("roundtrip");
    RunOptions gen;
    gen.overrides["b"] = "2";
    gen.out_path = (dir / "sites.json").string();
    ASSERT_EQ(run("sitegen", gen).exit_code, 0);
    const auto sites = load_sites_file(gen.out_path);
    ASSERT_EQ(sites.size(), 2u);
    EXPECT_EQ(sites[0].n2, mpz_class("596046447753906250"));
}

TEST_F(CliTest, CommandList) {
    const auto& c = commands();
    EXPECT_EQ(c.size(), 10u);
    EXPECT_NE(std::find(c.begin(), c.end(), "report"), c.end());
}
