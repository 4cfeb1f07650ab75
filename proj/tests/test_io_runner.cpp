#include <doctest.h>

#include <charconv>
#include <stdexcept>

#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "sfl/io.hpp"
#include "sfl/runner.hpp"
#include "sfl/version.hpp"

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("sfl_test_" + tag + "_" +
                                            std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("doubles format round-trip through text") {
    const auto parse = [](const std::string& s) {
        double v = 0.0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        REQUIRE(res.ec == std::errc{});
        return v;
    };
    CHECK(sfl::io::format_double(0.1) == "0.1");
    CHECK(sfl::io::format_double(2.0) == "2");
    const double third = 1.0 / 3.0;
    CHECK(parse(sfl::io::format_double(third)) == third);
    const double tiny = 4.9406564584124654e-324;
    CHECK(parse(sfl::io::format_double(tiny)) == tiny);
}

TEST_CASE("csv writer quotes and checks row widths") {
    sfl::io::Csv csv({"name", "value", "flag"});
    csv.cell(std::string("plain"));
    csv.cell(1.5);
    csv.cell(true);
    csv.end_row();
    csv.cell(std::string("a,b \"quoted\"\nline"));
    csv.cell(42);
    csv.cell(false);
    csv.end_row();
    const std::string text = csv.str();
    CHECK(text == "name,value,flag\n"
                  "plain,1.5,1\n"
                  "\"a,b \"\"quoted\"\"\nline\",42,0\n");

    sfl::io::Csv bad({"a", "b"});
    bad.cell(1);
    CHECK_THROWS_AS(bad.end_row(), std::logic_error);
}

TEST_CASE("json files round-trip and errors name the path") {
    TempDir tmp("json");
    const fs::path file = tmp.path / "x.json";
    sfl::io::json j;
    j["schema_version"] = 1;
    j["name"] = "test";
    j["vals"] = {1, 2, 3};
    sfl::io::write_json_file(file.string(), j);
    const auto back = sfl::io::load_json_file(file.string());
    CHECK(back == j);

    const std::string missing = (tmp.path / "absent.json").string();
    try {
        (void)sfl::io::load_json_file(missing);
        CHECK(false);
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("absent.json") != std::string::npos);
    }
}

TEST_CASE("config resolution: defaults, files, and flag overrides") {
    const auto base = sfl::runner::resolve_config("", {});
    CHECK(base.at("schema_version") == 1);

    TempDir tmp("cfg");
    const fs::path file = tmp.path / "c.json";
    sfl::io::json j{{"schema_version", 1}, {"trials", 7}, {"seed", 3}};
    sfl::io::write_json_file(file.string(), j);
    sfl::io::json over;
    over["trials"] = 9;
    const auto merged = sfl::runner::resolve_config(file.string(), over);
    CHECK(merged.at("trials") == 9);
    CHECK(merged.at("seed") == 3);
}

TEST_CASE("runner rejects malformed configs up front") {
    TempDir tmp("bad");
    const std::string out = tmp.path.string();

    CHECK_THROWS_WITH_AS(sfl::runner::run("oracle", sfl::io::json::object(), out),
                         doctest::Contains("schema_version"), std::runtime_error);
    CHECK_THROWS_WITH_AS(
        sfl::runner::run("oracle", sfl::io::json{{"schema_version", 2}}, out),
        doctest::Contains("schema_version"), std::runtime_error);
    CHECK_THROWS_WITH_AS(
        sfl::runner::run("nope", sfl::io::json{{"schema_version", 1}}, out),
        doctest::Contains("unknown subcommand"), std::runtime_error);
    CHECK_THROWS_WITH_AS(
        sfl::runner::run("oracle",
                         sfl::io::json{{"schema_version", 1}, {"bogus_field", 1}}, out),
        doctest::Contains("bogus_field"), std::runtime_error);
    // study subcommands refuse to run without an explicit seed
    CHECK_THROWS_WITH_AS(
        sfl::runner::run("coherence-study", sfl::io::json{{"schema_version", 1}}, out),
        doctest::Contains("seed"), std::runtime_error);
}

TEST_CASE("subcommand registry is complete") {
    const auto names = sfl::runner::subcommand_names();
    REQUIRE(names.size() == 7);
    for (const char* expect : {"coherence-study", "discretize-study", "recover", "oracle",
                               "taylor-check", "pipeline", "rates"})
        CHECK(std::find(names.begin(), names.end(), expect) != names.end());
}

TEST_CASE("oracle subcommand produces its files and reruns byte-identically") {
    sfl::io::json cfg{{"schema_version", 1}, {"trials", 3}, {"seed", 12},
                      {"d", 1}, {"max_freq", 3}};
    TempDir a("runA"), b("runB");
    CHECK(sfl::runner::run("oracle", cfg, a.path.string()) == 0);
    CHECK(sfl::runner::run("oracle", cfg, b.path.string()) == 0);
    REQUIRE(fs::exists(a.path / "oracle.csv"));
    REQUIRE(fs::exists(a.path / "oracle_meta.json"));
    CHECK(slurp(a.path / "oracle.csv") == slurp(b.path / "oracle.csv"));
    CHECK(slurp(a.path / "oracle_meta.json") == slurp(b.path / "oracle_meta.json"));

    const auto meta = sfl::io::load_json_file((a.path / "oracle_meta.json").string());
    CHECK(meta.at("library_version").get<std::string>() == sfl::kVersion);
    CHECK(meta.at("subcommand") == "oracle");
    CHECK(meta.at("config").at("seed") == 12);
}

TEST_CASE("recover subcommand writes the iteration trace") {
    sfl::io::json cfg{{"schema_version", 1}, {"seed", 4}, {"d", 1}, {"max_freq", 3},
                      {"J", 10},            {"s", 2}};
    TempDir tmp("rec");
    CHECK(sfl::runner::run("recover", cfg, tmp.path.string()) == 0);
    REQUIRE(fs::exists(tmp.path / "recover.csv"));
    REQUIRE(fs::exists(tmp.path / "recover_report.json"));
    const auto report = sfl::io::load_json_file((tmp.path / "recover_report.json").string());
    CHECK(report.at("J") == 10);
    CHECK(report.at("s") == 2);
    CHECK(report.at("trace").at("l1_error").size() == 11);
    const std::string csv = slurp(tmp.path / "recover.csv");
    CHECK(csv.rfind("k,", 0) == 0);
}
