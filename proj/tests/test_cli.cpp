#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ggbm/cli.hpp"

using namespace ggbm::cli;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_args(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> split(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> v;
    for (std::string w; in >> w;) {
        v.push_back(w);
    }
    return v;
}

// Data lines (header and rows) of a CSV payload.
std::vector<std::string> data_lines(const std::string& csv) {
    std::vector<std::string> v;
    std::istringstream in(csv);
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line[0] != '#') {
            if (line.back() == '\r') {
                line.pop_back();
            }
            v.push_back(line);
        }
    }
    return v;
}

std::string command_echo(const std::string& csv) {
    const std::string key = "# command=";
    const auto p = csv.find(key);
    REQUIRE(p != std::string::npos);
    return csv.substr(p + key.size(), csv.find('\n', p) - p - key.size());
}

}  // namespace

TEST_CASE("shortest round-trip number formatting") {
    for (double x : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -2.5, 0.0}) {
        CHECK(std::stod(format_double(x)) == x);
    }
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(INFINITY) == "inf");
    CHECK(format_double(-INFINITY) == "-inf");
}

TEST_CASE("mlf and mwright") {
    auto r = run_args({"mlf", "--beta", "1", "--x", "1"});
    CHECK(r.code == ok);
    auto lines = data_lines(r.out);
    REQUIRE(lines.size() == 2);
    CHECK(lines[0] == "x,value");
    CHECK(std::stod(lines[1].substr(2)) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));

    r = run_args({"mwright", "--beta", "0.5", "--tau", "2", "--format", "json"});
    CHECK(r.code == ok);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["schema_version"] == kSchemaVersion);
    CHECK(j["command"] == "mwright");
    CHECK(j["params"]["beta"] == 0.5);
    CHECK(j["rows"][0][1].get<double>() == doctest::Approx(0.20755374871029735).epsilon(1e-12));

    r = run_args({"mlf", "--beta", "0.5", "--grid", "0:2:5"});
    CHECK(data_lines(r.out).size() == 6);
}

TEST_CASE("usage errors exit 2") {
    auto r = run_args({"mlf", "--beta", "1.5", "--x", "1"});
    CHECK(r.code == usage);
    CHECK(r.err.find("beta out of range (0,1]") != std::string::npos);
    CHECK(run_args({"mlf", "--x", "1"}).code == usage);
    CHECK(run_args({"bogus"}).code == usage);
    CHECK(run_args({}).code == usage);
    CHECK(run_args({"sample", "--beta", "1", "--alpha", "1", "--paths", "2"}).code == usage);
    CHECK(run_args({"couplings", "--hurst", "0.5", "--n", "2"}).code == usage);
    CHECK(run_args({"energy", "--beta", "0.5", "--alpha", "1", "--grid", "1:0:5"}).code == usage);
    CHECK(run_args({"energy", "--beta", "0.5", "--alpha", "1", "--n", "2", "--y", "1"}).code == usage);
    CHECK(run_args({"mlf", "--beta", "0.5", "--x", "1", "--format", "xml"}).code == usage);
    CHECK(run_args({"--help"}).code == ok);
}

TEST_CASE("energy grid at beta = 1 is the parabola") {
    const auto r = run_args({"energy", "--beta", "1", "--alpha", "1", "--d", "1", "--gap", "1", "--grid", "-4:4:81",
                             "--rezero"});
    REQUIRE(r.code == ok);
    const auto lines = data_lines(r.out);
    REQUIRE(lines.size() == 82);
    CHECK(lines[0] == "y,H[beta=1]");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto comma = lines[i].find(',');
        const double y = std::stod(lines[i].substr(0, comma));
        const double h = std::stod(lines[i].substr(comma + 1));
        CHECK(std::abs(h - 0.5 * y * y) < 1e-10);
    }
}

TEST_CASE("energy minimum at the origin") {
    const auto r = run_args({"energy", "--beta", "0.5", "--alpha", "1", "--grid", "-2:2:21", "--format", "json"});
    REQUIRE(r.code == ok);
    const auto j = nlohmann::json::parse(r.out);
    double best = INFINITY;
    double at = NAN;
    for (const auto& row : j["rows"]) {
        if (row[1].get<double>() < best) {
            best = row[1].get<double>();
            at = row[0].get<double>();
        }
    }
    CHECK(at == 0.0);
}

TEST_CASE("couplings") {
    const auto r = run_args({"couplings", "--hurst", "0.5", "--n", "21"});
    REQUIRE(r.code == ok);
    const auto lines = data_lines(r.out);
    REQUIRE(lines.size() == 22);
    CHECK(lines[0] == "index,offset,g");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        std::istringstream row(lines[i]);
        std::string idx, off, g;
        std::getline(row, idx, ',');
        std::getline(row, off, ',');
        std::getline(row, g, ',');
        if (std::abs(std::stoi(off)) > 1) {
            CHECK(std::abs(std::stod(g)) < 1e-10);
        }
    }
    CHECK(run_args({"couplings", "--hurst", "0.8", "--n", "21", "--unpinned"}).code == ok);
}

TEST_CASE("sample is byte-identical and carries rng metadata") {
    const std::vector<std::string> args = {"sample", "--beta", "1",     "--alpha", "1",    "--d",
                                           "1",      "--steps", "100", "--paths", "10", "--seed", "42"};
    const auto a = run_args(args);
    const auto b = run_args(args);
    REQUIRE(a.code == ok);
    CHECK(a.out == b.out);
    CHECK(a.out.find("# rng=mt19937_64/seed_seq/v1 seed=42") != std::string::npos);
    const auto lines = data_lines(a.out);
    CHECK(lines[0] == "path_id,t,coord,value");
    CHECK(lines.size() == 1 + 10 * 101);
    const auto c = run_args({"sample", "--beta", "1", "--alpha", "1", "--steps", "100", "--paths", "10", "--seed",
                             "43"});
    CHECK(c.out != a.out);
}

TEST_CASE("echoed command reproduces the payload") {
    const std::vector<std::vector<std::string>> cases = {
        {"sample", "--beta", "0.6", "--alpha", "1.3", "--d", "2", "--steps", "5", "--paths", "3", "--seed", "7"},
        {"energy", "--beta", "1", "0.5", "--alpha", "1.2", "--grid", "-1:1:5", "--rezero"},
        {"energy", "--beta", "0.5", "--alpha", "1", "--n", "2", "--y", "0.3", "-0.2"},
        {"mwright", "--beta", "0.3", "--tau", "1.5"},
        {"couplings", "--hurst", "0.3", "--n", "9"},
    };
    for (const auto& args : cases) {
        const auto first = run_args(args);
        REQUIRE(first.code == ok);
        auto echo = split(command_echo(first.out));
        REQUIRE(echo.front() == "ggbm");
        echo.erase(echo.begin());
        const auto second = run_args(echo);
        CHECK(second.code == ok);
        CHECK(second.out == first.out);
    }
}

TEST_CASE("validate suites") {
    auto r = run_args({"validate", "--suite", "cf", "--beta", "0.75", "--alpha", "1", "--paths", "20000"});
    CHECK(r.code == ok);
    CHECK(data_lines(r.out).size() == 10);
    CHECK(r.out.find(",fail") == std::string::npos);
    r = run_args({"validate", "--suite", "moments", "--beta", "0.5", "--paths", "20000"});
    CHECK(r.code == ok);
    CHECK(r.out.find("moment4") != std::string::npos);
    CHECK(run_args({"validate", "--suite", "other", "--beta", "0.5"}).code == usage);
}

TEST_CASE("output file") {
    const std::string path = "cli_test_output.csv";
    const auto r = run_args({"mlf", "--beta", "0.5", "--x", "1", "--out", path});
    CHECK(r.code == ok);
    CHECK(r.out.empty());
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str().find("x,value") != std::string::npos);
    std::remove(path.c_str());
    CHECK(run_args({"mlf", "--beta", "0.5", "--x", "1", "--out", "/nonexistent/dir/x.csv"}).code == usage);
}
