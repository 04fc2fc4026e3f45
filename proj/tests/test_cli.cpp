#include <doctest.h>

#include "sdrelax/experiments.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

using namespace sdrelax;

namespace {

std::vector<std::string> split(const std::string &line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

std::string column_header(const std::string &csv) {
    std::istringstream in(csv);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#') return line;
    return {};
}

}  // namespace

TEST_CASE("sequence command reports the broken ramp") {
    const RunResult r = run(Json::parse(R"({"command": "sequence", "example": "broken-ramp", "n": [1, 2, 4]})"));
    REQUIRE(r.exit_code == kExitOk);
    CHECK(column_header(r.csv) == "n,l1_error,avg_gradient_gap,singular_tv,energy,clamp_energy");
    CHECK(r.csv.rfind("# ", 0) == 0);
    const auto rows = data_rows(r.csv);
    REQUIRE(rows.size() == 3);
    const auto last = split(rows[2]);
    CHECK(last[0] == "4");
    CHECK(std::stod(last[1]) == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(std::stod(last[3]) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(std::stod(last[5]) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("every command runs on a small config") {
    const char *configs[] = {
        R"({"command": "sequence", "example": "deck-of-cards", "n": [2]})",
        R"({"command": "cell", "dim": 2, "samples": 2, "seed": 1})",
        R"({"command": "cell", "cases": [{"A": [[1, 0], [0, 1]], "B": [[0, 0], [0, 0]]}],
            "densities": {"bulk": "quadratic_identity", "surface": "norm_jump"}})",
        R"({"command": "h-cell", "dim": 3, "samples": 2, "seed": 1})",
        R"({"command": "verify-expl", "dim": 3, "samples": 1, "seed": 1})",
        R"({"command": "vpm", "random": 2, "dim": 2, "jumps": 1, "seed": 3})",
        R"({"command": "design", "cases": [{"kind": "h", "a": 1, "b": 0, "c": [0, 1], "d": [0, 0], "nu": [1, 0]},
                                           {"kind": "H", "phase": 1, "A": [[1, 0], [0, 1]], "B": [[0, 0], [0, 0]]}]})",
        R"({"command": "validate-densities", "densities": ["abs_normal_jump", "phase_normal_jump"], "samples": 200})"};
    for (const char *c : configs) {
        const RunResult r = run(Json::parse(c));
        CAPTURE(c);
        CHECK(r.exit_code == kExitOk);
        CHECK(r.error.empty());
        CHECK_FALSE(data_rows(r.csv).empty());
    }
    CHECK(command_names().size() == 7);
}

TEST_CASE("thread count does not change the rows") {
    const Json cfg = Json::parse(R"({"command": "verify-expl", "dim": 2, "samples": 6, "seed": 9})");
    RunOptions one, four;
    four.jobs = 4;
    CHECK(run(cfg, one).csv == run(cfg, four).csv);
}

TEST_CASE("seed override") {
    const Json cfg = Json::parse(R"({"command": "h-cell", "dim": 2, "samples": 3, "seed": 1})");
    RunOptions opt;
    opt.seed = 1;
    CHECK(run(cfg).csv == run(cfg, opt).csv);
    opt.seed = 2;
    CHECK(data_rows(run(cfg).csv) != data_rows(run(cfg, opt).csv));
}

TEST_CASE("validate-densities reports the expected statuses") {
    const RunResult r = run(Json::parse(R"({"command": "validate-densities", "density": "abs_normal_jump"})"));
    REQUIRE(r.exit_code == kExitOk);
    std::map<std::string, std::string> status;
    for (const auto &row : data_rows(r.csv)) {
        const auto cols = split(row);
        status[cols[2]] = cols[3];
    }
    CHECK(status["H2-lower"] == "warn");
    CHECK(status["H3"] == "pass");
    CHECK(status["H4"] == "pass");
}

TEST_CASE("configuration errors") {
    for (const char *c : {R"({"command": "bogus"})", R"([1, 2])", R"({"command": "cell", "dim": 5})",
                          R"({"command": "sequence", "example": "nope"})", R"({"command": "cell", "samples": "x"})",
                          R"({"command": "design"})", R"({"command": "cell", "budget": {"restarts": 0}})",
                          R"({"command": "h-cell", "densities": {"surface": "nope"}})"}) {
        const RunResult r = run(Json::parse(c));
        CAPTURE(c);
        CHECK(r.exit_code == kExitConfig);
        CHECK(r.csv.empty());
        const Json err = Json::parse(r.error);
        CHECK(err.at("error") == "config");
        CHECK_FALSE(err.at("message").get<std::string>().empty());
    }
    CHECK(run(Json::parse(R"({"command": "h-cell", "samples": 2})")).exit_code == kExitConfig);
    RunOptions seeded;
    seeded.seed = 4;
    CHECK(run(Json::parse(R"({"command": "h-cell", "samples": 2})"), seeded).exit_code == kExitOk);
    RunOptions bad;
    bad.jobs = 0;
    CHECK(run(Json::parse(R"({"command": "vpm"})"), bad).exit_code == kExitConfig);
}

TEST_CASE("numerical failures map to their exit code") {
    const RunResult r = run(Json::parse(R"({"command": "verify-expl", "dim": 2, "samples": 1, "seed": 1, "tolerance": -1})"));
    CHECK(r.exit_code == kExitNumerical);
    CHECK(Json::parse(r.error).at("error") == "numerical");
}

TEST_CASE("output files") {
    const std::string path = "cli_test_output.csv";
    RunOptions opt;
    opt.output = path;
    const RunResult r = run(Json::parse(R"({"command": "sequence", "n": [2]})"), opt);
    REQUIRE(r.exit_code == kExitOk);
    REQUIRE(r.written);
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == r.csv);
    std::remove(path.c_str());

    opt.output = "/nonexistent-dir/out.csv";
    const RunResult fail = run(Json::parse(R"({"command": "sequence", "n": [2]})"), opt);
    CHECK(fail.exit_code == kExitIo);
    CHECK(Json::parse(fail.error).at("error") == "io");
}

TEST_CASE("data rows skip comments and the column header") {
    CHECK(data_rows("# a\n# b\nx,y\n1,2\n3,4\n") == std::vector<std::string>{"1,2", "3,4"});
    CHECK(data_rows("").empty());
}
