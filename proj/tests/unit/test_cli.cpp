#include "cli.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>

using namespace kr;
using namespace kr::cli;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("kickrot_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(path);
        fs::create_directories(path);
        ::setenv("KICKROT_OUTPUT_DIR", path.c_str(), 1);
    }
    ~TempDir() {
        ::unsetenv("KICKROT_OUTPUT_DIR");
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

struct Outcome {
    int code;
    std::string out, err;
};

Outcome invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string field_of(const ScenarioConfig& c) {
    try {
        validate(c);
    } catch (const ConfigError& e) {
        return e.field;
    }
    return "";
}

ScenarioConfig quantum2d_config() {
    ScenarioConfig c;
    c.command = "quantum2d";
    c.P = 20.0;
    c.s = 1.0;
    c.grid_points = 16;
    return c;
}

}  // namespace

TEST_CASE("validation names the offending field") {
    auto c = quantum2d_config();
    CHECK(field_of(c).empty());

    auto missing = c;
    missing.P.reset();
    CHECK(field_of(missing) == "P");

    auto both = c;
    both.tau = 0.05;
    CHECK(field_of(both) == "tau");

    auto grid = c;
    grid.grid_points = 1;
    CHECK(field_of(grid) == "grid");

    auto huge = c;
    huge.P = 1e9;
    CHECK(field_of(huge) == "P");

    ScenarioConfig cmp;
    cmp.command = "compare";
    cmp.P = 50.0;
    cmp.s = 1.0;
    cmp.methods = {"exact"};
    CHECK(field_of(cmp) == "method");
    cmp.methods = {"exact", "nonsense"};
    CHECK(field_of(cmp) == "method");
    cmp.methods = {"exact", "pearcey"};
    CHECK(field_of(cmp).empty());

    ScenarioConfig sc;
    sc.command = "semiclassical";
    sc.P = 50.0;
    sc.s = 1.0;
    sc.methods = {"exact"};
    CHECK(field_of(sc) == "method");

    ScenarioConfig th;
    th.command = "thermal";
    th.s = 1.0;
    CHECK(field_of(th) == "P_prime");

    ScenarioConfig bad;
    bad.command = "nope";
    CHECK(field_of(bad) == "command");
}

TEST_CASE("exit codes distinguish success, configuration and numerical failures") {
    TempDir tmp;
    auto ok_run = invoke({"quantum2d", "--P", "20", "--s", "1", "--grid", "16"});
    CHECK(ok_run.code == 0);
    CHECK(fs::exists(tmp.path / "quantum2d.csv"));
    CHECK(fs::exists(tmp.path / "quantum2d.json"));

    auto no_p = invoke({"quantum2d", "--s", "1"});
    CHECK(no_p.code == 2);
    CHECK(no_p.err.find("field 'P'") != std::string::npos);

    CHECK(invoke({"quantum2d", "--P", "20", "--s", "1", "--bogus", "3"}).code == 2);
    CHECK(invoke({"quantum2d", "--P", "abc", "--s", "1"}).code == 2);
    CHECK(invoke({}).code == 2);

    auto numeric = invoke({"semiclassical", "--method", "pearcey", "--geometry", "3d", "--P", "1e6", "--s", "1.4",
                        "--grid", "3", "--output", "fail.csv"});
    CHECK(numeric.code == 3);
    CHECK(numeric.err.find("numerical error") != std::string::npos);
    CHECK_FALSE(fs::exists(tmp.path / "fail.csv"));

    auto version = invoke({"--version"});
    CHECK(version.code == 0);
    CHECK(version.out.find(tool_version) != std::string::npos);
}

TEST_CASE("CSV layout and byte-identical reruns") {
    TempDir tmp;
    REQUIRE(invoke({"quantum3d", "--P", "30", "--s", "1", "--grid", "11", "--output", "a.csv"}).code == 0);
    REQUIRE(invoke({"quantum3d", "--P", "30", "--s", "1", "--grid", "11", "--output", "b.csv"}).code == 0);
    const std::string a = slurp(tmp.path / "a.csv");
    CHECK(a == slurp(tmp.path / "b.csv"));
    CHECK(a.find('\r') == std::string::npos);

    std::istringstream lines(a);
    std::string header, row;
    std::getline(lines, header);
    CHECK(header == "theta,density,weighted");
    int rows = 0;
    while (std::getline(lines, row)) {
        ++rows;
        CHECK(std::count(row.begin(), row.end(), ',') == 2);
    }
    CHECK(rows == 11);

    auto side = nlohmann::json::parse(slurp(tmp.path / "a.json"));
    CHECK(side["rows"] == 11);
    CHECK(side["version"] == tool_version);
    CHECK(side["summary"]["norm"].get<double>() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(side["summary"]["peak_theta"].get<double>() == 0.0);
}

TEST_CASE("sidecar metadata reproduces the run") {
    TempDir tmp;
    REQUIRE(invoke({"thermal", "--P-prime", "10", "--s", "1", "--particles", "20000", "--seed", "11", "--grid", "36",
                 "--output", "t.csv"})
                .code == 0);
    auto side = nlohmann::json::parse(slurp(tmp.path / "t.json"));
    ScenarioConfig again = config_from_json(side);
    CHECK(again.seed == 11);
    CHECK(again.particles == 20000);
    CHECK(*again.P_prime == 10.0);
    again.output_path = "t2.csv";
    std::ostringstream out, err;
    REQUIRE(run_and_write(again, out, err) == 0);
    CHECK(slurp(tmp.path / "t.csv") == slurp(tmp.path / "t2.csv"));

    REQUIRE(invoke({"thermal", "--P-prime", "inf", "--s", "1", "--particles", "1000", "--output", "cold.csv"}).code == 0);
    auto cold = config_from_json(nlohmann::json::parse(slurp(tmp.path / "cold.json")));
    CHECK(std::isinf(*cold.P_prime));

    auto roundtrip = config_from_json(nlohmann::json::parse(config_to_json(quantum2d_config()).dump()));
    CHECK(config_to_json(roundtrip) == config_to_json(quantum2d_config()));
}

TEST_CASE("summaries carry the headline numbers") {
    TempDir tmp;
    ScenarioConfig c;
    c.command = "classical";
    c.s = 4.0;
    c.grid_points = 50;
    auto r = run(c);
    CHECK(r.summary["rainbow_angle"].get<double>() == doctest::Approx(2.5548672745546).epsilon(1e-10));

    ScenarioConfig sq;
    sq.command = "squeeze";
    sq.methods = {"exact"};
    sq.kicks = 1000;
    auto s = run(sq);
    CHECK(s.summary["slope"].get<double>() == doctest::Approx(-0.5).epsilon(0.1));
    CHECK(s.data.size() == s.columns.size());
    for (const auto& col : s.data) CHECK(col.size() == 1000);

    ScenarioConfig cmp;
    cmp.command = "compare";
    cmp.P = 50.0;
    cmp.s = 1.0;
    cmp.methods = {"exact", "pearcey"};
    cmp.grid_points = 31;
    cmp.theta_max = 0.3;
    auto g = run(cmp);
    CHECK(g.columns == std::vector<std::string>{"theta", "exact", "pearcey"});
    CHECK(g.summary.contains("max_rel_gap"));
    CHECK(g.summary["max_gap_over_peak"].get<double>() < 0.1);
}

TEST_CASE("batch: empty file, one failure and duplicate outputs") {
    TempDir tmp;
    const fs::path empty = tmp.path / "empty.jsonl";
    std::ofstream(empty) << "\n\n";
    std::ostringstream out, err;
    CHECK(run_batch(empty.string(), (tmp.path / "empty.index.json").string(), out, err) == 0);
    auto idx = nlohmann::json::parse(slurp(tmp.path / "empty.index.json"));
    CHECK(idx["scenarios"].empty());

    const fs::path mixed = tmp.path / "mixed.jsonl";
    std::ofstream(mixed) << R"({"command":"quantum2d","P":20,"s":1,"grid":8,"output":"one.csv"})" << '\n'
                         << R"({"command":"quantum2d","s":1,"output":"two.csv"})" << '\n'
                         << '\n'
                         << R"({"command":"classical","s":2,"grid":8,"output":"three.csv"})" << '\n';
    CHECK(invoke({"batch", mixed.string()}).code == 2);
    CHECK(fs::exists(tmp.path / "one.csv"));
    CHECK_FALSE(fs::exists(tmp.path / "two.csv"));
    CHECK(fs::exists(tmp.path / "three.csv"));
    auto mi = nlohmann::json::parse(slurp(tmp.path / "mixed.index.json"));
    REQUIRE(mi["scenarios"].size() == 3);
    CHECK(mi["scenarios"][0]["status"] == "ok");
    CHECK(mi["scenarios"][1]["status"] == "failed");
    CHECK(mi["scenarios"][1]["exit_code"] == 2);
    CHECK(mi["scenarios"][2]["line"] == 4);
    CHECK(mi["scenarios"][2]["status"] == "ok");

    const fs::path dup = tmp.path / "dup.jsonl";
    std::ofstream(dup) << R"({"command":"classical","s":2,"grid":8,"output":"same.csv"})" << '\n'
                       << R"({"command":"classical","s":3,"grid":8,"output":"./same.csv"})" << '\n';
    auto d = invoke({"batch", dup.string()});
    CHECK(d.code == 2);
    CHECK(d.err.find("output") != std::string::npos);
    CHECK_FALSE(fs::exists(tmp.path / "same.csv"));

    CHECK(invoke({"batch", (tmp.path / "missing.jsonl").string()}).code == 2);
}

TEST_CASE("shipped cookbook parses and validates") {
    std::ifstream f(std::string(KICKROT_SOURCE_DIR) + "/tools/cookbook.jsonl");
    REQUIRE(f);
    std::string line;
    int n = 0;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        ScenarioConfig c = config_from_json(nlohmann::json::parse(line));
        CHECK_NOTHROW(validate(c));
        ++n;
    }
    CHECK(n >= 20);
}
