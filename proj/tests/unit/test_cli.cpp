#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "doctest.h"
#include "instances.hpp"
#include "relaynet/cli.hpp"
#include "relaynet/csv.hpp"
#include "relaynet/report.hpp"

using namespace relaynet;
using namespace testing_support;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() / ("relaynet_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string read(const std::string& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Run {
    int code;
    std::string out, err;
};

Run run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

// L3 line instance written as documents plus a config; returns the config path.
std::string write_l3(const TempDir& dir, const std::vector<std::vector<double>>& volumes, nlohmann::json extra = {}) {
    const auto spec = l3_spec();
    csv::write_file(dir / "network.json", to_json(spec.pnet).dump(2));
    csv::write_file(dir / "commodities.csv", write_commodities(spec.commodities, spec.pnet));
    csv::write_file(dir / "scenarios.csv", write_scenarios(scenarios(volumes)));
    nlohmann::json cfg = {
        {"network", "network.json"},
        {"commodities", "commodities.csv"},
        {"scenarios", "scenarios.csv"},
        {"grid", {{"step_hours", 6.0}, {"num_steps", 2}, {"num_cycles", 1}, {"cycle_steps", 2}}},
        {"hos", {{"driving_time", "mileage"}}},
        {"haulers", {8}},
    };
    for (const auto& [k, v] : extra.items()) cfg[k] = v;
    csv::write_file(dir / "config.json", cfg.dump(2));
    return dir / "config.json";
}

double kpi(const std::string& csv_text, const std::string& label) {
    for (const auto& row : csv::parse(csv_text).rows)
        if (!row.empty() && row[0] == label) return csv::to_double(row[1], label);
    FAIL("missing KPI " << label);
    return 0.0;
}

}  // namespace

TEST_CASE("cli: solve on the L3 documents") {
    TempDir dir;
    const auto cfg = write_l3(dir, {{5.0}});
    const auto r = run({"solve", "-c", cfg, "-o", dir / "out"});
    REQUIRE_MESSAGE(r.code == cli::kOk, r.err);
    const auto kpis = read(dir / "out/kpis.csv");
    CHECK(kpi(kpis, "Total expected transportation cost ($)") == doctest::Approx(684.0));
    CHECK(kpi(kpis, "Total contracted hours of drivers (hrs)") == 12.0);
    for (const char* f : {"design.csv", "recourse.csv", "kpis.json", "solution.csv", "manifest.json", "solver.log"})
        CHECK_MESSAGE(fs::exists(dir.path / "out" / f), f);
    const auto manifest = nlohmann::json::parse(read(dir / "out/manifest.json"));
    CHECK(manifest["version"] == cli::kVersion);
    CHECK(manifest["config_hash"].get<std::string>().size() == 16);
    CHECK(manifest["outputs"].contains("design.csv"));
}

TEST_CASE("cli: a solved design re-evaluates and its solution imports") {
    TempDir dir;
    const auto cfg = write_l3(dir, {{5.0}, {3.0}});
    REQUIRE(run({"solve", "-c", cfg, "-o", dir / "s"}).code == cli::kOk);
    const double solved = kpi(read(dir / "s/kpis.csv"), "Total expected transportation cost ($)");
    const auto e = run({"evaluate", "-c", cfg, "--design", dir / "s/design.csv", "-o", dir / "e"});
    REQUIRE_MESSAGE(e.code == cli::kOk, e.err);
    CHECK(kpi(read(dir / "e/kpis.csv"), "Total expected transportation cost ($)") == doctest::Approx(solved).epsilon(1e-9));
    const auto i = run({"import-solution", "-c", cfg, "--solution", dir / "s/solution.csv", "-o", dir / "i"});
    CHECK_MESSAGE(i.code == cli::kOk, i.err);
}

TEST_CASE("cli: an all-zero design pays the outsourcing rate") {
    TempDir dir;
    const auto cfg = write_l3(dir, {{5.0}});
    csv::write_file(dir / "design.csv", "service_id,x\n");
    const auto e = run({"evaluate", "-c", cfg, "--design", dir / "design.csv", "-o", dir / "e"});
    REQUIRE_MESSAGE(e.code == cli::kOk, e.err);
    CHECK(kpi(read(dir / "e/kpis.csv"), "Total expected transportation cost ($)") == doctest::Approx(5 * 275 * 0.93));
    CHECK(kpi(read(dir / "e/kpis.csv"), "Average outsourcing rate of commodities (fraction)") == 1.0);
}

TEST_CASE("cli: export-mps writes the model without solving") {
    TempDir dir;
    const auto cfg = write_l3(dir, {{5.0}});
    const auto r = run({"export-mps", "-c", cfg, "--mps", dir / "m.mps", "-o", dir / "out"});
    REQUIRE_MESSAGE(r.code == cli::kOk, r.err);
    const auto text = read(dir / "m.mps");
    CHECK(text.find("ROWS") != std::string::npos);
    CHECK(text.find("ENDATA") != std::string::npos);
    CHECK_FALSE(fs::exists(dir.path / "out/kpis.csv"));
    const auto s = run({"solve", "-c", cfg, "--export-mps", dir / "m2.mps", "-o", dir / "out2"});
    CHECK(s.code == cli::kOk);
    CHECK(read(dir / "m2.mps") == text);
    CHECK_FALSE(fs::exists(dir.path / "out2/kpis.csv"));
}

TEST_CASE("cli: vss with one scenario is zero") {
    TempDir dir;
    const auto cfg = write_l3(dir, {{5.0}});
    const auto r = run({"vss", "-c", cfg, "-o", dir / "v"});
    REQUIRE_MESSAGE(r.code == cli::kOk, r.err);
    const auto rep = nlohmann::json::parse(read(dir / "v/vss.json"));
    CHECK(rep["vss"].get<double>() == 0.0);
    CHECK(read(dir / "v/hours.svg").rfind("<svg", 0) == 0);
}

TEST_CASE("cli: pattern and consistency comparisons") {
    TempDir dir;
    const auto cfg = write_l3(dir, {{5.0}, {9.0}}, {{"costs", {{"consistency_discount", 1.0}}}});
    const auto p = run({"compare-patterns", "-c", cfg, "-o", dir / "p"});
    REQUIRE_MESSAGE(p.code == cli::kOk, p.err);
    const auto rows = csv::parse(read(dir / "p/comparison.csv"));
    REQUIRE(rows.rows.size() == 3);
    const int total = rows.require("total_cost", "comparison.csv");
    const double mcp = csv::to_double(rows.rows[0][total], "mcp"), scp = csv::to_double(rows.rows[1][total], "scp");
    CHECK(mcp <= scp + 1e-6);

    const auto c = run({"compare-consistency", "-c", cfg, "-o", dir / "c"});
    REQUIRE_MESSAGE(c.code == cli::kOk, c.err);
    const auto doc = nlohmann::json::parse(read(dir / "c/comparison.json"));
    std::map<std::string, double> cost;
    for (const auto& row : doc["rows"])
        cost[row["consistency"].get<std::string>() + (row["haulers"].size() == 1 ? "8" : "4,8")] = row["kpis"]["Total expected transportation cost ($)"].get<double>();
    REQUIRE(cost.size() == 4);
    for (const std::string h : {"8", "4,8"}) CHECK(cost.at("weekly" + h) <= cost.at("daily" + h) + 1e-6);
    CHECK(cost.at("weekly4,8") <= cost.at("weekly8") + 1e-6);
}

TEST_CASE("cli: validation failures exit with code 2") {
    TempDir dir;
    SUBCASE("no scenarios") {
        const auto cfg = write_l3(dir, {{5.0}});
        csv::write_file(dir / "scenarios.csv", "scenario_id,probability\n");
        const auto r = run({"solve", "-c", cfg, "-o", dir / "out"});
        CHECK(r.code == cli::kValidation);
        CHECK_FALSE(r.err.empty());
    }
    SUBCASE("unknown config key") {
        const auto cfg = write_l3(dir, {{5.0}}, {{"colour", "blue"}});
        const auto r = run({"solve", "-c", cfg});
        CHECK(r.code == cli::kValidation);
        CHECK(r.err.find("colour") != std::string::npos);
    }
    SUBCASE("design above capacity") {
        const auto cfg = write_l3(dir, {{5.0}});
        csv::write_file(dir / "design.csv", "service_id,x\n0,999\n");
        CHECK(run({"evaluate", "-c", cfg, "--design", dir / "design.csv", "-o", dir / "e"}).code == cli::kValidation);
    }
    SUBCASE("bad pattern flag") {
        const auto cfg = write_l3(dir, {{5.0}});
        CHECK(run({"solve", "-c", cfg, "--pattern", "fast", "-o", dir / "out"}).code == cli::kValidation);
    }
}

TEST_CASE("cli: usage errors and version") {
    CHECK(run({"no-such-command"}).code == cli::kError);
    CHECK(run({}).code == cli::kError);
    const auto v = run({"--version"});
    CHECK(v.code == cli::kOk);
    CHECK(v.out.find(cli::kVersion) != std::string::npos);
    CHECK(run({"--help"}).code == cli::kOk);
}

TEST_CASE("cli: synthetic testbed and generated demand") {
    TempDir dir;
    const auto r = run({"build-network", "--synthetic", "-o", dir / "net.json"});
    REQUIRE_MESSAGE(r.code == cli::kOk, r.err);
    const auto pnet = load_physical_network(nlohmann::json::parse(read(dir / "net.json")));
    CHECK(pnet.num_hubs() == 19);
    CHECK(pnet.num_arcs() == 190);
    double longest = 0.0;
    for (const auto& a : pnet.arcs()) longest = std::max(longest, a.distance_miles);
    CHECK(longest == 275.0);

    const auto g = run({"gen-scenarios", "--network", dir / "net.json", "--count", "4", "--od-limit", "3", "--entry-steps", "0",
                        "--horizon", "8", "--write-config", "-o", dir / "data"});
    REQUIRE_MESSAGE(g.code == cli::kOk, g.err);
    const auto commodities = read_commodities(read(dir / "data/commodities.csv"), pnet);
    CHECK(commodities.size() == 3);
    CHECK(read_scenarios(read(dir / "data/scenarios.csv"), 3).size() == 4);
    const auto cfg = cli::load_config(dir / "data/config.json");
    CHECK(cfg.grid.num_steps == 8);
    CHECK(cfg.grid.num_cycles * cfg.grid.cycle_steps < cfg.grid.num_steps);
    CHECK_NOTHROW(cli::make_instance_spec(cfg));

    // Same seed, same documents.
    REQUIRE(run({"gen-scenarios", "--network", dir / "net.json", "--count", "4", "--od-limit", "3", "--entry-steps", "0",
                 "--horizon", "8", "-o", dir / "again"})
                .code == cli::kOk);
    CHECK(read(dir / "again/scenarios.csv") == read(dir / "data/scenarios.csv"));
}

TEST_CASE("cli: config round trip") {
    TempDir dir;
    const auto path = write_l3(dir, {{5.0}}, {{"haulers", "4,8"}, {"solver", {{"threads", 3}, {"rel_gap", 1e-4}}}});
    const auto cfg = cli::load_config(path);
    CHECK(cfg.haulers == std::vector<int>{4, 8});
    CHECK(cfg.solve.threads == 3);
    const auto again = cli::parse_config(cli::to_json(cfg), cfg.base_dir);
    CHECK(cli::to_json(again) == cli::to_json(cfg));
}

TEST_CASE("report: csv and svg writers") {
    const auto rep = make_vss_report(556494.0, 422985.0);
    CHECK(rep.vss == 133509.0);
    const auto text = vss_csv(rep);
    CHECK(text.find("133509") != std::string::npos);
    const auto svg = svg_bar_chart("Cost", "$", {"a", "b&c"}, {{"s1", {1.0, 2.0}}, {"s2", {0.0, 3.5}}});
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("b&amp;c") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
}
