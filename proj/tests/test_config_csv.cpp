#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "spse/config.hpp"
#include "spse/constants.hpp"
#include "spse/csv.hpp"
#include "spse/lab.hpp"

using namespace spse;

namespace {
std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}
}  // namespace

TEST_CASE("config parse, canonical round trip, comments") {
    const std::string text =
        "# experiment\n"
        "grid.L = 12\n"
        "grid.n = 65   # nodes\n"
        "potential.kind = quadratic_well\n"
        "potential.V0 = 1.0\n"
        "experiment.eps = 0.2\n";
    LabConfig cfg = LabConfig::parse(text);
    CHECK(cfg.get_double("grid.L") == 12.0);
    CHECK(cfg.get_int("grid.n") == 65);
    CHECK(cfg.get_string("potential.kind") == "quadratic_well");

    LabConfig again = LabConfig::parse(cfg.canonical_text());
    CHECK(again == cfg);
    CHECK(again.hash() == cfg.hash());

    const std::string path = "/tmp/spse_cfg_roundtrip.cfg";
    cfg.save(path);
    CHECK(LabConfig::load(path) == cfg);
}

TEST_CASE("config errors name the offending key") {
    LabConfig cfg;
    CHECK_THROWS_WITH_AS(cfg.get_double("solver.tol"), doctest::Contains("solver.tol"),
                         ConfigError);
    cfg.set("solver.tol", -1.0);
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("solver.tol"), ConfigError);

    LabConfig bad = LabConfig::parse("experiment.eps = 0\n");
    CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("experiment.eps"), ConfigError);

    CHECK_THROWS_AS(LabConfig::parse("just a line without equals\n"), ConfigError);
    LabConfig badnum = LabConfig::parse("grid.L = twelve\n");
    CHECK_THROWS_AS(badnum.get_double("grid.L"), ConfigError);
}

TEST_CASE("theorem case consistency is checked at load time") {
    // case i requires a < V0^{-3/2} a_*
    LabConfig cfg = LabConfig::parse(
        "experiment.case = i\n"
        "experiment.a = 100.0\n"
        "potential.V0 = 1.0\n");
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("case"), ConfigError);
    cfg.set("experiment.a", 0.5 * constants::kMassCriticalL2);
    CHECK_NOTHROW(cfg.validate());
    cfg.set("experiment.case", "ii");
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("hash distinguishes configs") {
    LabConfig a = LabConfig::parse("x = 1\n");
    LabConfig b = LabConfig::parse("x = 2\n");
    CHECK(a.hash() != b.hash());
}

TEST_CASE("emit_csv is byte-stable") {
    CsvTable t;
    t.comments = {"demo"};
    t.header = {"a", "b"};
    t.rows = {{1.0, 0.1}, {2.0, 1.0 / 3.0}};
    t.row_suffix = "cafe";
    emit_csv(t, "/tmp/spse_csv1.csv");
    emit_csv(t, "/tmp/spse_csv2.csv");
    CHECK(slurp("/tmp/spse_csv1.csv") == slurp("/tmp/spse_csv2.csv"));
    CHECK(slurp("/tmp/spse_csv1.csv").find("# demo") == 0);
    CHECK(slurp("/tmp/spse_csv1.csv").find("cafe") != std::string::npos);
}

TEST_CASE("field serialization round trip") {
    RadialGrid rg(10.0, 101);
    RadialField rf(rg);
    for (std::size_t i = 0; i < rf.values.size(); ++i)
        rf.values[i] = std::sin(double(i) * 0.37) / 3.0;
    save_field(rf, "/tmp/spse_radial.csv", {{"p", 3.5}});
    LoadedField lr = load_field("/tmp/spse_radial.csv");
    CHECK(lr.is_radial);
    CHECK(lr.meta.at("p") == 3.5);
    REQUIRE(lr.radial.values.size() == rf.values.size());
    for (std::size_t i = 0; i < rf.values.size(); ++i)
        CHECK(lr.radial.values[i] == rf.values[i]);  // %.17g round trips exactly

    Grid3D g(5.0, 33);
    ScalarField3D bf(g);
    for (std::size_t i = 0; i < bf.values.size(); ++i) bf.values[i] = std::cos(double(i));
    save_field(bf, "/tmp/spse_box.csv", {{"lambda", 25.0}});
    LoadedField lb = load_field("/tmp/spse_box.csv");
    CHECK_FALSE(lb.is_radial);
    CHECK(lb.meta.at("lambda") == 25.0);
    for (std::size_t i = 0; i < bf.values.size(); ++i)
        CHECK(lb.box.values[i] == bf.values[i]);

    CHECK_THROWS_AS(load_field("/tmp/definitely_missing_422.csv"), InvalidInput);
}

TEST_CASE("unknown scenario is rejected") {
    LabConfig cfg;
    CHECK_THROWS_WITH_AS(run_scenario("warp-drive", cfg), doctest::Contains("unknown scenario"),
                         ConfigError);
    const auto names = scenario_names();
    CHECK(names.size() == 7);
}

TEST_CASE("asymptotics-sweep scenario: deterministic CSV emission") {
    LabConfig cfg = LabConfig::parse("experiment.eps_list = 0.3, 0.2, 0.15\nseed = 7\n");
    ScenarioResult r1 = run_scenario("asymptotics-sweep", cfg);
    CHECK(r1.pass());
    write_scenario_csv(r1, cfg, "/tmp/spse_sweep1.csv");
    ScenarioResult r2 = run_scenario("asymptotics-sweep", cfg);
    write_scenario_csv(r2, cfg, "/tmp/spse_sweep2.csv");
    CHECK(slurp("/tmp/spse_sweep1.csv") == slurp("/tmp/spse_sweep2.csv"));
    CHECK(slurp("/tmp/spse_sweep1.csv").find(cfg.hash()) != std::string::npos);
}
