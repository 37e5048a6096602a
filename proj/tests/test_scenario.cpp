#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "hjra/io.hpp"
#include "hjra/runner.hpp"
#include "hjra/scenario.hpp"

using namespace hjra;

namespace {

const std::string kScenarioDir = std::string(HJRA_SOURCE_DIR) + "/data/scenarios";

Scenario from_text(const std::string& text)
{
    return parse_scenario_text(text, kScenarioDir, "<inline>");
}

std::string slurp(const std::string& path)
{
    std::ifstream in(path);
    REQUIRE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("minimal scenario parses with defaults applied")
{
    Scenario s = parse_scenario(kScenarioDir + "/minimal_1d.scn");
    CHECK(s.kind == Scenario::Kind::Solve);
    CHECK(s.cfl == 0.5);
    CHECK(s.samples == 3);
    CHECK(s.record_every == 1);
    CHECK(s.mode == SolveMode::Terminal);
    CHECK(s.grid_axes.size() == 1);
    CHECK(s.grid_axes[0].nodes == 11);
    CHECK(s.dynamics.kind == DynKind::Integrator1D);
    CHECK(!s.avoid.has_value());
    CHECK(s.sep.horizontal == doctest::Approx(9260.0));
    CHECK(s.sep.vertical == doctest::Approx(304.8));
}

TEST_CASE("validation failures name the offending key and line")
{
    SUBCASE("t0 > T names the horizon")
    {
        const char* text = "[run]\nkind = solve\nt0 = 2\nT = 1\n";
        CHECK_THROWS_WITH_AS(from_text(text), doctest::Contains("horizon"), ValidationError);
    }
    SUBCASE("unknown key is rejected with its line number")
    {
        const std::string text = slurp(kScenarioDir + "/minimal_1d.scn") + "\n[run2]\n";
        CHECK_THROWS_WITH_AS(from_text(text), doctest::Contains("unknown section"), ValidationError);
        const char* bad_key = "[run]\nkind = solve\nt0 = 0\nT = 1\nbogus = 7\n";
        CHECK_THROWS_WITH_AS(from_text(bad_key), doctest::Contains("bogus"), ValidationError);
        CHECK_THROWS_WITH_AS(from_text(bad_key), doctest::Contains(":5:"), ValidationError);
    }
    SUBCASE("type mismatch")
    {
        const char* text = "[run]\nkind = solve\nt0 = zero\nT = 1\n";
        CHECK_THROWS_WITH_AS(from_text(text), doctest::Contains("t0"), ValidationError);
    }
    SUBCASE("missing required key")
    {
        const char* text = "[run]\nkind = solve\nt0 = 0\n";
        CHECK_THROWS_WITH_AS(from_text(text), doctest::Contains("T"), ValidationError);
    }
    SUBCASE("duplicate key")
    {
        const char* text = "[run]\nkind = solve\nkind = solve\nt0 = 0\nT = 1\n";
        CHECK_THROWS_WITH_AS(from_text(text), doctest::Contains("duplicate"), ValidationError);
    }
    SUBCASE("non-finite number")
    {
        const char* text = "[run]\nkind = solve\nt0 = inf\nT = 1\n";
        CHECK_THROWS_WITH_AS(from_text(text), doctest::Contains("finite"), ValidationError);
    }
    SUBCASE("mixing the single-system and aircraft forms is rejected")
    {
        const std::string solve_with_aircraft = slurp(kScenarioDir + "/minimal_1d.scn") +
                                                "\n[aircraft.X]\nwaypoints = 0 0 0 ; 1 0 0\nprofile = p\n"
                                                "tw_waypoint = 1\ntw_band = 0 1\ntw_time = 0 1\n"
                                                "grid_s = 0 1 3\ngrid_z = 0 1 3\n";
        CHECK_THROWS_WITH_AS(from_text(solve_with_aircraft), doctest::Contains("aircraft"), ValidationError);
    }
}

TEST_CASE("unit suffixes convert at parse time")
{
    const char* text =
        "[run]\nkind = solve\nt0 = 0\nT = 1\nseparation_h = 5nmi\nseparation_v = 2000ft\n"
        "[grid]\naxis0 = -1 1 11\n"
        "[dynamics]\ntype = integrator1d\ncontrol = -1 1\n"
        "[target]\nshape = box\nlower = -0.25\nupper = 0.25\n";
    Scenario s = from_text(text);
    CHECK(s.sep.horizontal == doctest::Approx(5.0 * 1852.0));
    CHECK(s.sep.vertical == doctest::Approx(2000.0 * 0.3048));
}

TEST_CASE("paper-style two-aircraft scenario parses into two aircraft models")
{
    Scenario s = parse_scenario(kScenarioDir + "/two_aircraft_crossing.scn");
    CHECK(s.kind == Scenario::Kind::Algorithm1);
    REQUIRE(s.aircraft.size() == 2);
    CHECK(s.aircraft[0].name == "AC1");
    CHECK(s.aircraft[1].name == "AC2");
    CHECK(s.aircraft[1].entry == 180.0);
    CHECK(s.aircraft[0].wind[0] == 12.0);
    CHECK(s.aircraft[0].wind[2] == 1.0);
    CHECK(s.horizon_end() == 710.0);

    AircraftSetup a = build_aircraft(s.aircraft[0], s.base_dir);
    AircraftSetup b = build_aircraft(s.aircraft[1], s.base_dir);
    CHECK(a.model.segments() == 1);
    CHECK(a.grid.total_nodes() == 101 * 51);
    CHECK(b.model.waypoints[0][1] == -53900.0);
    CHECK(a.tw.t_lo == 450.0);
    CHECK(b.tw.t_hi == 710.0);
}

TEST_CASE("affine dynamics from polynomials")
{
    const char* text =
        "[run]\nkind = solve\nt0 = 0\nT = 1\n"
        "[grid]\naxis0 = -1 1 11\naxis1 = -1 1 11\n"
        "[dynamics]\ntype = affine\nstate_dim = 2\ncontrol = -1 1\ndisturbance = -0.5 0.5\n"
        "a.0 = x1\na.1 = -0.5*x0^2 + 1\nB.1.0 = 1\nC.0.0 = 0.25\n"
        "[target]\nshape = box\nlower = -0.25 -0.25\nupper = 0.25 0.25\n";
    Scenario s = from_text(text);
    DynamicsSpec dyn = build_dynamics(s.dynamics);
    const double x[2] = {2.0, 3.0}, u[1] = {0.5}, v[1] = {-0.4};
    auto f = flow_eval(dyn, std::span<const double>(x, 2), std::span<const double>(u, 1),
                       std::span<const double>(v, 1));
    CHECK(f[0] == doctest::Approx(3.0 + 0.25 * -0.4));
    CHECK(f[1] == doctest::Approx(-0.5 * 4.0 + 1.0 + 0.5));
}

TEST_CASE("round-trip: parse, serialize, parse is the identity")
{
    for (const char* name : {"/minimal_1d.scn", "/analytic_1d.scn", "/game2d_oracle.scn",
                             "/two_aircraft_crossing.scn", "/two_aircraft_separated.scn"}) {
        Scenario first = parse_scenario(kScenarioDir + name);
        const std::string text = serialize_scenario(first);
        Scenario second = parse_scenario_text(text, first.base_dir, name);
        CHECK(first == second);
        CHECK(serialize_scenario(second) == text);
    }
}

TEST_CASE("cylinder geometry parses")
{
    const char* text =
        "[run]\nkind = solve\nt0 = 0\nT = 1\n"
        "[grid]\naxis0 = -1 1 11\naxis1 = -1 1 11\n"
        "[dynamics]\ntype = game2d\ncontrol = -1 1 -1 1\ndisturbance = -0.1 0.1 -0.1 0.1\n"
        "[target]\nshape = cylinder\naxis = 1\ncenter = 0 0\nradius = 0.5\nhalf_height = 0.25\n";
    Scenario s = from_text(text);
    REQUIRE(s.target.has_value());
    CHECK(s.target->kind == GeometrySpec::Kind::Cylinder);
    CHECK(s.target->axis == 1);
}

TEST_CASE("runner: solve artifacts, manifest, determinism")
{
    namespace fs = std::filesystem;
    const Scenario s = parse_scenario(kScenarioDir + "/minimal_1d.scn");
    const std::string out1 = (fs::temp_directory_path() / "hjra_run1").string();
    const std::string out2 = (fs::temp_directory_path() / "hjra_run2").string();
    fs::remove_all(out1);
    fs::remove_all(out2);

    RunReport r1 = run_solve(s, out1);
    Scenario s4 = s;
    s4.threads = 4;
    RunReport r2 = run_solve(s4, out2);

    SUBCASE("every listed output exists and is non-empty")
    {
        for (const auto& file : r1.outputs) {
            CAPTURE(file);
            CHECK(fs::exists(file));
            CHECK(fs::file_size(file) > 0);
        }
        CHECK(fs::exists(out1 + "/manifest.txt"));
    }
    SUBCASE("field CSV round-trips bit-exactly")
    {
        ValueTube tube = read_tube_csv(out1 + "/fields/index.csv");
        Grid g(s.grid_axes);
        CHECK(tube.grid == g);
        const DynamicsSpec dyn = build_dynamics(s.dynamics);
        const ScalarField l = implicit_field(g, *s.target);
        const ScalarField h(g, kNoObstacle);
        SolveOptions opts;
        opts.cfl_number = s.cfl;
        opts.record_every = s.record_every;
        ValueTube direct = solve(dyn, l, h, s.T, s.t0, opts);
        REQUIRE(tube.frames() == direct.frames());
        for (std::size_t k = 0; k < tube.frames(); ++k)
            for (std::size_t i = 0; i < g.total_nodes(); ++i) CHECK(tube.fields[k][i] == direct.fields[k][i]);
    }
    SUBCASE("outputs are byte-identical across worker counts")
    {
        for (const auto& file : r1.outputs) {
            const std::string rel = fs::path(file).lexically_relative(out1).string();
            CHECK(slurp(file) == slurp(out2 + "/" + rel));
        }
    }
}

TEST_CASE("runner: analytic reference error lands in the manifest")
{
    namespace fs = std::filesystem;
    Scenario s = parse_scenario(kScenarioDir + "/analytic_1d.scn");
    const std::string out = (fs::temp_directory_path() / "hjra_run_ref").string();
    fs::remove_all(out);
    run_solve(s, out);
    const std::string manifest = slurp(out + "/manifest.txt");
    const auto pos = manifest.find("reference_linf = ");
    REQUIRE(pos != std::string::npos);
    const double linf = std::stod(manifest.substr(pos + 17));
    CHECK(linf <= 0.02);
}
