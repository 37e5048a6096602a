#include <doctest.h>

#include <cmath>

#include "hjra/reach_avoid.hpp"

using namespace hjra;

namespace {

const std::string kProfilePath = std::string(HJRA_SOURCE_DIR) + "/data/a320_speed_profile.txt";

AircraftModel straight_model(const std::string& name, double x0, double y0, double x1, double y1)
{
    return make_aircraft_model(name, {{x0, y0, 10000.0}, {x1, y1, 10000.0}}, load_speed_table(kProfilePath),
                               5.0 * M_PI / 180.0, 12.0);
}

// Brute-force reference for the conflict predicate: all node pairs, direct
// 3D distance checks.
std::vector<std::uint8_t> brute_force_conflict(const AircraftModel& own, const Grid& own_grid,
                                               const AircraftModel& intr, const Grid& intr_grid,
                                               const ScalarField& intr_field, const SeparationStandard& sep)
{
    std::vector<std::uint8_t> mask(own_grid.total_nodes(), 0);
    for (std::size_t i = 0; i < own_grid.total_nodes(); ++i) {
        const double s_own = own_grid.coord(0, own_grid.axis_index(i, 0));
        const double z_own = own_grid.coord(1, own_grid.axis_index(i, 1));
        const auto p_own = map_plan_to_3d(own, s_own, z_own);
        for (std::size_t k = 0; k < intr_grid.total_nodes() && !mask[i]; ++k) {
            if (intr_field[k] > 0.0) continue;
            const double s_i = intr_grid.coord(0, intr_grid.axis_index(k, 0));
            const double z_i = intr_grid.coord(1, intr_grid.axis_index(k, 1));
            const auto p_i = map_plan_to_3d(intr, s_i, z_i);
            const double horiz = std::hypot(p_own[0] - p_i[0], p_own[1] - p_i[1]);
            const double vert = std::abs(p_own[2] - p_i[2]);
            if (horiz <= sep.horizontal && vert <= sep.vertical) mask[i] = 1;
        }
    }
    return mask;
}

} // namespace

TEST_CASE("sublevel_set masks and contours")
{
    SUBCASE("box signed distance: mask is exactly the inside nodes")
    {
        Grid g({{-2.0, 2.0, 17}});
        auto f = implicit_field(g, GeometrySpec::box({-0.5}, {0.5}));
        auto ext = sublevel_set(f);
        for (std::size_t i = 0; i < g.total_nodes(); ++i) {
            const double x = g.coord(0, i);
            CHECK(static_cast<bool>(ext.mask[i]) == (x >= -0.5 && x <= 0.5));
        }
    }
    SUBCASE("level +inf selects every node")
    {
        Grid g({{-1.0, 1.0, 9}});
        auto f = implicit_field(g, GeometrySpec::box({-0.1}, {0.1}));
        auto ext = sublevel_set(f, std::numeric_limits<double>::infinity());
        for (auto m : ext.mask) CHECK(m == 1);
    }
    SUBCASE("1D x^2 - 1: crossings at +-1 within one spacing")
    {
        Grid g({{-2.0, 2.0, 201}});
        std::vector<double> vals(201);
        for (std::size_t i = 0; i < 201; ++i) vals[i] = g.coord(0, i) * g.coord(0, i) - 1.0;
        auto ext = sublevel_set(ScalarField(g, vals));
        REQUIRE(ext.polylines.size() == 2);
        std::vector<double> roots;
        for (const auto& line : ext.polylines) roots.push_back(line.front()[0]);
        std::sort(roots.begin(), roots.end());
        CHECK(std::abs(roots[0] + 1.0) <= g.spacing(0));
        CHECK(std::abs(roots[1] - 1.0) <= g.spacing(0));
    }
    SUBCASE("3D fields are contoured slice by slice over the first two axes")
    {
        Grid g({{-1.0, 1.0, 21}, {-1.0, 1.0, 21}, {0.0, 1.0, 3}});
        std::vector<double> vals(g.total_nodes());
        std::vector<double> x(3);
        for (std::size_t i = 0; i < g.total_nodes(); ++i) {
            g.node_point(i, x);
            // Radius shrinks with the slice coordinate; the top slice is empty.
            vals[i] = std::hypot(x[0], x[1]) - (0.45 - 0.5 * x[2]);
        }
        auto ext = sublevel_set(ScalarField(g, vals));
        REQUIRE(ext.polylines.size() == 2); // slices at x2 = 0 and 0.5; none at 1
        for (const auto& line : ext.polylines) {
            const double x2 = line.front()[2];
            const double radius = 0.45 - 0.5 * x2;
            for (const auto& pt : line) {
                CHECK(pt[2] == x2);
                CHECK(std::abs(std::hypot(pt[0], pt[1]) - radius) <= g.spacing(0));
            }
        }
    }
    SUBCASE("2D circle contour vertices sit near the true radius")
    {
        Grid g({{-2.0, 2.0, 81}, {-2.0, 2.0, 81}});
        std::vector<double> vals(g.total_nodes());
        std::vector<double> x(2);
        for (std::size_t i = 0; i < g.total_nodes(); ++i) {
            g.node_point(i, x);
            vals[i] = std::hypot(x[0], x[1]) - 1.2;
        }
        auto ext = sublevel_set(ScalarField(g, vals));
        REQUIRE(!ext.polylines.empty());
        std::size_t vertices = 0;
        for (const auto& line : ext.polylines) {
            for (const auto& pt : line) {
                CHECK(std::abs(std::hypot(pt[0], pt[1]) - 1.2) <= g.spacing(0));
                ++vertices;
            }
        }
        CHECK(vertices > 50);
        // A closed contour stitches into one polyline.
        CHECK(ext.polylines.size() == 1);
    }
}

TEST_CASE("target window geometry on the solve grid")
{
    AircraftModel m = straight_model("a", 0.0, 0.0, 20000.0, 0.0);
    Grid grid({{0.0, 22000.0, 45}, {9000.0, 11000.0, 11}});

    SUBCASE("adjacent: along-track pinned at the waypoint with a half-cell band")
    {
        TargetWindow tw{TargetWindow::Kind::Adjacent, 1, -300.0, 300.0, 60.0, 80.0};
        auto geom = tw_geometry(m, tw, grid);
        CHECK(geom.lower[0] == doctest::Approx(20000.0 - 0.5 * grid.spacing(0)));
        CHECK(geom.upper[0] == doctest::Approx(20000.0 + 0.5 * grid.spacing(0)));
        CHECK(geom.lower[1] == doctest::Approx(9700.0));
        CHECK(geom.upper[1] == doctest::Approx(10300.0));
    }
    SUBCASE("superimposed: altitude pinned with a half-cell band")
    {
        TargetWindow tw{TargetWindow::Kind::Superimposed, 1, -1500.0, 500.0, 60.0, 80.0};
        auto geom = tw_geometry(m, tw, grid);
        CHECK(geom.lower[0] == doctest::Approx(18500.0));
        CHECK(geom.upper[0] == doctest::Approx(20500.0));
        CHECK(geom.lower[1] == doctest::Approx(10000.0 - 0.5 * grid.spacing(1)));
        CHECK(geom.upper[1] == doctest::Approx(10000.0 + 0.5 * grid.spacing(1)));
    }
    SUBCASE("waypoint 0 is rejected")
    {
        TargetWindow tw{TargetWindow::Kind::Adjacent, 0, -300.0, 300.0, 60.0, 80.0};
        CHECK_THROWS_AS(tw_geometry(m, tw, grid), ValidationError);
    }
}

TEST_CASE("conflict detection matches the brute-force pairwise predicate")
{
    AircraftModel a = straight_model("a", 0.0, 0.0, 20000.0, 0.0);
    AircraftModel b = straight_model("b", 10000.0, -10000.0, 10000.0, 10000.0);
    Grid ga({{0.0, 22000.0, 23}, {9000.0, 11000.0, 11}});
    Grid gb({{0.0, 21000.0, 22}, {9000.0, 11000.0, 11}});
    SeparationStandard sep;

    // Intruder occupies a band of its plan around the crossing, low altitudes.
    std::vector<double> vals(gb.total_nodes(), 1.0);
    for (std::size_t i = 0; i < gb.total_nodes(); ++i) {
        const double s = gb.coord(0, gb.axis_index(i, 0));
        const double z = gb.coord(1, gb.axis_index(i, 1));
        if (s >= 7000.0 && s <= 13000.0 && z <= 9800.0) vals[i] = -1.0;
    }
    ScalarField fb(gb, vals);

    ConflictGeometry geom(a, ga, b, gb, sep);
    ScalarField fa(ga, -1.0);
    auto zone = geom.detect(fa, fb);
    auto brute = brute_force_conflict(a, ga, b, gb, fb, sep);
    REQUIRE(zone.mask.size() == brute.size());
    for (std::size_t i = 0; i < brute.size(); ++i) CHECK(zone.mask[i] == brute[i]);
    CHECK(zone.any);

    // The inflated bounding box contains the zone with a full-cell margin.
    for (std::size_t i = 0; i < zone.mask.size(); ++i) {
        if (!zone.mask[i]) continue;
        const double s = ga.coord(0, ga.axis_index(i, 0));
        const double z = ga.coord(1, ga.axis_index(i, 1));
        CHECK(s >= zone.bbox_lo[0] + 0.5 * ga.spacing(0));
        CHECK(s <= zone.bbox_hi[0] - 0.5 * ga.spacing(0));
        CHECK(z >= zone.bbox_lo[1] + 0.5 * ga.spacing(1));
        CHECK(z <= zone.bbox_hi[1] - 0.5 * ga.spacing(1));
    }

    SUBCASE("empty intruder occupancy yields an empty zone")
    {
        ScalarField empty(gb, 1.0);
        auto none = geom.detect(fa, empty);
        CHECK(!none.any);
        for (auto v : none.mask) CHECK(v == 0);
    }
    SUBCASE("co-located occupied nodes conflict")
    {
        // Node of a at the crossing: s = 10000, any z the intruder occupies.
        ScalarField fb_point(gb, 1.0);
        // b's s = 10000 is node 10 of axis 0; z = 9600 is node 3 of axis 1.
        fb_point[10 * gb.stride(0) + 3 * gb.stride(1)] = -0.5;
        auto z2 = geom.detect(fa, fb_point);
        CHECK(z2.any);
        const std::size_t a_node = 10 * ga.stride(0) + 3 * ga.stride(1); // same mapped point
        CHECK(z2.mask[a_node] == 1);
    }
    SUBCASE("occupied conflicts are symmetric across the pair")
    {
        ConflictGeometry geom_ba(b, gb, a, ga, sep);
        ScalarField fa_occ(ga, -1.0);
        auto zone_ab = geom.detect(fa_occ, fb);
        auto zone_ba = geom_ba.detect(fb, fa_occ);
        // a occupies everything, so C_ab nonempty iff C_ba nonempty, and
        // every occupied b node inside C_ba has its witness in C_ab.
        CHECK(zone_ab.any == zone_ba.any);
        bool occupied_b_in_cba = false;
        for (std::size_t i = 0; i < gb.total_nodes(); ++i)
            if (fb[i] <= 0.0 && zone_ba.mask[i]) occupied_b_in_cba = true;
        CHECK(occupied_b_in_cba);
    }
}

TEST_CASE("conflict_detect over tubes interpolates and validates coverage")
{
    AircraftModel a = straight_model("a", 0.0, 0.0, 20000.0, 0.0);
    AircraftModel b = straight_model("b", 10000.0, -10000.0, 10000.0, 10000.0);
    Grid ga({{0.0, 22000.0, 23}, {9000.0, 11000.0, 11}});
    Grid gb({{0.0, 21000.0, 22}, {9000.0, 11000.0, 11}});

    ValueTube ta;
    ta.grid = ga;
    ta.times = {100.0, 0.0};
    ta.fields = {ScalarField(ga, -1.0), ScalarField(ga, -1.0)};
    ValueTube tb;
    tb.grid = gb;
    tb.times = {100.0, 0.0};
    tb.fields = {ScalarField(gb, -1.0), ScalarField(gb, -1.0)};

    auto zone = conflict_detect(ta, a, tb, b, 50.0, SeparationStandard{});
    CHECK(zone.any);
    CHECK_THROWS_AS(conflict_detect(ta, a, tb, b, 150.0, SeparationStandard{}), ValidationError);
}

TEST_CASE("obstacle_field")
{
    Grid g({{0.0, 10.0, 11}, {0.0, 10.0, 11}});
    SUBCASE("empty zone: the no-obstacle sentinel everywhere")
    {
        ConflictZoneSlice zone;
        zone.mask.assign(g.total_nodes(), 0);
        auto h = obstacle_field(zone, g);
        for (std::size_t i = 0; i < h.size(); ++i) CHECK(h[i] == kNoObstacle);
    }
    SUBCASE("single node: positive exactly inside the one-cell-inflated box")
    {
        ConflictZoneSlice zone;
        zone.mask.assign(g.total_nodes(), 0);
        zone.mask[5 * g.stride(0) + 5 * g.stride(1)] = 1;
        zone.any = true;
        zone.bbox_lo = {5.0 - 1.0, 5.0 - 1.0};
        zone.bbox_hi = {5.0 + 1.0, 5.0 + 1.0};
        auto h = obstacle_field(zone, g);
        CHECK(h[5 * g.stride(0) + 5 * g.stride(1)] == doctest::Approx(1.0)); // one cell from the box face
        CHECK(h[0] < 0.0);
        std::vector<double> x(2);
        for (std::size_t i = 0; i < g.total_nodes(); ++i) {
            g.node_point(i, x);
            const bool inside = x[0] > 4.0 && x[0] < 6.0 && x[1] > 4.0 && x[1] < 6.0;
            CHECK((h[i] > 0.0) == inside);
        }
    }
    SUBCASE("two intruders: max-combined field positive on both boxes")
    {
        ConflictZoneSlice za, zb;
        za.mask.assign(g.total_nodes(), 0);
        zb.mask.assign(g.total_nodes(), 0);
        za.any = zb.any = true;
        za.bbox_lo = {1.0, 1.0};
        za.bbox_hi = {3.0, 3.0};
        zb.bbox_lo = {7.0, 7.0};
        zb.bbox_hi = {9.0, 9.0};
        auto h = field_max(obstacle_field(za, g), obstacle_field(zb, g));
        auto at = [&](double x0, double x1) { return h[(std::size_t)x0 * g.stride(0) + (std::size_t)x1]; };
        CHECK(at(2, 2) > 0.0);
        CHECK(at(8, 8) > 0.0);
        CHECK(at(5, 5) < 0.0);
    }
}

TEST_CASE("two_stage_tw without intruders")
{
    AircraftModel m = straight_model("a", 0.0, 0.0, 20000.0, 0.0);
    Grid grid({{0.0, 22000.0, 45}, {9000.0, 11000.0, 11}});
    TargetWindow tw{TargetWindow::Kind::Adjacent, 1, -300.0, 300.0, 60.0, 80.0};
    TwoStageOptions opts;

    SUBCASE("generous window: stage-1 set at t_lo strictly contains the window box")
    {
        auto res = two_stage_tw(m, grid, tw, 0.0, opts);
        const ScalarField l = implicit_field(grid, tw_geometry(m, tw, grid));
        const auto mask_l = sublevel_set(l).mask;
        const auto mask_s1 = sublevel_set(res.stage1.back()).mask;
        std::size_t extra = 0;
        for (std::size_t i = 0; i < mask_l.size(); ++i) {
            if (mask_l[i]) CHECK(mask_s1[i] == 1); // backward reachability only grows the target
            if (mask_s1[i] && !mask_l[i]) ++extra;
        }
        CHECK(extra > 0);
        CHECK(res.events.empty());
        CHECK(res.stage1.times.front() == 80.0);
        CHECK(res.stage1.times.back() == 60.0);
        CHECK(res.stage2.times.front() == 60.0);
        CHECK(res.stage2.times.back() == 0.0);
        // Handoff frame is shared between the stages.
        for (std::size_t i = 0; i < grid.total_nodes(); ++i)
            CHECK(res.stage2.front()[i] == res.stage1.back()[i]);
    }
    SUBCASE("degenerate window t_lo == t_hi: stage 1 is the masked terminal condition only")
    {
        TargetWindow degen = tw;
        degen.t_lo = degen.t_hi = 80.0;
        auto res = two_stage_tw(m, grid, degen, 0.0, opts);
        CHECK(res.stage1.frames() == 1);
        const ScalarField l = implicit_field(grid, tw_geometry(m, degen, grid));
        for (std::size_t i = 0; i < grid.total_nodes(); ++i)
            CHECK(res.stage1.front()[i] == std::max(l[i], kNoObstacle));
    }
    SUBCASE("window before scenario start is rejected")
    {
        CHECK_THROWS_AS(two_stage_tw(m, grid, tw, 70.0, opts), ValidationError);
    }
}

TEST_CASE("two_stage_tw with a blocking intruder empties stage 2")
{
    AircraftModel m = straight_model("a", 0.0, 0.0, 20000.0, 0.0);
    // Intruder plan crosses at s_a = 18000, parked there for the whole horizon.
    AircraftModel blocker = straight_model("b", 18000.0, -10000.0, 18000.0, 10000.0);
    Grid grid({{0.0, 22000.0, 45}, {9000.0, 11000.0, 11}});
    Grid gb({{0.0, 21000.0, 43}, {9000.0, 11000.0, 11}});
    TargetWindow tw{TargetWindow::Kind::Adjacent, 1, -300.0, 300.0, 60.0, 80.0};

    ValueTube tube_b;
    tube_b.grid = gb;
    tube_b.times = {80.0, 0.0};
    tube_b.fields = {ScalarField(gb, -1.0), ScalarField(gb, -1.0)};

    TwoStageOptions opts;
    opts.sep.horizontal = 500.0; // narrow protected zone keeps the window itself clear
    auto res = two_stage_tw(m, grid, tw, 0.0, opts, {{&tube_b, &blocker}});

    CHECK(!res.events.empty());
    // The corridor block wipes out every state by the scenario start.
    const auto final_mask = sublevel_set(res.stage2.back()).mask;
    for (auto v : final_mask) CHECK(v == 0);
    // The window itself stayed clear of the obstacle at the handoff.
    const auto handoff_mask = sublevel_set(res.stage2.front()).mask;
    std::size_t alive = 0;
    for (auto v : handoff_mask) alive += v;
    CHECK(alive > 0);
}

TEST_CASE("run_algorithm1")
{
    Grid ga({{0.0, 22000.0, 23}, {9000.0, 11000.0, 11}});
    Grid gb({{0.0, 21000.0, 22}, {9000.0, 11000.0, 11}});
    TargetWindow tw_a{TargetWindow::Kind::Adjacent, 1, -300.0, 300.0, 60.0, 80.0};
    TargetWindow tw_b{TargetWindow::Kind::Adjacent, 1, -300.0, 300.0, 90.0, 110.0};
    TwoStageOptions opts;

    AircraftSetup A{straight_model("a", 0.0, 0.0, 20000.0, 0.0), ga, tw_a, 0.0};
    AircraftSetup B_cross{straight_model("b", 10000.0, -10000.0, 10000.0, 10000.0), gb, tw_b, 0.0};
    AircraftSetup B_far{straight_model("b", 50000.0, -10000.0, 50000.0, 10000.0), gb, tw_b, 0.0};

    SUBCASE("single aircraft reproduces two_stage_tw exactly")
    {
        auto alg = run_algorithm1({A}, 0.0, opts);
        auto direct = two_stage_tw(A.model, A.grid, A.tw, 0.0, opts);
        REQUIRE(alg.size() == 1);
        REQUIRE(alg[0].stage1.frames() == direct.stage1.frames());
        REQUIRE(alg[0].stage2.frames() == direct.stage2.frames());
        for (std::size_t k = 0; k < direct.stage1.frames(); ++k)
            for (std::size_t i = 0; i < ga.total_nodes(); ++i)
                CHECK(alg[0].stage1.fields[k][i] == direct.stage1.fields[k][i]);
        for (std::size_t k = 0; k < direct.stage2.frames(); ++k)
            for (std::size_t i = 0; i < ga.total_nodes(); ++i)
                CHECK(alg[0].stage2.fields[k][i] == direct.stage2.fields[k][i]);
        CHECK(alg[0].events.empty());
    }

    SUBCASE("far-separated pair matches independent single-aircraft runs exactly")
    {
        auto pair = run_algorithm1({A, B_far}, 0.0, opts);
        auto solo_a = run_algorithm1({A}, 0.0, opts);
        auto solo_b = run_algorithm1({B_far}, 0.0, opts);
        CHECK(pair[0].events.empty());
        CHECK(pair[1].events.empty());
        for (std::size_t k = 0; k < pair[0].stage2.frames(); ++k)
            for (std::size_t i = 0; i < ga.total_nodes(); ++i)
                CHECK(std::abs(pair[0].stage2.fields[k][i] - solo_a[0].stage2.fields[k][i]) <= 1e-12);
        for (std::size_t k = 0; k < pair[1].stage2.frames(); ++k)
            for (std::size_t i = 0; i < gb.total_nodes(); ++i)
                CHECK(std::abs(pair[1].stage2.fields[k][i] - solo_b[0].stage2.fields[k][i]) <= 1e-12);
    }

    SUBCASE("crossing plans: conflicts fire and masking excludes them")
    {
        auto res = run_algorithm1({A, B_cross}, 0.0, opts);
        bool any_events = !res[0].events.empty() || !res[1].events.empty();
        CHECK(any_events);

        // Obstacle exclusion: strictly inside an event's box, the masked
        // field is positive at the event time.
        for (std::size_t j = 0; j < 2; ++j) {
            for (const auto& e : res[j].events) {
                const ValueTube& tube = e.t >= res[j].stage1.times.back() - 1e-9 ? res[j].stage1 : res[j].stage2;
                if (!tube.covers(e.t)) continue;
                const ScalarField f = tube.at_time(e.t);
                const Grid& g = f.grid();
                for (std::size_t i = 0; i < g.total_nodes(); ++i) {
                    const double s = g.coord(0, g.axis_index(i, 0));
                    const double z = g.coord(1, g.axis_index(i, 1));
                    const double margin_s = 0.25 * g.spacing(0);
                    const double margin_z = 0.25 * g.spacing(1);
                    if (s > e.bbox_lo[0] + margin_s && s < e.bbox_hi[0] - margin_s && z > e.bbox_lo[1] + margin_z &&
                        z < e.bbox_hi[1] - margin_z)
                        CHECK(f[i] > 0.0);
                }
            }
        }
    }

    SUBCASE("monotone harm: an added intruder never lowers values")
    {
        auto solo = run_algorithm1({A}, 0.0, opts);
        auto pair = run_algorithm1({A, B_cross}, 0.0, opts);
        REQUIRE(solo[0].stage2.frames() == pair[0].stage2.frames());
        for (std::size_t k = 0; k < solo[0].stage2.frames(); ++k)
            for (std::size_t i = 0; i < ga.total_nodes(); ++i)
                CHECK(pair[0].stage2.fields[k][i] >= solo[0].stage2.fields[k][i] - 1e-12);
    }

    SUBCASE("validation")
    {
        AircraftSetup bad_overlap = B_cross;
        bad_overlap.tw.t_lo = 70.0; // overlaps A's window
        bad_overlap.tw.t_hi = 100.0;
        CHECK_THROWS_AS(run_algorithm1({A, bad_overlap}, 0.0, opts), ValidationError);

        AircraftSetup late_entry = A;
        late_entry.entry_time = 90.0; // after its own window closes
        CHECK_THROWS_AS(run_algorithm1({late_entry}, 0.0, opts), ValidationError);

        CHECK_THROWS_AS(run_algorithm1({A}, 70.0, opts), ValidationError); // window starts before t0
        CHECK_THROWS_AS(run_algorithm1({}, 0.0, opts), ValidationError);
    }
}
