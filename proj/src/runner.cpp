#include "hjra/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>

#include "hjra/io.hpp"
#include "hjra/oracle.hpp"
#include "hjra/parallel.hpp"

namespace hjra {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void describe_grid(Manifest& m, const std::string& prefix, const Grid& g)
{
    m.add(prefix + "_dim", g.dim());
    for (std::size_t a = 0; a < g.dim(); ++a) {
        const std::string axis = prefix + "_axis" + std::to_string(a);
        m.add(axis + "_min", g.axis(a).min);
        m.add(axis + "_max", g.axis(a).max);
        m.add(axis + "_nodes", g.axis(a).nodes);
        m.add(axis + "_spacing", g.spacing(a));
    }
}

void export_tube(const ValueTube& tube, const std::string& dir, std::size_t record_every,
                 std::vector<std::string>& outputs)
{
    auto files = write_tube_csv(tube, dir, record_every);
    outputs.insert(outputs.end(), files.begin(), files.end());
    fs::create_directories(dir + "/contours");
    for (std::size_t k = 0; k < tube.frames(); ++k) {
        if (k % record_every != 0 && k + 1 != tube.frames()) continue;
        char name[48];
        std::snprintf(name, sizeof name, "%s/contours/t_%05zu.csv", dir.c_str(), k);
        write_contours_csv(sublevel_set(tube.fields[k]), tube.grid.dim(), name);
        outputs.emplace_back(name);
    }
}

ScalarField obstacle_from_scenario(const Scenario& s, const Grid& grid)
{
    if (!s.avoid) return ScalarField(grid, kNoObstacle);
    // A = {h > 0}: positive inside the avoid geometry.
    ScalarField h = implicit_field(grid, *s.avoid);
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = -h[i];
    return h;
}

void finish_manifest(Manifest& manifest, const std::string& out_dir, std::vector<std::string>& outputs)
{
    for (const auto& file : outputs) manifest.add("output", fs::path(file).lexically_relative(out_dir).string());
    manifest.write(out_dir + "/manifest.txt");
}

} // namespace

double analytic_1d_reference(double x, double tau, double radius)
{
    return std::max(0.0, std::abs(x) - tau) - radius;
}

RunReport run_solve(const Scenario& s, const std::string& out_dir)
{
    if (s.kind != Scenario::Kind::Solve) throw ValidationError("run_solve: scenario kind is not solve");
    const auto start = Clock::now();
    fs::create_directories(out_dir);
    set_worker_count(s.threads);

    const Grid grid(s.grid_axes);
    const DynamicsSpec dyn = build_dynamics(s.dynamics);
    const ScalarField l = implicit_field(grid, *s.target);
    const ScalarField h = obstacle_from_scenario(s, grid);

    SolveOptions opts;
    opts.cfl_number = s.cfl;
    opts.record_every = s.record_every;
    opts.mode = s.mode;
    opts.samples_per_input_axis = s.samples;

    std::vector<double> alpha;
    if (s.alpha) {
        if (s.alpha->size() != grid.dim())
            throw ValidationError("alpha: needs one entry per grid axis");
        alpha = *s.alpha;
    } else {
        alpha = per_axis_speed_bound(dyn, grid);
    }
    opts.alpha = alpha;

    ValueTube tube = solve(dyn, l, h, s.T, s.t0, opts);

    RunReport report;
    Manifest manifest;
    manifest.add("kind", std::string("solve"));
    manifest.add("mode", std::string(s.mode == SolveMode::Terminal ? "terminal" : "anytime"));
    manifest.add("t0", s.t0);
    manifest.add("T", s.T);
    manifest.add("cfl", s.cfl);
    manifest.add("samples", static_cast<std::size_t>(s.samples));
    manifest.add("record_every", s.record_every);
    manifest.add("threads", static_cast<std::size_t>(s.threads));
    describe_grid(manifest, "grid", grid);
    for (std::size_t a = 0; a < alpha.size(); ++a) manifest.add("alpha_axis" + std::to_string(a), alpha[a]);
    manifest.add("dt", cfl_dt(grid, alpha, s.cfl));
    manifest.add("frames", tube.frames());
    manifest.add("boundary_touched", std::string(tube.boundary_touched ? "true" : "false"));
    if (tube.boundary_touched) ++report.warnings;

    export_tube(tube, out_dir + "/fields", 1, report.outputs);

    if (s.reference == "analytic_1d") {
        if (grid.dim() != 1) throw ValidationError("reference analytic_1d needs a 1-dimensional grid");
        const double tau = s.T - s.t0;
        double linf = 0.0;
        const ScalarField& final_field = tube.back();
        for (std::size_t i = 0; i < grid.total_nodes(); ++i)
            linf = std::max(linf, std::abs(final_field[i] - analytic_1d_reference(grid.coord(0, i), tau,
                                                                                  s.reference_radius)));
        manifest.add("reference", s.reference);
        manifest.add("reference_linf", linf);
    }

    if (s.oracle) {
        OracleOptions oopts;
        oopts.dt = s.oracle_dt;
        oopts.control_samples = s.oracle_control_samples;
        oopts.disturbance_samples = s.oracle_disturbance_samples;
        oopts.mode = s.mode;
        const OracleResult oracle = dp_solve(dyn, l, h, s.T, s.t0, oopts);
        const TubeDiff diff = compare_tubes(tube, oracle.tube);
        manifest.add("oracle_dt", s.oracle_dt);
        manifest.add("oracle_linf", diff.linf);
        manifest.add("oracle_mask_mismatch_cells", diff.mask_mismatch_cells);
        manifest.add("oracle_clamp_warnings", oracle.clamp_warnings);
        report.warnings += oracle.clamp_warnings;
        export_tube(oracle.tube, out_dir + "/oracle", 1, report.outputs);
    }

    manifest.add("warnings", report.warnings);
    manifest.add("timing_seconds", seconds_since(start));
    finish_manifest(manifest, out_dir, report.outputs);
    return report;
}

RunReport run_algorithm1_scenario(const Scenario& s, const std::string& out_dir)
{
    if (s.kind != Scenario::Kind::Algorithm1)
        throw ValidationError("run_algorithm1_scenario: scenario kind is not algorithm1");
    const auto start = Clock::now();
    fs::create_directories(out_dir);
    set_worker_count(s.threads);

    std::vector<AircraftSetup> setups;
    std::vector<std::string> names;
    setups.reserve(s.aircraft.size());
    for (const auto& a : s.aircraft) {
        setups.push_back(build_aircraft(a, s.base_dir));
        names.push_back(a.name);
    }

    TwoStageOptions opts;
    opts.solve.cfl_number = s.cfl;
    opts.solve.record_every = 1; // conflict detection runs every solver step
    opts.solve.samples_per_input_axis = s.samples;
    opts.sep = s.sep;

    std::vector<ReachAvoidResult> results = run_algorithm1(setups, s.t0, opts);

    RunReport report;
    Manifest manifest;
    manifest.add("kind", std::string("algorithm1"));
    manifest.add("t0", s.t0);
    manifest.add("T", s.horizon_end());
    manifest.add("cfl", s.cfl);
    manifest.add("samples", static_cast<std::size_t>(s.samples));
    manifest.add("record_every", s.record_every);
    manifest.add("threads", static_cast<std::size_t>(s.threads));
    manifest.add("separation_h", s.sep.horizontal);
    manifest.add("separation_v", s.sep.vertical);
    manifest.add("aircraft_count", setups.size());

    std::vector<ConflictEvent> all_events;
    for (std::size_t j = 0; j < results.size(); ++j) {
        const std::string base = out_dir + "/" + names[j];
        export_tube(results[j].stage1, base + "/stage1", s.record_every, report.outputs);
        export_tube(results[j].stage2, base + "/stage2", s.record_every, report.outputs);
        describe_grid(manifest, "aircraft_" + names[j] + "_grid", setups[j].grid);
        manifest.add("aircraft_" + names[j] + "_tw_lo", setups[j].tw.t_lo);
        manifest.add("aircraft_" + names[j] + "_tw_hi", setups[j].tw.t_hi);
        manifest.add("aircraft_" + names[j] + "_entry", setups[j].entry_time);
        manifest.add("aircraft_" + names[j] + "_stage1_frames", results[j].stage1.frames());
        manifest.add("aircraft_" + names[j] + "_stage2_frames", results[j].stage2.frames());
        manifest.add("aircraft_" + names[j] + "_events", results[j].events.size());
        const bool touched = results[j].stage1.boundary_touched || results[j].stage2.boundary_touched;
        manifest.add("aircraft_" + names[j] + "_boundary_touched", std::string(touched ? "true" : "false"));
        if (touched) ++report.warnings;
        all_events.insert(all_events.end(), results[j].events.begin(), results[j].events.end());
    }

    std::stable_sort(all_events.begin(), all_events.end(), [](const ConflictEvent& a, const ConflictEvent& b) {
        if (a.t != b.t) return a.t > b.t;
        if (a.own != b.own) return a.own < b.own;
        return a.intruder < b.intruder;
    });
    write_conflict_report(all_events, names, out_dir + "/conflict_report.txt");
    report.outputs.push_back(out_dir + "/conflict_report.txt");
    manifest.add("conflict_events", all_events.size());

    manifest.add("warnings", report.warnings);
    manifest.add("timing_seconds", seconds_since(start));
    finish_manifest(manifest, out_dir, report.outputs);
    return report;
}

RunReport run_oracle(const Scenario& s, const std::string& out_dir)
{
    if (s.kind != Scenario::Kind::Solve) throw ValidationError("run_oracle: scenario kind is not solve");
    if (!(s.oracle_dt > 0.0)) throw ValidationError("run_oracle: scenario needs oracle_dt > 0");
    const auto start = Clock::now();
    fs::create_directories(out_dir);
    set_worker_count(s.threads);

    const Grid grid(s.grid_axes);
    const DynamicsSpec dyn = build_dynamics(s.dynamics);
    const ScalarField l = implicit_field(grid, *s.target);
    const ScalarField h = obstacle_from_scenario(s, grid);

    OracleOptions oopts;
    oopts.dt = s.oracle_dt;
    oopts.control_samples = s.oracle_control_samples;
    oopts.disturbance_samples = s.oracle_disturbance_samples;
    oopts.mode = s.mode;
    oopts.record_every = s.record_every;
    const OracleResult oracle = dp_solve(dyn, l, h, s.T, s.t0, oopts);

    RunReport report;
    Manifest manifest;
    manifest.add("kind", std::string("oracle"));
    manifest.add("mode", std::string(s.mode == SolveMode::Terminal ? "terminal" : "anytime"));
    manifest.add("t0", s.t0);
    manifest.add("T", s.T);
    manifest.add("oracle_dt", s.oracle_dt);
    manifest.add("oracle_control_samples", static_cast<std::size_t>(s.oracle_control_samples));
    manifest.add("oracle_disturbance_samples", static_cast<std::size_t>(s.oracle_disturbance_samples));
    describe_grid(manifest, "grid", grid);
    manifest.add("frames", oracle.tube.frames());
    manifest.add("clamp_warnings", oracle.clamp_warnings);
    report.warnings += oracle.clamp_warnings;

    export_tube(oracle.tube, out_dir + "/fields", 1, report.outputs);
    manifest.add("warnings", report.warnings);
    manifest.add("timing_seconds", seconds_since(start));
    finish_manifest(manifest, out_dir, report.outputs);
    return report;
}

} // namespace hjra
