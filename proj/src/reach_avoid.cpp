#include "hjra/reach_avoid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <string>

namespace hjra {

namespace {

// Crossing point between two nodes straddling the level, by linear
// interpolation.
double crossing(double c0, double c1, double v0, double v1, double level)
{
    const double t = (level - v0) / (v1 - v0);
    return c0 + t * (c1 - c0);
}

void contours_1d(const ScalarField& f, double level, LevelSetExtract& out)
{
    const Grid& g = f.grid();
    for (std::size_t k = 0; k + 1 < g.nodes(0); ++k) {
        const bool in0 = f[k] <= level;
        const bool in1 = f[k + 1] <= level;
        if (in0 == in1) continue;
        out.polylines.push_back({{crossing(g.coord(0, k), g.coord(0, k + 1), f[k], f[k + 1], level)}});
    }
}

struct SegmentSink {
    std::vector<std::array<double, 4>> segments; // x0 y0 x1 y1 in slice coords
    void add(double x0, double y0, double x1, double y1) { segments.push_back({x0, y0, x1, y1}); }
};

// Marching squares over one 2D slice. Corner c0=(0,0), c1=(1,0), c2=(1,1),
// c3=(0,1) in local (axis0, axis1) offsets; inside means value <= level.
void march_cell(double x0, double x1, double y0, double y1, double v0, double v1, double v2, double v3, double level,
                SegmentSink& sink)
{
    const unsigned mask = (v0 <= level ? 1u : 0u) | (v1 <= level ? 2u : 0u) | (v2 <= level ? 4u : 0u) |
                          (v3 <= level ? 8u : 0u);
    if (mask == 0u || mask == 15u) return;

    // Edge crossing points: E0 c0-c1, E1 c1-c2, E2 c3-c2, E3 c0-c3.
    double ex[4] = {0, 0, 0, 0}, ey[4] = {0, 0, 0, 0};
    auto edge = [&](int e) {
        switch (e) {
        case 0: ex[0] = crossing(x0, x1, v0, v1, level); ey[0] = y0; break;
        case 1: ex[1] = x1; ey[1] = crossing(y0, y1, v1, v2, level); break;
        case 2: ex[2] = crossing(x0, x1, v3, v2, level); ey[2] = y1; break;
        case 3: ex[3] = x0; ey[3] = crossing(y0, y1, v0, v3, level); break;
        }
    };
    auto emit = [&](int a, int b) {
        edge(a);
        edge(b);
        sink.add(ex[a], ey[a], ex[b], ey[b]);
    };

    switch (mask) {
    case 1: emit(3, 0); break;
    case 2: emit(0, 1); break;
    case 3: emit(3, 1); break;
    case 4: emit(1, 2); break;
    case 6: emit(0, 2); break;
    case 7: emit(3, 2); break;
    case 8: emit(2, 3); break;
    case 9: emit(0, 2); break;
    case 11: emit(1, 2); break;
    case 12: emit(1, 3); break;
    case 13: emit(0, 1); break;
    case 14: emit(0, 3); break;
    case 5: // c0 and c2 inside: disambiguate with the cell average
        if (0.25 * (v0 + v1 + v2 + v3) <= level) {
            emit(0, 1);
            emit(2, 3);
        } else {
            emit(0, 3);
            emit(1, 2);
        }
        break;
    case 10: // c1 and c3 inside
        if (0.25 * (v0 + v1 + v2 + v3) <= level) {
            emit(3, 0);
            emit(1, 2);
        } else {
            emit(0, 1);
            emit(2, 3);
        }
        break;
    default: break;
    }
}

// Chains 2-point segments into polylines by matching quantized endpoints.
std::vector<std::vector<std::array<double, 2>>> stitch(const SegmentSink& sink, double quantum)
{
    using Key = std::pair<long long, long long>;
    auto key = [quantum](double x, double y) {
        return Key{static_cast<long long>(std::llround(x / quantum)), static_cast<long long>(std::llround(y / quantum))};
    };
    std::map<Key, std::vector<std::size_t>> ends; // endpoint -> segment indices
    for (std::size_t s = 0; s < sink.segments.size(); ++s) {
        const auto& sg = sink.segments[s];
        ends[key(sg[0], sg[1])].push_back(s);
        ends[key(sg[2], sg[3])].push_back(s);
    }
    std::vector<bool> used(sink.segments.size(), false);
    std::vector<std::vector<std::array<double, 2>>> lines;

    auto other_end = [&](std::size_t s, const Key& from) {
        const auto& sg = sink.segments[s];
        if (key(sg[0], sg[1]) == from) return std::array<double, 2>{sg[2], sg[3]};
        return std::array<double, 2>{sg[0], sg[1]};
    };

    for (std::size_t s0 = 0; s0 < sink.segments.size(); ++s0) {
        if (used[s0]) continue;
        used[s0] = true;
        const auto& sg = sink.segments[s0];
        std::vector<std::array<double, 2>> line{{sg[0], sg[1]}, {sg[2], sg[3]}};
        // Extend forward, then backward.
        for (int dir = 0; dir < 2; ++dir) {
            for (;;) {
                const auto& tip = dir == 0 ? line.back() : line.front();
                const Key tip_key = key(tip[0], tip[1]);
                auto it = ends.find(tip_key);
                std::size_t next = sink.segments.size();
                if (it != ends.end()) {
                    for (std::size_t cand : it->second) {
                        if (!used[cand]) {
                            next = cand;
                            break;
                        }
                    }
                }
                if (next == sink.segments.size()) break;
                used[next] = true;
                const auto pt = other_end(next, tip_key);
                if (dir == 0) line.push_back(pt);
                else line.insert(line.begin(), pt);
            }
        }
        lines.push_back(std::move(line));
    }
    return lines;
}

} // namespace

LevelSetExtract sublevel_set(const ScalarField& field, double level)
{
    const Grid& g = field.grid();
    LevelSetExtract out;
    out.mask.resize(g.total_nodes());
    for (std::size_t i = 0; i < g.total_nodes(); ++i) out.mask[i] = field[i] <= level ? 1 : 0;

    if (g.dim() == 1) {
        contours_1d(field, level, out);
        return out;
    }

    // March each (axis0, axis1) slice; remaining axes are fixed per slice.
    const std::size_t n0 = g.nodes(0), n1 = g.nodes(1);
    std::size_t slice_count = 1;
    for (std::size_t a = 2; a < g.dim(); ++a) slice_count *= g.nodes(a);

    for (std::size_t slice = 0; slice < slice_count; ++slice) {
        std::size_t rest = slice;
        std::size_t offset = 0;
        std::vector<double> fixed(g.dim() > 2 ? g.dim() - 2 : 0);
        for (std::size_t a = g.dim(); a-- > 2;) {
            const std::size_t k = rest % g.nodes(a);
            rest /= g.nodes(a);
            offset += k * g.stride(a);
            fixed[a - 2] = g.coord(a, k);
        }
        SegmentSink sink;
        for (std::size_t k = 0; k + 1 < n0; ++k) {
            for (std::size_t m = 0; m + 1 < n1; ++m) {
                const std::size_t base = offset + k * g.stride(0) + m * g.stride(1);
                march_cell(g.coord(0, k), g.coord(0, k + 1), g.coord(1, m), g.coord(1, m + 1), field[base],
                           field[base + g.stride(0)], field[base + g.stride(0) + g.stride(1)],
                           field[base + g.stride(1)], level, sink);
            }
        }
        const double quantum = 1e-7 * std::min(g.spacing(0), g.spacing(1));
        for (auto& line : stitch(sink, quantum)) {
            std::vector<std::vector<double>> poly;
            poly.reserve(line.size());
            for (const auto& pt : line) {
                std::vector<double> coords(g.dim());
                coords[0] = pt[0];
                coords[1] = pt[1];
                for (std::size_t a = 2; a < g.dim(); ++a) coords[a] = fixed[a - 2];
                poly.push_back(std::move(coords));
            }
            out.polylines.push_back(std::move(poly));
        }
    }
    return out;
}

GeometrySpec tw_geometry(const AircraftModel& model, const TargetWindow& tw, const Grid& grid)
{
    if (grid.dim() != 2) throw ValidationError("target window: solve grid must be 2-dimensional (s, z)");
    if (tw.center_waypoint == 0 || tw.center_waypoint >= model.waypoints.size())
        throw ValidationError("target window: center waypoint must name a reached waypoint (1..last)");
    if (!(tw.band_lo <= tw.band_hi)) throw ValidationError("target window: band bounds out of order");
    if (!(tw.t_lo <= tw.t_hi)) throw ValidationError("target window: time bounds out of order");

    const double s_wp = model.cum_length[tw.center_waypoint];
    const double z_wp = model.waypoints[tw.center_waypoint][2];
    const double half_s = 0.5 * grid.spacing(0);
    const double half_z = 0.5 * grid.spacing(1);

    if (tw.kind == TargetWindow::Kind::Adjacent) {
        // Along-track coordinate pinned at the waypoint, altitude band given.
        return GeometrySpec::box({s_wp - half_s, z_wp + tw.band_lo}, {s_wp + half_s, z_wp + tw.band_hi});
    }
    // Superimposed: altitude pinned, along-track band given.
    return GeometrySpec::box({s_wp + tw.band_lo, z_wp - half_z}, {s_wp + tw.band_hi, z_wp + half_z});
}

ConflictGeometry::ConflictGeometry(const AircraftModel& own, const Grid& own_grid, const AircraftModel& intruder,
                                   const Grid& intruder_grid, const SeparationStandard& sep)
    : own_grid_(own_grid), intruder_grid_(intruder_grid)
{
    if (own_grid.dim() != 2 || intruder_grid.dim() != 2)
        throw ValidationError("conflict geometry: aircraft grids must be 2-dimensional (s, z)");
    const std::size_t ns_own = own_grid.nodes(0);
    const std::size_t ns_intr = intruder_grid.nodes(0);
    const std::size_t nz_own = own_grid.nodes(1);
    const std::size_t nz_intr = intruder_grid.nodes(1);
    zwords_ = (nz_intr + 63) / 64;

    // Horizontal proximity depends only on the along-track nodes.
    std::vector<std::array<double, 2>> own_xy(ns_own), intr_xy(ns_intr);
    for (std::size_t k = 0; k < ns_own; ++k) {
        const auto p = map_plan_to_3d(own, own_grid.coord(0, k), 0.0);
        own_xy[k] = {p[0], p[1]};
    }
    for (std::size_t m = 0; m < ns_intr; ++m) {
        const auto p = map_plan_to_3d(intruder, intruder_grid.coord(0, m), 0.0);
        intr_xy[m] = {p[0], p[1]};
    }
    near_.resize(ns_own);
    const double h2 = sep.horizontal * sep.horizontal;
    for (std::size_t k = 0; k < ns_own; ++k) {
        for (std::size_t m = 0; m < ns_intr; ++m) {
            const double dx = own_xy[k][0] - intr_xy[m][0];
            const double dy = own_xy[k][1] - intr_xy[m][1];
            if (dx * dx + dy * dy <= h2) near_[k].push_back(static_cast<std::uint32_t>(m));
        }
    }

    // Vertical proximity: contiguous window of intruder altitude levels.
    zwin_.assign(nz_own, std::vector<std::uint64_t>(zwords_, 0));
    for (std::size_t zo = 0; zo < nz_own; ++zo) {
        const double z = own_grid.coord(1, zo);
        for (std::size_t zi = 0; zi < nz_intr; ++zi) {
            if (std::abs(z - intruder_grid.coord(1, zi)) <= sep.vertical)
                zwin_[zo][zi / 64] |= std::uint64_t{1} << (zi % 64);
        }
    }
}

ConflictZoneSlice ConflictGeometry::detect(const ScalarField& own_field, const ScalarField& intruder_field) const
{
    if (!(own_field.grid() == own_grid_) || !(intruder_field.grid() == intruder_grid_))
        throw ValidationError("conflict detect: field grids do not match the pair geometry");

    const std::size_t ns_intr = intruder_grid_.nodes(0);
    const std::size_t nz_intr = intruder_grid_.nodes(1);
    std::vector<std::uint64_t> occupied(ns_intr * zwords_, 0);
    for (std::size_t m = 0; m < ns_intr; ++m) {
        const std::size_t base = m * intruder_grid_.stride(0);
        for (std::size_t zi = 0; zi < nz_intr; ++zi) {
            if (intruder_field[base + zi * intruder_grid_.stride(1)] <= 0.0)
                occupied[m * zwords_ + zi / 64] |= std::uint64_t{1} << (zi % 64);
        }
    }

    ConflictZoneSlice zone;
    zone.mask.assign(own_grid_.total_nodes(), 0);
    std::size_t klo = 0, khi = 0, zlo = 0, zhi = 0;
    const std::size_t ns_own = own_grid_.nodes(0);
    const std::size_t nz_own = own_grid_.nodes(1);
    for (std::size_t k = 0; k < ns_own; ++k) {
        if (near_[k].empty()) continue;
        for (std::size_t zo = 0; zo < nz_own; ++zo) {
            const auto& zw = zwin_[zo];
            bool hit = false;
            for (std::uint32_t m : near_[k]) {
                const std::uint64_t* occ = occupied.data() + std::size_t{m} * zwords_;
                for (std::size_t w = 0; w < zwords_; ++w) {
                    if (occ[w] & zw[w]) {
                        hit = true;
                        break;
                    }
                }
                if (hit) break;
            }
            if (!hit) continue;
            zone.mask[k * own_grid_.stride(0) + zo * own_grid_.stride(1)] = 1;
            if (!zone.any) {
                klo = khi = k;
                zlo = zhi = zo;
                zone.any = true;
            } else {
                klo = std::min(klo, k);
                khi = std::max(khi, k);
                zlo = std::min(zlo, zo);
                zhi = std::max(zhi, zo);
            }
        }
    }
    if (zone.any) {
        // Bounding box of the zone nodes, inflated by one grid cell.
        zone.bbox_lo = {own_grid_.coord(0, klo) - own_grid_.spacing(0), own_grid_.coord(1, zlo) - own_grid_.spacing(1)};
        zone.bbox_hi = {own_grid_.coord(0, khi) + own_grid_.spacing(0), own_grid_.coord(1, zhi) + own_grid_.spacing(1)};
    }
    return zone;
}

ConflictZoneSlice conflict_detect(const ValueTube& own_tube, const AircraftModel& own, const ValueTube& intruder_tube,
                                  const AircraftModel& intruder, double t, const SeparationStandard& sep)
{
    if (!own_tube.covers(t) || !intruder_tube.covers(t))
        throw ValidationError("conflict_detect: no recorded field covering t = " + std::to_string(t));
    ConflictGeometry geom(own, own_tube.grid, intruder, intruder_tube.grid, sep);
    const ScalarField own_field = own_tube.interpolated(t);
    const ScalarField intr_field = intruder_tube.interpolated(t);
    return geom.detect(own_field, intr_field);
}

ScalarField obstacle_field(const ConflictZoneSlice& zone, const Grid& grid)
{
    if (!zone.any) return ScalarField(grid, kNoObstacle);
    const GeometrySpec box = GeometrySpec::box({zone.bbox_lo[0], zone.bbox_lo[1]}, {zone.bbox_hi[0], zone.bbox_hi[1]});
    ScalarField h(grid, 0.0);
    std::vector<double> x(grid.dim());
    for (std::size_t i = 0; i < grid.total_nodes(); ++i) {
        grid.node_point(i, x);
        h[i] = -signed_value(box, x);
    }
    return h;
}

namespace {

double time_eps(double t_hi) { return 1e-9 * std::max(1.0, std::abs(t_hi)); }

// Descending step times from `from` to `to`, excluding `from`; the last step
// is shortened to land exactly on `to`.
void extend_schedule(std::vector<double>& schedule, double from, double to, double dt_base, double eps)
{
    double t = from;
    while (t > to + eps) {
        const double dt = std::min(dt_base, t - to);
        t = (t - dt <= to + eps) ? to : t - dt;
        schedule.push_back(t);
    }
}

} // namespace

ReachAvoidResult two_stage_tw(const AircraftModel& model, const Grid& grid, const TargetWindow& tw, double t0,
                              const TwoStageOptions& opts, const std::vector<IntruderTube>& intruders)
{
    if (!(tw.t_lo >= t0)) throw ValidationError("two_stage_tw: window start lies before the scenario start");
    if (!(tw.t_lo <= tw.t_hi)) throw ValidationError("two_stage_tw: window bounds out of order");

    const DynamicsSpec dyn = make_aircraft_dynamics(model);
    const std::vector<double> alpha = opts.solve.alpha ? *opts.solve.alpha : per_axis_speed_bound(dyn, grid);
    const HamiltonianSpec frozen(dyn, opts.solve.samples_per_input_axis, HamMode::Frozen);
    const HamiltonianSpec standard(dyn, opts.solve.samples_per_input_axis, HamMode::Standard);
    const ScalarField l = implicit_field(grid, tw_geometry(model, tw, grid));
    const ScalarField h_base(grid, kNoObstacle);

    std::vector<std::unique_ptr<ConflictGeometry>> pair_geom;
    for (const auto& intr : intruders)
        pair_geom.push_back(std::make_unique<ConflictGeometry>(model, grid, *intr.model, intr.tube->grid, opts.sep));

    ReachAvoidResult result;
    auto mask_conflicts = [&](double t, ScalarField& field, ScalarField* h_out) {
        for (std::size_t i = 0; i < intruders.size(); ++i) {
            if (!intruders[i].tube->covers(t))
                throw ValidationError("two_stage_tw: intruder tube does not cover t = " + std::to_string(t));
            const ScalarField intr_field = intruders[i].tube->interpolated(t);
            const ConflictZoneSlice zone = pair_geom[i]->detect(field, intr_field);
            if (!zone.any) continue;
            const ScalarField h_ji = obstacle_field(zone, grid);
            field = field_max(field, h_ji);
            if (h_out) *h_out = field_max(*h_out, h_ji);
            result.events.push_back({t, 0, i + 1, zone.bbox_lo, zone.bbox_hi});
        }
    };

    const double eps = time_eps(tw.t_hi);
    double dt_base = cfl_dt(grid, alpha, opts.solve.cfl_number);
    if (!std::isfinite(dt_base)) dt_base = std::max(tw.t_hi - t0, 1.0);

    // Steps along the same precomputed schedule the multi-aircraft sweep
    // uses, so a single-aircraft sweep reproduces this path bit for bit.
    auto drive = [&](ValueTube& tube, const HamiltonianSpec& spec, ScalarField& field, double from, double to,
                     ScalarField* h_final) {
        std::vector<double> schedule{from};
        extend_schedule(schedule, from, to, dt_base, eps);
        for (std::size_t step = 1; step < schedule.size(); ++step) {
            const double t = schedule[step];
            const double dt = schedule[step - 1] - t;
            field = step_backward(field, h_base, spec, dt, alpha);
            mask_conflicts(t, field, (t == to) ? h_final : nullptr);
            field.validate_finite("two_stage_tw");
            if (!tube.boundary_touched && zero_level_on_boundary(field)) tube.boundary_touched = true;
            if (step % opts.solve.record_every == 0 || t == to) {
                tube.times.push_back(t);
                tube.fields.push_back(field);
            }
        }
    };

    // Stage 1: frozen inequality over the window.
    ScalarField field = field_max(l, h_base);
    ScalarField h_at_tlo = h_base;
    result.stage1.grid = grid;
    mask_conflicts(tw.t_hi, field, (tw.t_lo == tw.t_hi) ? &h_at_tlo : nullptr);
    result.stage1.times.push_back(tw.t_hi);
    result.stage1.fields.push_back(field);
    drive(result.stage1, frozen, field, tw.t_hi, tw.t_lo, &h_at_tlo);

    // Stage 2: standard inequality from the handoff condition down to t0.
    result.stage2.grid = grid;
    field = field_max(field, h_at_tlo);
    result.stage2.times.push_back(tw.t_lo);
    result.stage2.fields.push_back(field);
    drive(result.stage2, standard, field, tw.t_lo, t0, nullptr);
    return result;
}

namespace {

struct Flight {
    const AircraftSetup* setup = nullptr;
    DynamicsSpec dyn;
    std::vector<double> alpha;
    std::unique_ptr<HamiltonianSpec> frozen, standard;
    ScalarField l, h_base;
    std::vector<double> schedule; // descending event times, schedule[0] = tw.t_hi
    std::size_t pos = 0;          // next schedule entry to process
    ScalarField field;
    ValueTube tube;               // every step recorded; split into stages at the end
    std::size_t tlo_frame = SIZE_MAX;
    std::vector<ConflictEvent> events;

    bool done() const { return pos >= schedule.size(); }
    double next_time() const { return schedule[pos]; }
    bool in_sector(double t, double eps) const
    {
        return t >= setup->entry_time - eps && t <= setup->tw.t_hi + eps;
    }
    bool started() const { return !tube.times.empty(); }
};

} // namespace

std::vector<ReachAvoidResult> run_algorithm1(const std::vector<AircraftSetup>& aircraft, double t0,
                                             const TwoStageOptions& opts)
{
    if (aircraft.empty()) throw ValidationError("run_algorithm1: no aircraft configured");
    double sweep_end = -std::numeric_limits<double>::infinity();
    for (const auto& a : aircraft) sweep_end = std::max(sweep_end, a.tw.t_hi);
    const double eps = time_eps(sweep_end);

    for (std::size_t j = 0; j < aircraft.size(); ++j) {
        const auto& a = aircraft[j];
        if (!(a.tw.t_lo <= a.tw.t_hi))
            throw ValidationError("run_algorithm1: aircraft " + std::to_string(j) + ": window bounds out of order");
        if (a.tw.t_lo < t0 - eps)
            throw ValidationError("run_algorithm1: aircraft " + std::to_string(j) +
                                  ": window starts before the scenario horizon");
        if (a.entry_time > a.tw.t_hi + eps)
            throw ValidationError("run_algorithm1: aircraft " + std::to_string(j) +
                                  ": enters the sector after its window closes");
        for (std::size_t i = 0; i < j; ++i) {
            const auto& b = aircraft[i];
            if (a.tw.t_lo < b.tw.t_hi - eps && b.tw.t_lo < a.tw.t_hi - eps)
                throw ValidationError("run_algorithm1: target windows of aircraft " + std::to_string(i) + " and " +
                                      std::to_string(j) + " overlap in time");
        }
    }

    // Per-flight setup; each aircraft steps on its own CFL schedule, which
    // keeps its updates independent of which other aircraft are present.
    std::vector<Flight> flights(aircraft.size());
    for (std::size_t j = 0; j < aircraft.size(); ++j) {
        Flight& fl = flights[j];
        fl.setup = &aircraft[j];
        fl.dyn = make_aircraft_dynamics(aircraft[j].model);
        fl.alpha = opts.solve.alpha ? *opts.solve.alpha : per_axis_speed_bound(fl.dyn, aircraft[j].grid);
        fl.frozen = std::make_unique<HamiltonianSpec>(fl.dyn, opts.solve.samples_per_input_axis, HamMode::Frozen);
        fl.standard = std::make_unique<HamiltonianSpec>(fl.dyn, opts.solve.samples_per_input_axis, HamMode::Standard);
        fl.l = implicit_field(aircraft[j].grid, tw_geometry(aircraft[j].model, aircraft[j].tw, aircraft[j].grid));
        fl.h_base = ScalarField(aircraft[j].grid, kNoObstacle);
        fl.tube.grid = aircraft[j].grid;

        double dt_base = cfl_dt(aircraft[j].grid, fl.alpha, opts.solve.cfl_number);
        if (!std::isfinite(dt_base)) dt_base = std::max(aircraft[j].tw.t_hi - t0, 1.0);
        const double end_time = std::max(aircraft[j].entry_time, t0);
        fl.schedule.push_back(aircraft[j].tw.t_hi);
        extend_schedule(fl.schedule, aircraft[j].tw.t_hi, std::max(aircraft[j].tw.t_lo, end_time), dt_base, eps);
        if (aircraft[j].tw.t_lo > end_time + eps)
            extend_schedule(fl.schedule, aircraft[j].tw.t_lo, end_time, dt_base, eps);
    }

    std::vector<std::unique_ptr<ConflictGeometry>> pair_geom(aircraft.size() * aircraft.size());
    auto geom_for = [&](std::size_t j, std::size_t i) -> ConflictGeometry& {
        auto& slot = pair_geom[j * aircraft.size() + i];
        if (!slot)
            slot = std::make_unique<ConflictGeometry>(aircraft[j].model, aircraft[j].grid, aircraft[i].model,
                                                      aircraft[i].grid, opts.sep);
        return *slot;
    };

    std::vector<std::size_t> steppers;
    std::vector<ScalarField> dynamic_h(aircraft.size());
    std::vector<bool> has_dynamic_h(aircraft.size());

    for (;;) {
        double t = -std::numeric_limits<double>::infinity();
        for (const auto& fl : flights)
            if (!fl.done()) t = std::max(t, fl.next_time());
        if (!std::isfinite(t)) break;

        steppers.clear();
        for (std::size_t j = 0; j < flights.size(); ++j)
            if (!flights[j].done() && std::abs(flights[j].next_time() - t) <= eps) steppers.push_back(j);

        // Advance the PDE (or initialize at the window end). The masking step
        // below sees everyone's post-step, pre-mask field, as the per-t loop
        // of the sweep prescribes.
        for (std::size_t j : steppers) {
            Flight& fl = flights[j];
            if (fl.pos == 0) {
                fl.field = field_max(fl.l, fl.h_base);
            } else {
                const double prev = fl.schedule[fl.pos - 1];
                const double dt = prev - t;
                const bool in_window = t >= fl.setup->tw.t_lo - eps;
                fl.field = step_backward(fl.field, fl.h_base, in_window ? *fl.frozen : *fl.standard, dt, fl.alpha);
            }
        }

        // Conflict detection across in-sector pairs.
        for (std::size_t j : steppers) {
            Flight& fl = flights[j];
            has_dynamic_h[j] = false;
            if (!fl.in_sector(t, eps)) continue;
            for (std::size_t i = 0; i < flights.size(); ++i) {
                if (i == j) continue;
                const Flight& other = flights[i];
                if (!other.in_sector(t, eps) || !other.started()) continue;
                const bool stepping = std::find(steppers.begin(), steppers.end(), i) != steppers.end();
                // When schedules differ the intruder may not have reached t
                // yet; its newest frame then stands in for the field at t.
                const ScalarField intr_field = stepping ? other.field : other.tube.interpolated(t);
                const ConflictZoneSlice zone = geom_for(j, i).detect(fl.field, intr_field);
                if (!zone.any) continue;
                const ScalarField h_ji = obstacle_field(zone, fl.setup->grid);
                if (!has_dynamic_h[j]) {
                    dynamic_h[j] = h_ji;
                    has_dynamic_h[j] = true;
                } else {
                    dynamic_h[j] = field_max(dynamic_h[j], h_ji);
                }
                fl.events.push_back({t, j, i, zone.bbox_lo, zone.bbox_hi});
            }
        }

        // Mask, record, and hand off Stage 1 -> Stage 2 at t_lo.
        for (std::size_t j : steppers) {
            Flight& fl = flights[j];
            if (has_dynamic_h[j]) fl.field = field_max(fl.field, dynamic_h[j]);
            fl.field.validate_finite("run_algorithm1");
            if (!fl.tube.boundary_touched && zero_level_on_boundary(fl.field)) fl.tube.boundary_touched = true;
            fl.tube.times.push_back(t);
            fl.tube.fields.push_back(fl.field);
            if (std::abs(t - fl.setup->tw.t_lo) <= eps) fl.tlo_frame = fl.tube.times.size() - 1;
            ++fl.pos;
        }
    }

    std::vector<ReachAvoidResult> results(flights.size());
    for (std::size_t j = 0; j < flights.size(); ++j) {
        Flight& fl = flights[j];
        ReachAvoidResult& res = results[j];
        const std::size_t split = fl.tlo_frame == SIZE_MAX ? fl.tube.times.size() - 1 : fl.tlo_frame;
        res.stage1.grid = fl.tube.grid;
        res.stage2.grid = fl.tube.grid;
        res.stage1.boundary_touched = fl.tube.boundary_touched;
        res.stage2.boundary_touched = fl.tube.boundary_touched;
        for (std::size_t k = 0; k <= split; ++k) {
            res.stage1.times.push_back(fl.tube.times[k]);
            res.stage1.fields.push_back(fl.tube.fields[k]);
        }
        // The handoff frame doubles as the Stage-2 terminal condition
        // max(stage-1 field at t_lo, obstacle at t_lo): the obstacle was
        // applied when that frame was masked, so the max is already in place.
        for (std::size_t k = split; k < fl.tube.times.size(); ++k) {
            res.stage2.times.push_back(fl.tube.times[k]);
            res.stage2.fields.push_back(fl.tube.fields[k]);
        }
        res.events = std::move(fl.events);
    }
    return results;
}

} // namespace hjra
