#ifndef HJRA_REACH_AVOID_HPP
#define HJRA_REACH_AVOID_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hjra/aircraft.hpp"
#include "hjra/geometry.hpp"
#include "hjra/oracle.hpp"
#include "hjra/solver.hpp"

namespace hjra {

// Obstacle level used where no conflict zone is active.
inline constexpr double kNoObstacle = -1.0e6;

// Zero-sublevel extraction: node mask plus contour polylines. 1D fields
// yield one-point polylines at the sign crossings; 2D fields marching-squares
// contours; higher dimensions are sliced over the first two axes.
struct LevelSetExtract {
    std::vector<std::uint8_t> mask;
    std::vector<std::vector<std::vector<double>>> polylines; // polyline -> point -> coords
};

LevelSetExtract sublevel_set(const ScalarField& field, double level = 0.0);

// Spatial + temporal constraint the aircraft must pass through. Adjacent
// windows fix the along-track coordinate at the center waypoint and give an
// altitude band; superimposed windows fix the altitude and give an
// along-track band. The fixed coordinate receives a half-cell tolerance band
// so the target stays visible on the grid.
struct TargetWindow {
    enum class Kind { Adjacent, Superimposed };
    Kind kind = Kind::Adjacent;
    std::size_t center_waypoint = 0;
    double band_lo = 0.0, band_hi = 0.0; // relative to the waypoint (z-band or s-band)
    double t_lo = 0.0, t_hi = 0.0;
};

// Target box of the window on the (s, z) solve grid.
GeometrySpec tw_geometry(const AircraftModel& model, const TargetWindow& tw, const Grid& grid);

// Protected-zone cylinder: horizontal radius and half the cylinder height
// (separation between centers).
struct SeparationStandard {
    double horizontal = 9260.0; // 5 nmi
    double vertical = 304.8;    // 1000 ft, half of the 2000 ft height
};

// Conflict zone C_ji on aircraft j's grid at one time, with the bounding box
// A_ji (inflated by one grid cell) used to build the obstacle.
struct ConflictZoneSlice {
    std::vector<std::uint8_t> mask;
    bool any = false;
    std::array<double, 2> bbox_lo{}, bbox_hi{};
};

// Precomputed pair geometry between two aircraft grids. Mapped horizontal
// distance depends only on the along-track node, and the altitude test is a
// contiguous window, so detection reduces to per-s-node candidate lists plus
// altitude bitmasks.
class ConflictGeometry {
public:
    ConflictGeometry(const AircraftModel& own, const Grid& own_grid, const AircraftModel& intruder,
                     const Grid& intruder_grid, const SeparationStandard& sep);

    // C_ji from the two value fields at a common time: own-grid node is in
    // conflict when some intruder node with value <= 0 sits within the
    // separation cylinder of its mapped position.
    ConflictZoneSlice detect(const ScalarField& own_field, const ScalarField& intruder_field) const;

private:
    Grid own_grid_, intruder_grid_;
    std::vector<std::vector<std::uint32_t>> near_;  // own s-node -> intruder s-nodes within horizontal range
    std::vector<std::vector<std::uint64_t>> zwin_;  // own z-node -> intruder z-level bitmask within vertical range
    std::size_t zwords_ = 0;
};

// Spec-level entry point: interpolates both tubes at t (error when t is not
// covered) and runs detection.
ConflictZoneSlice conflict_detect(const ValueTube& own_tube, const AircraftModel& own, const ValueTube& intruder_tube,
                                  const AircraftModel& intruder, double t, const SeparationStandard& sep);

// h_ji: negated signed distance of the inflated bounding box, so h > 0
// exactly inside it; the no-obstacle sentinel everywhere when the zone is
// empty.
ScalarField obstacle_field(const ConflictZoneSlice& zone, const Grid& grid);

struct ConflictEvent {
    double t = 0.0;
    std::size_t own = 0, intruder = 0; // aircraft indices
    std::array<double, 2> bbox_lo{}, bbox_hi{};
};

// Stage 1 (frozen, over the window) + Stage 2 (standard, down to t0) tubes
// for one aircraft, with the conflict events that masked them.
struct ReachAvoidResult {
    ValueTube stage1;
    ValueTube stage2;
    std::vector<ConflictEvent> events;
};

struct TwoStageOptions {
    SolveOptions solve; // mode is stage-selected internally
    SeparationStandard sep;
};

// Fixed-intruder two-stage computation: Stage 1 solves the frozen inequality
// on [t_lo, t_hi] from the window target, Stage 2 the standard one on
// [t0, t_lo] from max(stage-1 field, obstacle); both mask each step against
// conflict zones detected from the given intruder tubes.
struct IntruderTube {
    const ValueTube* tube = nullptr;
    const AircraftModel* model = nullptr;
};

ReachAvoidResult two_stage_tw(const AircraftModel& model, const Grid& grid, const TargetWindow& tw, double t0,
                              const TwoStageOptions& opts, const std::vector<IntruderTube>& intruders = {});

// One aircraft of a multi-aircraft run.
struct AircraftSetup {
    AircraftModel model;
    Grid grid;
    TargetWindow tw;
    double entry_time = 0.0; // sector entry; the aircraft is in the sector on [entry_time, tw.t_hi]
};

// Single backward sweep over all aircraft: frozen solve inside each window,
// standard solve below it, per-step cross-aircraft conflict detection and
// obstacle masking, stage handoff at t_lo. Each aircraft advances on its own
// CFL schedule; intruder fields are read from the co-evolving tubes at the
// query time (clamped to the intruder's current frontier when schedules
// differ). t0 is the scenario start; every window must fit inside [t0, T].
std::vector<ReachAvoidResult> run_algorithm1(const std::vector<AircraftSetup>& aircraft, double t0,
                                             const TwoStageOptions& opts);

} // namespace hjra

#endif
