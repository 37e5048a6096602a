#ifndef HJRA_AIRCRAFT_HPP
#define HJRA_AIRCRAFT_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "hjra/dynamics.hpp"

namespace hjra {

enum class FlightPhase { Climb, Cruise, Descent };

// Nominal airspeed vs altitude for one phase of flight; piecewise-linear
// between knots, exact at knots. Queries outside the table clamp to the
// nearest knot, mirroring flight-envelope saturation, and set `clamped`.
struct SpeedProfile {
    FlightPhase phase = FlightPhase::Cruise;
    std::vector<std::pair<double, double>> knots; // (altitude m, airspeed m/s)
};

double speed_lookup(const SpeedProfile& profile, double z, bool* clamped = nullptr);

struct SpeedTable {
    SpeedProfile climb, cruise, descent;
    const SpeedProfile& phase(FlightPhase p) const;
};

// Plain-text table: "phase altitude_m airspeed_mps" per line, '#' comments.
SpeedTable load_speed_table(const std::string& path);

// Point-mass abstraction of one aircraft following a waypoint flight plan
// with constant heading per segment. State on the solve grid is
// (s = along-track distance, z = altitude); time rides along as the solver's
// backward variable. Controls: airspeed trim b in [-1,1] scaling the nominal
// speed by (1 + speed_fraction*b), and flight path angle gamma_p limited to
// [0, gamma_max] climbing, [-gamma_max, 0] descending, {0} cruising.
// Disturbance: wind, |w_i| <= wind_bound[i] per axis.
struct AircraftModel {
    std::string name;
    std::vector<std::array<double, 3>> waypoints;
    SpeedTable profiles;
    double gamma_max = 5.0 * 3.14159265358979323846 / 180.0;
    double speed_fraction = 0.1;
    std::array<double, 3> wind_bound{0.0, 0.0, 0.0};

    // Derived per segment i (waypoint i -> i+1).
    std::vector<double> heading;        // Psi_i, atan2 of the horizontal displacement
    std::vector<double> path_angle;     // Gamma_i
    std::vector<double> segment_length; // d_i, horizontal projection length
    std::vector<double> cum_length;     // cumulative length at each waypoint, cum_length[0] = 0

    std::size_t segments() const { return segment_length.size(); }
    double total_length() const { return cum_length.back(); }
};

AircraftModel make_aircraft_model(std::string name, std::vector<std::array<double, 3>> waypoints, SpeedTable profiles,
                                  double gamma_max_rad, std::array<double, 3> wind_bound,
                                  double speed_fraction = 0.1);
// Uniform wind bound on all three axes.
AircraftModel make_aircraft_model(std::string name, std::vector<std::array<double, 3>> waypoints, SpeedTable profiles,
                                  double gamma_max_rad, double wind_bound, double speed_fraction = 0.1);

FlightPhase segment_phase(const AircraftModel& model, std::size_t segment);

struct AircraftState {
    double s = 0.0; // along-track distance within the segment, m
    double z = 0.0; // altitude, m
    double t = 0.0; // elapsed time, s
};

struct AircraftInput {
    double b = 0.0;       // in [-1, 1]
    double gamma_p = 0.0; // flight path angle, rad
};

// (sdot, zdot, tdot) with the small-angle substitution sin(g) ~ g, cos(g) ~ 1.
std::array<double, 3> aircraft_flow(const AircraftModel& model, std::size_t segment, const AircraftState& state,
                                    const AircraftInput& input, const std::array<double, 3>& wind);

// Guard s > d_segment fires a transition to the next segment with s reset to
// 0; altitude and time are unchanged. Returns nothing inside the domain. On
// the last segment the guard sets `terminal` instead of transitioning.
struct SegmentTransition {
    std::size_t next_segment = 0;
    double s_reset = 0.0;
};
std::optional<SegmentTransition> segment_transition(const AircraftModel& model, std::size_t segment, double s,
                                                    bool* terminal = nullptr);

// Horizontal position from waypoint + heading * s; altitude passes through.
std::array<double, 3> map_to_3d(const AircraftModel& model, std::size_t segment, double s, double z);

// Locate the segment containing a cumulative along-plan distance; clamps to
// the first/last segment outside [0, total_length].
std::size_t locate_segment(const AircraftModel& model, double cum_s, double* local_s);

// 3D position of a point given by cumulative along-plan distance.
std::array<double, 3> map_plan_to_3d(const AircraftModel& model, double cum_s, double z);

// 2D (s, z) solve dynamics over the unrolled cumulative along-plan
// coordinate. The segment reset map is absorbed by continuity of the
// cumulative coordinate; gamma_p is clamped to the active segment's phase
// range inside the flow.
DynamicsSpec make_aircraft_dynamics(const AircraftModel& model);

} // namespace hjra

#endif
