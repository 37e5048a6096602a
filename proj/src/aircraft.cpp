#include "hjra/aircraft.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>

namespace hjra {

double speed_lookup(const SpeedProfile& profile, double z, bool* clamped)
{
    if (clamped) *clamped = false;
    if (profile.knots.empty()) throw ValidationError("speed profile: empty table");
    const auto& knots = profile.knots;
    if (z <= knots.front().first) {
        if (clamped && z < knots.front().first) *clamped = true;
        return knots.front().second;
    }
    if (z >= knots.back().first) {
        if (clamped && z > knots.back().first) *clamped = true;
        return knots.back().second;
    }
    auto it = std::upper_bound(knots.begin(), knots.end(), z,
                               [](double val, const auto& knot) { return val < knot.first; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    if (z == lo.first) return lo.second;
    const double w = (z - lo.first) / (hi.first - lo.first);
    return lo.second + w * (hi.second - lo.second);
}

const SpeedProfile& SpeedTable::phase(FlightPhase p) const
{
    switch (p) {
    case FlightPhase::Climb: return climb;
    case FlightPhase::Descent: return descent;
    case FlightPhase::Cruise: break;
    }
    return cruise;
}

namespace {

void validate_profile(const SpeedProfile& p, const std::string& where)
{
    if (p.knots.empty()) throw ValidationError("speed table: missing " + where + " profile");
    double prev = -std::numeric_limits<double>::infinity();
    for (const auto& [alt, spd] : p.knots) {
        if (!(alt > prev)) throw ValidationError("speed table: " + where + " altitudes must be strictly increasing");
        if (!(spd > 0.0)) throw ValidationError("speed table: " + where + " airspeeds must be positive");
        prev = alt;
    }
}

} // namespace

SpeedTable load_speed_table(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ValidationError("speed table: cannot open " + path);
    SpeedTable table;
    table.climb.phase = FlightPhase::Climb;
    table.cruise.phase = FlightPhase::Cruise;
    table.descent.phase = FlightPhase::Descent;

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string phase;
        if (!(ls >> phase)) continue;
        double alt = 0.0, spd = 0.0;
        if (!(ls >> alt >> spd))
            throw ValidationError("speed table: " + path + ":" + std::to_string(lineno) +
                                  ": expected \"phase altitude_m airspeed_mps\"");
        SpeedProfile* target = nullptr;
        if (phase == "climb") target = &table.climb;
        else if (phase == "cruise") target = &table.cruise;
        else if (phase == "descent") target = &table.descent;
        else
            throw ValidationError("speed table: " + path + ":" + std::to_string(lineno) + ": unknown phase \"" +
                                  phase + "\"");
        target->knots.emplace_back(alt, spd);
    }
    for (auto* p : {&table.climb, &table.cruise, &table.descent}) {
        std::sort(p->knots.begin(), p->knots.end());
    }
    validate_profile(table.climb, "climb");
    validate_profile(table.cruise, "cruise");
    validate_profile(table.descent, "descent");
    return table;
}

AircraftModel make_aircraft_model(std::string name, std::vector<std::array<double, 3>> waypoints, SpeedTable profiles,
                                  double gamma_max_rad, double wind_bound, double speed_fraction)
{
    return make_aircraft_model(std::move(name), std::move(waypoints), std::move(profiles), gamma_max_rad,
                               std::array<double, 3>{wind_bound, wind_bound, wind_bound}, speed_fraction);
}

AircraftModel make_aircraft_model(std::string name, std::vector<std::array<double, 3>> waypoints, SpeedTable profiles,
                                  double gamma_max_rad, std::array<double, 3> wind_bound, double speed_fraction)
{
    if (waypoints.size() < 2) throw ValidationError("aircraft model: needs at least two waypoints");
    constexpr double kMaxGamma = 5.0 * 3.14159265358979323846 / 180.0;
    if (!(gamma_max_rad >= 0.0) || gamma_max_rad > kMaxGamma + 1e-12)
        throw ValidationError("aircraft model: gamma_max must lie in [0, 5 degrees]");
    for (double w : wind_bound)
        if (!(w >= 0.0)) throw ValidationError("aircraft model: wind bounds must be nonnegative");
    if (!(speed_fraction >= 0.0) || speed_fraction >= 1.0)
        throw ValidationError("aircraft model: speed fraction must lie in [0, 1)");

    AircraftModel m;
    m.name = std::move(name);
    m.waypoints = std::move(waypoints);
    m.profiles = std::move(profiles);
    m.gamma_max = gamma_max_rad;
    m.speed_fraction = speed_fraction;
    m.wind_bound = wind_bound;

    const std::size_t nseg = m.waypoints.size() - 1;
    m.heading.resize(nseg);
    m.path_angle.resize(nseg);
    m.segment_length.resize(nseg);
    m.cum_length.assign(m.waypoints.size(), 0.0);
    for (std::size_t i = 0; i < nseg; ++i) {
        const double dx = m.waypoints[i + 1][0] - m.waypoints[i][0];
        const double dy = m.waypoints[i + 1][1] - m.waypoints[i][1];
        const double dz = m.waypoints[i + 1][2] - m.waypoints[i][2];
        const double d = std::hypot(dx, dy);
        if (!(d > 0.0))
            throw ValidationError("aircraft model: segment " + std::to_string(i) +
                                  " has zero horizontal length");
        m.heading[i] = std::atan2(dy, dx);
        m.path_angle[i] = std::atan2(dz, d);
        m.segment_length[i] = d;
        m.cum_length[i + 1] = m.cum_length[i] + d;
    }
    return m;
}

FlightPhase segment_phase(const AircraftModel& model, std::size_t segment)
{
    const double g = model.path_angle.at(segment);
    if (g > 0.0) return FlightPhase::Climb;
    if (g < 0.0) return FlightPhase::Descent;
    return FlightPhase::Cruise;
}

std::array<double, 3> aircraft_flow(const AircraftModel& model, std::size_t segment, const AircraftState& state,
                                    const AircraftInput& input, const std::array<double, 3>& wind)
{
    if (segment >= model.segments()) throw ValidationError("aircraft_flow: segment index out of range");
    if (std::abs(input.b) > 1.0 + 1e-12) throw ValidationError("aircraft_flow: |b| must be <= 1");
    if (std::abs(input.gamma_p) > model.gamma_max + 1e-12)
        throw ValidationError("aircraft_flow: |gamma_p| exceeds gamma_max");
    for (std::size_t a = 0; a < 3; ++a)
        if (std::abs(wind[a]) > model.wind_bound[a] + 1e-9)
            throw ValidationError("aircraft_flow: wind exceeds bound");

    const FlightPhase phase = segment_phase(model, segment);
    const double g = speed_lookup(model.profiles.phase(phase), state.z);
    const double airspeed = (1.0 + model.speed_fraction * input.b) * g;
    const double psi = model.heading[segment];
    // Small-angle substitution: cos(gamma_p) ~ 1, sin(gamma_p) ~ gamma_p.
    const double sdot = airspeed + wind[0] * std::cos(psi) + wind[1] * std::sin(psi);
    const double zdot = airspeed * input.gamma_p + wind[2];
    return {sdot, zdot, 1.0};
}

std::optional<SegmentTransition> segment_transition(const AircraftModel& model, std::size_t segment, double s,
                                                    bool* terminal)
{
    if (segment >= model.segments()) throw ValidationError("segment_transition: segment index out of range");
    if (terminal) *terminal = false;
    if (!(s > model.segment_length[segment])) return std::nullopt;
    if (segment + 1 >= model.segments()) {
        if (terminal) *terminal = true;
        return std::nullopt;
    }
    return SegmentTransition{segment + 1, 0.0};
}

std::array<double, 3> map_to_3d(const AircraftModel& model, std::size_t segment, double s, double z)
{
    if (segment >= model.segments()) throw ValidationError("map_to_3d: segment index out of range");
    if (s < 0.0 || s > model.segment_length[segment] + 1e-9)
        throw ValidationError("map_to_3d: s outside segment range");
    const auto& wp = model.waypoints[segment];
    const double psi = model.heading[segment];
    return {wp[0] + std::cos(psi) * s, wp[1] + std::sin(psi) * s, z};
}

std::size_t locate_segment(const AircraftModel& model, double cum_s, double* local_s)
{
    const std::size_t nseg = model.segments();
    if (cum_s <= 0.0) {
        if (local_s) *local_s = cum_s;
        return 0;
    }
    if (cum_s >= model.total_length()) {
        if (local_s) *local_s = cum_s - model.cum_length[nseg - 1];
        return nseg - 1;
    }
    auto it = std::upper_bound(model.cum_length.begin(), model.cum_length.end(), cum_s);
    const std::size_t seg = static_cast<std::size_t>(it - model.cum_length.begin()) - 1;
    if (local_s) *local_s = cum_s - model.cum_length[seg];
    return seg;
}

std::array<double, 3> map_plan_to_3d(const AircraftModel& model, double cum_s, double z)
{
    double local = 0.0;
    const std::size_t seg = locate_segment(model, cum_s, &local);
    const auto& wp = model.waypoints[seg];
    const double psi = model.heading[seg];
    // Extrapolates along the segment heading outside [0, d]; grid domains may
    // extend slightly past the plan ends.
    return {wp[0] + std::cos(psi) * local, wp[1] + std::sin(psi) * local, z};
}

DynamicsSpec make_aircraft_dynamics(const AircraftModel& model)
{
    DynamicsSpec dyn;
    dyn.state_dim = 2;
    dyn.control = InputBox({-1.0, -model.gamma_max}, {1.0, model.gamma_max});
    dyn.disturbance = InputBox::symmetric({model.wind_bound[0], model.wind_bound[1], model.wind_bound[2]});
    dyn.affine_in_inputs = false;

    auto m = std::make_shared<AircraftModel>(model);
    dyn.flow = [m](std::span<const double> x, std::span<const double> u, std::span<const double> v,
                   std::span<double> out) {
        double local = 0.0;
        const std::size_t seg = locate_segment(*m, x[0], &local);
        const FlightPhase phase = segment_phase(*m, seg);
        const double g = speed_lookup(m->profiles.phase(phase), x[1]);
        // gamma_p clamps to the segment's phase range: climb [0, gmax],
        // descent [-gmax, 0], cruise {0}. The clamp is surjective onto the
        // admissible range, so input optimization over the full box is exact.
        double gamma = u[1];
        switch (phase) {
        case FlightPhase::Climb: gamma = std::clamp(gamma, 0.0, m->gamma_max); break;
        case FlightPhase::Descent: gamma = std::clamp(gamma, -m->gamma_max, 0.0); break;
        case FlightPhase::Cruise: gamma = 0.0; break;
        }
        const double airspeed = (1.0 + m->speed_fraction * u[0]) * g;
        const double psi = m->heading[seg];
        out[0] = airspeed + v[0] * std::cos(psi) + v[1] * std::sin(psi);
        out[1] = airspeed * gamma + v[2];
    };
    return dyn;
}

} // namespace hjra
