#ifndef HJRA_SCENARIO_HPP
#define HJRA_SCENARIO_HPP

#include <optional>
#include <string>
#include <vector>

#include "hjra/dynamics.hpp"
#include "hjra/geometry.hpp"
#include "hjra/reach_avoid.hpp"

namespace hjra {

// Scenario files are line-oriented "[section]" / "key = value" text with '#'
// comments. Numbers are SI (meters, seconds, m/s) unless suffixed: "5nmi",
// "2000ft", "3deg". Unknown keys and sections are errors; every diagnostic
// names the offending key and line.

enum class DynKind { Integrator1D, DoubleIntegrator2D, Game2D, Affine };

struct DynamicsScenario {
    DynKind kind = DynKind::Integrator1D;
    InputBox control, disturbance;
    std::size_t state_dim = 0; // Affine only
    std::vector<Polynomial> drift;
    std::vector<std::vector<Polynomial>> control_gain, disturbance_gain;
};

struct AircraftScenario {
    std::string name;
    std::vector<std::array<double, 3>> waypoints;
    std::string profile_path; // resolved against the scenario file's directory
    double gamma_max = 5.0 * 3.14159265358979323846 / 180.0;
    double speed_fraction = 0.1;
    std::array<double, 3> wind{0.0, 0.0, 0.0};
    double entry = 0.0;
    TargetWindow tw;
    AxisSpec grid_s, grid_z;
};

struct Scenario {
    enum class Kind { Solve, Algorithm1 };
    Kind kind = Kind::Solve;

    double t0 = 0.0;
    double T = 0.0;
    bool T_given = false; // Algorithm1 defaults T to the latest window end

    SolveMode mode = SolveMode::Terminal;
    double cfl = 0.5;
    int samples = 3;
    std::size_t record_every = 1;
    int threads = 1;
    SeparationStandard sep;
    std::optional<std::vector<double>> alpha; // per-axis dissipation override
    std::string reference; // "" or "analytic_1d"
    double reference_radius = 0.5;
    bool oracle = false;
    double oracle_dt = 0.0;
    int oracle_control_samples = 3;
    int oracle_disturbance_samples = 3;
    std::string output_dir;

    // Solve form.
    std::vector<AxisSpec> grid_axes;
    DynamicsScenario dynamics;
    std::optional<GeometrySpec> target;
    std::optional<GeometrySpec> avoid;

    // Algorithm1 form.
    std::vector<AircraftScenario> aircraft;

    std::string base_dir;

    double horizon_end() const; // T, or the latest window end
};

Scenario parse_scenario(const std::string& path);
Scenario parse_scenario_text(const std::string& text, const std::string& base_dir, const std::string& display_name);

// Canonical text form; parse(serialize(s)) == s.
std::string serialize_scenario(const Scenario& s);

bool operator==(const Scenario& a, const Scenario& b);

// Instantiate the configured dynamics (Solve form).
DynamicsSpec build_dynamics(const DynamicsScenario& d);

// Instantiate aircraft model + grid + setup (Algorithm1 form).
AircraftSetup build_aircraft(const AircraftScenario& a, const std::string& base_dir);

} // namespace hjra

#endif
