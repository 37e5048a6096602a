#ifndef HJRA_SOLVER_HPP
#define HJRA_SOLVER_HPP

#include <cstddef>
#include <optional>
#include <vector>

#include "hjra/hamiltonian.hpp"

namespace hjra {

enum class SolveMode { Terminal, Anytime };

struct SolveOptions {
    double cfl_number = 0.5; // in (0, 1]
    std::size_t record_every = 1;
    SolveMode mode = SolveMode::Terminal;
    int samples_per_input_axis = 3;
    // Per-axis dissipation/CFL bound; computed from per_axis_speed_bound on
    // the solve grid when absent.
    std::optional<std::vector<double>> alpha;
};

// Time-stamped sequence of value fields, times descending from the terminal
// time T down to t0. The first field is the terminal condition max{l, h}.
struct ValueTube {
    Grid grid;
    std::vector<double> times;
    std::vector<ScalarField> fields;
    bool boundary_touched = false; // zero level reached the grid boundary

    std::size_t frames() const { return times.size(); }
    const ScalarField& front() const { return fields.front(); }
    const ScalarField& back() const { return fields.back(); }

    // Exact-time lookup (1e-9 tolerance); throws when absent.
    const ScalarField& at_time(double t) const;
    // Linear interpolation between the recorded frames bracketing t; clamps
    // to the nearest end outside the recorded range.
    ScalarField interpolated(double t) const;
    bool covers(double t, double tol = 1e-9) const;
};

// CFL-limited step: cfl * min over axes with alpha_i > 0 of dx_i / alpha_i.
// All-zero alpha means nothing moves; the full horizon is one step.
double cfl_dt(const Grid& grid, std::span<const double> alpha, double cfl_number);

// True when any boundary node has value <= 0. Grid domains should be chosen
// large enough that this never fires during the horizon.
bool zero_level_on_boundary(const ScalarField& f);

// One backward Euler step of the quasi-variational inequality:
//   V_pde = V_next + dt * Hhat(D-, D+, x), then max with the obstacle h.
// Throws NumericalError when dt exceeds the CFL bound for alpha.
ScalarField step_backward(const ScalarField& v_next, const ScalarField& h, const HamiltonianSpec& spec, double dt,
                          std::span<const double> alpha);

// Backward solve from T to t0 starting at max{l, h}. Terminal mode integrates
// the plain game Hamiltonian; Anytime mode the frozen min{0, H} variant.
// Records every record_every-th step plus the terminal time and t0; the last
// step is shortened to land exactly on t0.
ValueTube solve(const DynamicsSpec& dyn, const ScalarField& l, const ScalarField& h, double T, double t0,
                const SolveOptions& opts);

} // namespace hjra

#endif
