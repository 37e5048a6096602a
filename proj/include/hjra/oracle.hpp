#ifndef HJRA_ORACLE_HPP
#define HJRA_ORACLE_HPP

#include <cstddef>

#include "hjra/solver.hpp"

namespace hjra {

// Brute-force discrete dynamic programming over the grid, used as ground
// truth on coarse instances. One-step recursion:
//   terminal: V_k(x) = max( h(x), max_v min_u V_{k+1}(x + dt f(x,u,v)) )
//   anytime:  V_k(x) = max( h(x), min( V_{k+1}(x), max_v min_u ... ) )
// with multilinear interpolation for off-grid lookups (clamped at the domain
// boundary, matching the PDE solver's implicit boundary condition).
struct OracleOptions {
    double dt = 0.0;                  // must divide T - t0 into integer steps
    int control_samples = 3;          // per axis, vertices included
    int disturbance_samples = 3;      // per axis, vertices included
    SolveMode mode = SolveMode::Terminal;
    std::size_t record_every = 1;
};

struct OracleResult {
    ValueTube tube;
    // Lookups that left the grid by more than one spacing before clamping.
    std::size_t clamp_warnings = 0;
};

OracleResult dp_solve(const DynamicsSpec& dyn, const ScalarField& l, const ScalarField& h, double T, double t0,
                      const OracleOptions& opts);

// Nodewise comparison over the recorded times both tubes share (1e-9 time
// tolerance). mask_mismatch_cells counts nodes whose zero-sublevel
// membership disagrees.
struct TubeDiff {
    double linf = 0.0;
    std::size_t mask_mismatch_cells = 0;
    std::size_t compared_frames = 0;
};

TubeDiff compare_tubes(const ValueTube& a, const ValueTube& b);

} // namespace hjra

#endif
