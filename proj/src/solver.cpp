#include "hjra/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hjra/parallel.hpp"

namespace hjra {

const ScalarField& ValueTube::at_time(double t) const
{
    for (std::size_t i = 0; i < times.size(); ++i)
        if (std::abs(times[i] - t) <= 1e-9) return fields[i];
    throw ValidationError("ValueTube: no recorded field at t = " + std::to_string(t));
}

bool ValueTube::covers(double t, double tol) const
{
    if (times.empty()) return false;
    return t <= times.front() + tol && t >= times.back() - tol;
}

ScalarField ValueTube::interpolated(double t) const
{
    if (times.empty()) throw ValidationError("ValueTube: empty tube");
    if (t >= times.front()) return fields.front();
    if (t <= times.back()) return fields.back();
    // times descend; find the bracketing pair.
    std::size_t hi = 0;
    while (hi + 1 < times.size() && times[hi + 1] > t) ++hi;
    const std::size_t lo = hi + 1;
    const double span = times[hi] - times[lo];
    if (std::abs(times[hi] - t) <= 1e-12 || span <= 0.0) return fields[hi];
    const double w = (t - times[lo]) / span;
    ScalarField out(grid, 0.0);
    const auto& a = fields[lo];
    const auto& b = fields[hi];
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + w * (b[i] - a[i]);
    return out;
}

double cfl_dt(const Grid& grid, std::span<const double> alpha, double cfl_number)
{
    double dt = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < grid.dim(); ++a) {
        if (alpha[a] > 0.0) dt = std::min(dt, grid.spacing(a) / alpha[a]);
    }
    if (!std::isfinite(dt)) return dt; // zero dynamics: caller takes the full horizon
    return cfl_number * dt;
}

ScalarField step_backward(const ScalarField& v_next, const ScalarField& h, const HamiltonianSpec& spec, double dt,
                          std::span<const double> alpha)
{
    const Grid& grid = v_next.grid();
    if (!(h.grid() == grid)) throw ValidationError("step_backward: field grids differ");
    const std::size_t dim = grid.dim();
    if (alpha.size() != dim || dim != spec.dyn().state_dim)
        throw ValidationError("step_backward: dimension mismatch");

    // CFL check before any work.
    const double bound = cfl_dt(grid, alpha, 1.0);
    if (std::isfinite(bound) && dt > bound * (1.0 + 1e-12))
        throw NumericalError("step_backward: dt = " + std::to_string(dt) + " violates CFL bound " +
                             std::to_string(bound));
    if (!(dt >= 0.0)) throw ValidationError("step_backward: dt must be nonnegative");

    ScalarField out(grid, 0.0);
    parallel_for(grid.total_nodes(), [&](std::size_t begin, std::size_t end) {
        std::vector<double> x(dim), dminus(dim), dplus(dim);
        for (std::size_t i = begin; i < end; ++i) {
            bool on_boundary = false;
            double stencil_lo = v_next[i];
            double stencil_hi = v_next[i];
            for (std::size_t a = 0; a < dim; ++a) {
                const std::size_t k = grid.axis_index(i, a);
                const std::size_t stride = grid.stride(a);
                const double inv_dx = 1.0 / grid.spacing(a);
                const std::size_t n = grid.nodes(a);
                const double back = k > 0 ? (v_next[i] - v_next[i - stride]) * inv_dx : 0.0;
                const double fwd = k + 1 < n ? (v_next[i + stride] - v_next[i]) * inv_dx : 0.0;
                dminus[a] = k > 0 ? back : fwd;
                dplus[a] = k + 1 < n ? fwd : back;
                if (k == 0 || k + 1 == n) on_boundary = true;
                if (k > 0) {
                    stencil_lo = std::min(stencil_lo, v_next[i - stride]);
                    stencil_hi = std::max(stencil_hi, v_next[i - stride]);
                }
                if (k + 1 < n) {
                    stencil_lo = std::min(stencil_lo, v_next[i + stride]);
                    stencil_hi = std::max(stencil_hi, v_next[i + stride]);
                }
            }
            grid.node_point(i, x);
            // Backward-in-time update V(t-dt) = V(t) + dt*Hhat: time reversal
            // flips the upwind direction, so the one-sided slopes swap roles
            // and the Lax-Friedrichs term dissipates instead of sharpening.
            const double hhat = lax_friedrichs(spec, dplus, dminus, x, alpha);
            double v_pde = v_next[i] + dt * hhat;
            // The copied-slope closure at the grid edge is not monotone when
            // the characteristic enters from outside; clamping edge nodes to
            // the stencil range of the previous field restores the discrete
            // maximum principle there. Interior nodes satisfy it already
            // under the CFL bound.
            if (on_boundary) v_pde = std::clamp(v_pde, stencil_lo, stencil_hi);
            // Frozen mode carries the discrete freeze branch: the augmented
            // input may stop the flow, so a node never rises above its
            // previous value. Matches the DP recursion's min term.
            if (spec.mode() == HamMode::Frozen) v_pde = std::min(v_next[i], v_pde);
            out[i] = std::max(v_pde, h[i]);
        }
    });
    return out;
}

bool zero_level_on_boundary(const ScalarField& f)
{
    const Grid& g = f.grid();
    for (std::size_t i = 0; i < g.total_nodes(); ++i) {
        if (f[i] > 0.0) continue;
        for (std::size_t a = 0; a < g.dim(); ++a) {
            const std::size_t k = g.axis_index(i, a);
            if (k == 0 || k + 1 == g.nodes(a)) return true;
        }
    }
    return false;
}

ValueTube solve(const DynamicsSpec& dyn, const ScalarField& l, const ScalarField& h, double T, double t0,
                const SolveOptions& opts)
{
    if (!(t0 <= T)) throw ValidationError("solve: needs t0 <= T");
    if (!(opts.cfl_number > 0.0) || opts.cfl_number > 1.0)
        throw ValidationError("solve: cfl_number must lie in (0, 1]");
    if (opts.record_every < 1) throw ValidationError("solve: record_every must be >= 1");
    if (!(l.grid() == h.grid())) throw ValidationError("solve: l and h grids differ");

    const Grid& grid = l.grid();
    const std::vector<double> alpha = opts.alpha ? *opts.alpha : per_axis_speed_bound(dyn, grid);
    HamiltonianSpec spec(dyn, opts.samples_per_input_axis,
                         opts.mode == SolveMode::Anytime ? HamMode::Frozen : HamMode::Standard);

    ValueTube tube;
    tube.grid = grid;

    ScalarField current = field_max(l, h);
    tube.times.push_back(T);
    tube.fields.push_back(current);
    tube.boundary_touched = zero_level_on_boundary(current);

    if (T == t0) return tube;

    double dt_base = cfl_dt(grid, alpha, opts.cfl_number);
    if (!std::isfinite(dt_base)) dt_base = T - t0; // static field, one step

    double t = T;
    std::size_t step = 0;
    while (t > t0 + 1e-12 * std::max(1.0, std::abs(T))) {
        const double dt = std::min(dt_base, t - t0); // shortened final step lands exactly on t0
        current = step_backward(current, h, spec, dt, alpha);
        t = (t - dt <= t0 + 1e-12 * std::max(1.0, std::abs(T))) ? t0 : t - dt;
        ++step;
        current.validate_finite("solve");
        if (!tube.boundary_touched && zero_level_on_boundary(current)) tube.boundary_touched = true;
        if (step % opts.record_every == 0 || t == t0) {
            if (tube.times.back() != t) {
                tube.times.push_back(t);
                tube.fields.push_back(current);
            }
        }
    }
    return tube;
}

} // namespace hjra
