#include "hjra/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <string>

#include "hjra/parallel.hpp"

namespace hjra {

namespace {

std::vector<double> lattice(const InputBox& box, int per_axis, std::size_t& count)
{
    count = 1;
    const std::size_t d = box.dim();
    if (d == 0) return {};
    std::vector<std::vector<double>> axes(d);
    for (std::size_t a = 0; a < d; ++a) {
        if (box.lower[a] == box.upper[a] || per_axis < 2) {
            axes[a] = {box.lower[a]};
        } else {
            axes[a].resize(static_cast<std::size_t>(per_axis));
            for (int k = 0; k < per_axis; ++k)
                axes[a][static_cast<std::size_t>(k)] =
                    box.lower[a] + (box.upper[a] - box.lower[a]) * static_cast<double>(k) / static_cast<double>(per_axis - 1);
            axes[a].front() = box.lower[a];
            axes[a].back() = box.upper[a];
        }
        count *= axes[a].size();
    }
    std::vector<double> flat(count * d);
    std::vector<std::size_t> idx(d, 0);
    for (std::size_t p = 0; p < count; ++p) {
        for (std::size_t a = 0; a < d; ++a) flat[p * d + a] = axes[a][idx[a]];
        for (std::size_t a = d; a-- > 0;) {
            if (++idx[a] < axes[a].size()) break;
            idx[a] = 0;
        }
    }
    return flat;
}

} // namespace

OracleResult dp_solve(const DynamicsSpec& dyn, const ScalarField& l, const ScalarField& h, double T, double t0,
                      const OracleOptions& opts)
{
    if (!(t0 <= T)) throw ValidationError("dp_solve: needs t0 <= T");
    if (!(l.grid() == h.grid())) throw ValidationError("dp_solve: l and h grids differ");
    const Grid& grid = l.grid();
    if (grid.dim() != dyn.state_dim) throw ValidationError("dp_solve: grid dimension mismatch");
    if (opts.record_every < 1) throw ValidationError("dp_solve: record_every must be >= 1");

    std::size_t steps = 0;
    if (T > t0) {
        if (!(opts.dt > 0.0)) throw ValidationError("dp_solve: dt must be positive");
        const double ratio = (T - t0) / opts.dt;
        steps = static_cast<std::size_t>(std::llround(ratio));
        if (steps == 0 || std::abs(ratio - static_cast<double>(steps)) > 1e-9)
            throw ValidationError("dp_solve: dt must divide the horizon into an integer number of steps");
    }

    std::size_t u_count = 0, v_count = 0;
    const std::vector<double> us = lattice(dyn.control, opts.control_samples, u_count);
    const std::vector<double> vs = lattice(dyn.disturbance, opts.disturbance_samples, v_count);
    const std::size_t udim = dyn.control.dim();
    const std::size_t vdim = dyn.disturbance.dim();
    const std::size_t dim = grid.dim();

    OracleResult result;
    result.tube.grid = grid;
    ScalarField current = field_max(l, h);
    result.tube.times.push_back(T);
    result.tube.fields.push_back(current);

    std::atomic<std::size_t> clamp_count{0};
    const bool anytime = opts.mode == SolveMode::Anytime;

    for (std::size_t k = 0; k < steps; ++k) {
        const ScalarField& next = current;
        ScalarField updated(grid, 0.0);
        parallel_for(grid.total_nodes(), [&](std::size_t begin, std::size_t end) {
            std::vector<double> x(dim), f(dim), y(dim);
            std::size_t local_clamps = 0;
            for (std::size_t i = begin; i < end; ++i) {
                grid.node_point(i, x);
                double outer = -std::numeric_limits<double>::infinity();
                for (std::size_t pv = 0; pv < v_count; ++pv) {
                    std::span<const double> v(vs.data() + pv * vdim, vdim);
                    double inner = std::numeric_limits<double>::infinity();
                    for (std::size_t pu = 0; pu < u_count; ++pu) {
                        std::span<const double> u(us.data() + pu * udim, udim);
                        dyn.flow(x, u, v, f);
                        for (std::size_t a = 0; a < dim; ++a) {
                            y[a] = x[a] + opts.dt * f[a];
                            const double margin = grid.spacing(a);
                            if (y[a] < grid.axis(a).min - margin || y[a] > grid.axis(a).max + margin) ++local_clamps;
                        }
                        inner = std::min(inner, interpolate(next, y));
                    }
                    outer = std::max(outer, inner);
                }
                double value = outer;
                if (anytime) value = std::min(next[i], value); // freeze branch: stop the clock here
                updated[i] = std::max(h[i], value);
            }
            clamp_count.fetch_add(local_clamps, std::memory_order_relaxed);
        });
        current = std::move(updated);
        const double t = (k + 1 == steps) ? t0 : T - static_cast<double>(k + 1) * opts.dt;
        if ((k + 1) % opts.record_every == 0 || k + 1 == steps) {
            result.tube.times.push_back(t);
            result.tube.fields.push_back(current);
        }
    }
    result.clamp_warnings = clamp_count.load();
    return result;
}

TubeDiff compare_tubes(const ValueTube& a, const ValueTube& b)
{
    if (!(a.grid == b.grid)) throw ValidationError("compare_tubes: grid mismatch");
    TubeDiff diff;
    for (std::size_t ia = 0; ia < a.times.size(); ++ia) {
        std::size_t ib = b.times.size();
        for (std::size_t j = 0; j < b.times.size(); ++j) {
            if (std::abs(b.times[j] - a.times[ia]) <= 1e-9) {
                ib = j;
                break;
            }
        }
        if (ib == b.times.size()) continue;
        ++diff.compared_frames;
        const auto& fa = a.fields[ia];
        const auto& fb = b.fields[ib];
        for (std::size_t i = 0; i < fa.size(); ++i) {
            diff.linf = std::max(diff.linf, std::abs(fa[i] - fb[i]));
            if ((fa[i] <= 0.0) != (fb[i] <= 0.0)) ++diff.mask_mismatch_cells;
        }
    }
    if (diff.compared_frames == 0) throw ValidationError("compare_tubes: tubes share no recorded times");
    return diff;
}

} // namespace hjra
