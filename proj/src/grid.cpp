#include "hjra/grid.hpp"

#include <cmath>
#include <string>

namespace hjra {

Grid::Grid(std::vector<AxisSpec> axes) : axes_(std::move(axes))
{
    if (axes_.empty()) throw ValidationError("grid: needs at least one axis");
    spacing_.resize(axes_.size());
    for (std::size_t a = 0; a < axes_.size(); ++a) {
        const auto& ax = axes_[a];
        if (!(ax.min < ax.max))
            throw ValidationError("grid: axis " + std::to_string(a) + ": min must be < max");
        if (ax.nodes < 2)
            throw ValidationError("grid: axis " + std::to_string(a) + ": needs >= 2 nodes");
        if (!std::isfinite(ax.min) || !std::isfinite(ax.max))
            throw ValidationError("grid: axis " + std::to_string(a) + ": non-finite bounds");
        spacing_[a] = (ax.max - ax.min) / static_cast<double>(ax.nodes - 1);
    }
    strides_.assign(axes_.size(), 1);
    for (std::size_t a = axes_.size(); a-- > 1;) strides_[a - 1] = strides_[a] * axes_[a].nodes;
    total_ = strides_[0] * axes_[0].nodes;
}

std::size_t Grid::index(std::span<const std::size_t> multi) const
{
    std::size_t flat = 0;
    for (std::size_t a = 0; a < axes_.size(); ++a) flat += multi[a] * strides_[a];
    return flat;
}

void Grid::unravel(std::size_t flat, std::span<std::size_t> multi) const
{
    for (std::size_t a = 0; a < axes_.size(); ++a) {
        multi[a] = flat / strides_[a];
        flat %= strides_[a];
    }
}

void Grid::node_point(std::size_t flat, std::span<double> x) const
{
    for (std::size_t a = 0; a < axes_.size(); ++a) {
        const std::size_t k = flat / strides_[a];
        flat %= strides_[a];
        x[a] = coord(a, k);
    }
}

ScalarField::ScalarField(Grid grid, double fill) : grid_(std::move(grid))
{
    if (!std::isfinite(fill)) throw NumericalError("ScalarField: non-finite fill value");
    values_.assign(grid_.total_nodes(), fill);
}

ScalarField::ScalarField(Grid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values))
{
    if (values_.size() != grid_.total_nodes())
        throw ValidationError("ScalarField: value count does not match grid node count");
    validate_finite("ScalarField");
}

void ScalarField::validate_finite(const char* context) const
{
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i]))
            throw NumericalError(std::string(context) + ": non-finite value at node " + std::to_string(i));
    }
}

namespace {
void require_same_grid(const ScalarField& a, const ScalarField& b, const char* op)
{
    if (!(a.grid() == b.grid())) throw ValidationError(std::string(op) + ": grid mismatch");
}
} // namespace

ScalarField field_max(const ScalarField& a, const ScalarField& b)
{
    require_same_grid(a, b, "field_max");
    ScalarField out(a.grid(), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = std::max(a[i], b[i]);
    return out;
}

ScalarField field_min(const ScalarField& a, const ScalarField& b)
{
    require_same_grid(a, b, "field_min");
    ScalarField out(a.grid(), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = std::min(a[i], b[i]);
    return out;
}

double interpolate(const ScalarField& f, std::span<const double> x)
{
    const Grid& g = f.grid();
    const std::size_t dim = g.dim();
    if (x.size() != dim) throw ValidationError("interpolate: point dimension mismatch");

    // Per-axis cell index and fractional offset, with clamping.
    std::size_t cell[8];
    double frac[8];
    std::vector<std::size_t> cell_dyn;
    std::vector<double> frac_dyn;
    std::size_t* ci = cell;
    double* fr = frac;
    if (dim > 8) {
        cell_dyn.resize(dim);
        frac_dyn.resize(dim);
        ci = cell_dyn.data();
        fr = frac_dyn.data();
    }
    for (std::size_t a = 0; a < dim; ++a) {
        const auto& ax = g.axis(a);
        double t = (x[a] - ax.min) / g.spacing(a);
        if (!(t > 0.0)) t = 0.0;
        const double tmax = static_cast<double>(ax.nodes - 1);
        if (t > tmax) t = tmax;
        std::size_t k = static_cast<std::size_t>(t);
        if (k >= ax.nodes - 1) k = ax.nodes - 2;
        double frac = t - static_cast<double>(k);
        // Snap roundoff-sized fractions so queries at node coordinates stay
        // exact.
        if (frac < 1e-12) frac = 0.0;
        else if (frac > 1.0 - 1e-12) {
            if (k + 2 < ax.nodes) {
                ++k;
                frac = 0.0;
            } else {
                frac = 1.0;
            }
        }
        ci[a] = k;
        fr[a] = frac;
    }

    // Accumulate over the 2^dim cell corners.
    const std::size_t corners = std::size_t{1} << dim;
    double acc = 0.0;
    for (std::size_t c = 0; c < corners; ++c) {
        double w = 1.0;
        std::size_t flat = 0;
        for (std::size_t a = 0; a < dim; ++a) {
            const bool hi = (c >> a) & 1u;
            w *= hi ? fr[a] : (1.0 - fr[a]);
            flat += (ci[a] + (hi ? 1 : 0)) * g.stride(a);
        }
        if (w != 0.0) acc += w * f[flat];
    }
    return acc;
}

void one_sided_derivatives(const ScalarField& f, std::size_t axis, ScalarField& dminus, ScalarField& dplus)
{
    const Grid& g = f.grid();
    if (axis >= g.dim()) throw ValidationError("one_sided_derivatives: axis out of range");
    if (!(dminus.grid() == g)) dminus = ScalarField(g, 0.0);
    if (!(dplus.grid() == g)) dplus = ScalarField(g, 0.0);

    const std::size_t n = g.nodes(axis);
    const std::size_t stride = g.stride(axis);
    const double inv_dx = 1.0 / g.spacing(axis);
    for (std::size_t i = 0; i < g.total_nodes(); ++i) {
        const std::size_t k = g.axis_index(i, axis);
        const double back = k > 0 ? (f[i] - f[i - stride]) * inv_dx : 0.0;
        const double fwd = k + 1 < n ? (f[i + stride] - f[i]) * inv_dx : 0.0;
        dminus[i] = k > 0 ? back : fwd;
        dplus[i] = k + 1 < n ? fwd : back;
    }
}

} // namespace hjra
