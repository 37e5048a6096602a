#ifndef HJRA_GRID_HPP
#define HJRA_GRID_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "hjra/errors.hpp"

namespace hjra {

struct AxisSpec {
    double min = 0.0;
    double max = 1.0;
    std::size_t nodes = 2; // >= 2

    bool operator==(const AxisSpec&) const = default;
};

// Uniform Cartesian grid. Node k on an axis sits exactly at min + k*spacing,
// values are linearized row-major with axis 0 slowest.
class Grid {
public:
    Grid() = default;
    explicit Grid(std::vector<AxisSpec> axes);

    std::size_t dim() const { return axes_.size(); }
    std::size_t total_nodes() const { return total_; }
    const AxisSpec& axis(std::size_t a) const { return axes_[a]; }
    const std::vector<AxisSpec>& axes() const { return axes_; }
    std::size_t nodes(std::size_t a) const { return axes_[a].nodes; }
    double spacing(std::size_t a) const { return spacing_[a]; }
    double coord(std::size_t a, std::size_t k) const { return axes_[a].min + static_cast<double>(k) * spacing_[a]; }
    std::size_t stride(std::size_t a) const { return strides_[a]; }

    std::size_t index(std::span<const std::size_t> multi) const;
    void unravel(std::size_t flat, std::span<std::size_t> multi) const;
    // Coordinates of a node by flat index.
    void node_point(std::size_t flat, std::span<double> x) const;

    // Axis index of a flat node along one axis.
    std::size_t axis_index(std::size_t flat, std::size_t a) const { return (flat / strides_[a]) % axes_[a].nodes; }

    bool operator==(const Grid& other) const { return axes_ == other.axes_; }

private:
    std::vector<AxisSpec> axes_;
    std::vector<double> spacing_;
    std::vector<std::size_t> strides_;
    std::size_t total_ = 0;
};

// Nodal scalar data on a grid. Construction and explicit validation reject
// non-finite values; solver loops mutate through values() and re-validate per
// step.
class ScalarField {
public:
    ScalarField() = default;
    ScalarField(Grid grid, double fill);
    ScalarField(Grid grid, std::vector<double> values);

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }

    // Throws NumericalError naming the first offending node.
    void validate_finite(const char* context) const;

private:
    Grid grid_;
    std::vector<double> values_;
};

// Pointwise max/min; grids must match.
ScalarField field_max(const ScalarField& a, const ScalarField& b);
ScalarField field_min(const ScalarField& a, const ScalarField& b);

// Multilinear interpolation, exact at nodes. Coordinates outside the grid are
// clamped to the boundary, which emulates an absorbing boundary for
// trajectory lookups that exit the domain.
double interpolate(const ScalarField& f, std::span<const double> x);

// Backward/forward first differences along one axis. At the low boundary the
// backward difference copies the forward one and vice versa.
void one_sided_derivatives(const ScalarField& f, std::size_t axis, ScalarField& dminus, ScalarField& dplus);

} // namespace hjra

#endif
