#ifndef HJRA_GEOMETRY_HPP
#define HJRA_GEOMETRY_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "hjra/grid.hpp"

namespace hjra {

// Constructive implicit geometry. Value <= 0 inside the set, > 0 outside.
// Boxes and cylinders evaluate to the exact signed distance; min/max
// combinations stay valid level-set functions but not true distances, which
// is enough because only the zero level carries meaning.
struct GeometrySpec {
    enum class Kind { Box, Cylinder, Union, Intersection, Complement };

    Kind kind = Kind::Box;
    std::vector<double> lower, upper;       // Box
    std::size_t axis = 0;                   // Cylinder height axis
    std::vector<double> center;             // Cylinder center point
    double radius = 0.0, half_height = 0.0; // Cylinder extents
    std::vector<GeometrySpec> children;     // Union / Intersection / Complement

    static GeometrySpec box(std::vector<double> lower, std::vector<double> upper);
    static GeometrySpec cylinder(std::size_t axis, std::vector<double> center, double radius, double half_height);
    static GeometrySpec unite(std::vector<GeometrySpec> parts);
    static GeometrySpec intersect(std::vector<GeometrySpec> parts);
    static GeometrySpec complement(GeometrySpec inner);
};

// Throws ValidationError when the tree is inconsistent with `dim`.
void validate_geometry(const GeometrySpec& geom, std::size_t dim);

double signed_value(const GeometrySpec& geom, std::span<const double> x);

ScalarField implicit_field(const Grid& grid, const GeometrySpec& geom);

} // namespace hjra

#endif
