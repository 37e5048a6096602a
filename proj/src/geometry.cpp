#include "hjra/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace hjra {

GeometrySpec GeometrySpec::box(std::vector<double> lower, std::vector<double> upper)
{
    GeometrySpec g;
    g.kind = Kind::Box;
    g.lower = std::move(lower);
    g.upper = std::move(upper);
    return g;
}

GeometrySpec GeometrySpec::cylinder(std::size_t axis, std::vector<double> center, double radius, double half_height)
{
    GeometrySpec g;
    g.kind = Kind::Cylinder;
    g.axis = axis;
    g.center = std::move(center);
    g.radius = radius;
    g.half_height = half_height;
    return g;
}

GeometrySpec GeometrySpec::unite(std::vector<GeometrySpec> parts)
{
    GeometrySpec g;
    g.kind = Kind::Union;
    g.children = std::move(parts);
    return g;
}

GeometrySpec GeometrySpec::intersect(std::vector<GeometrySpec> parts)
{
    GeometrySpec g;
    g.kind = Kind::Intersection;
    g.children = std::move(parts);
    return g;
}

GeometrySpec GeometrySpec::complement(GeometrySpec inner)
{
    GeometrySpec g;
    g.kind = Kind::Complement;
    g.children.push_back(std::move(inner));
    return g;
}

void validate_geometry(const GeometrySpec& geom, std::size_t dim)
{
    switch (geom.kind) {
    case GeometrySpec::Kind::Box:
        if (geom.lower.size() != dim || geom.upper.size() != dim)
            throw ValidationError("geometry: box bounds do not match grid dimension");
        for (std::size_t a = 0; a < dim; ++a)
            if (!(geom.lower[a] <= geom.upper[a]))
                throw ValidationError("geometry: box lower > upper on axis " + std::to_string(a));
        break;
    case GeometrySpec::Kind::Cylinder:
        if (geom.center.size() != dim)
            throw ValidationError("geometry: cylinder center does not match grid dimension");
        if (geom.axis >= dim) throw ValidationError("geometry: cylinder axis out of range");
        if (dim < 2) throw ValidationError("geometry: cylinder needs dimension >= 2");
        if (!(geom.radius > 0.0) || !(geom.half_height > 0.0))
            throw ValidationError("geometry: cylinder radius and half_height must be positive");
        break;
    case GeometrySpec::Kind::Union:
    case GeometrySpec::Kind::Intersection:
        if (geom.children.empty())
            throw ValidationError(geom.kind == GeometrySpec::Kind::Union ? "geometry: empty union"
                                                                         : "geometry: empty intersection");
        for (const auto& c : geom.children) validate_geometry(c, dim);
        break;
    case GeometrySpec::Kind::Complement:
        if (geom.children.size() != 1) throw ValidationError("geometry: complement needs exactly one child");
        validate_geometry(geom.children.front(), dim);
        break;
    }
}

namespace {

double box_distance(const GeometrySpec& g, std::span<const double> x)
{
    // Exact signed distance: positive outside, negative inside.
    double inside = -std::numeric_limits<double>::infinity();
    double outside_sq = 0.0;
    for (std::size_t a = 0; a < x.size(); ++a) {
        const double q = std::max(g.lower[a] - x[a], x[a] - g.upper[a]);
        inside = std::max(inside, q);
        if (q > 0.0) outside_sq += q * q;
    }
    return outside_sq > 0.0 ? std::sqrt(outside_sq) : inside;
}

double cylinder_distance(const GeometrySpec& g, std::span<const double> x)
{
    double radial_sq = 0.0;
    for (std::size_t a = 0; a < x.size(); ++a) {
        if (a == g.axis) continue;
        const double d = x[a] - g.center[a];
        radial_sq += d * d;
    }
    const double dr = std::sqrt(radial_sq) - g.radius;
    const double dz = std::abs(x[g.axis] - g.center[g.axis]) - g.half_height;
    const double outside = std::hypot(std::max(dr, 0.0), std::max(dz, 0.0));
    return outside > 0.0 ? outside : std::max(dr, dz);
}

} // namespace

double signed_value(const GeometrySpec& geom, std::span<const double> x)
{
    switch (geom.kind) {
    case GeometrySpec::Kind::Box:
        return box_distance(geom, x);
    case GeometrySpec::Kind::Cylinder:
        return cylinder_distance(geom, x);
    case GeometrySpec::Kind::Union: {
        double v = std::numeric_limits<double>::infinity();
        for (const auto& c : geom.children) v = std::min(v, signed_value(c, x));
        return v;
    }
    case GeometrySpec::Kind::Intersection: {
        double v = -std::numeric_limits<double>::infinity();
        for (const auto& c : geom.children) v = std::max(v, signed_value(c, x));
        return v;
    }
    case GeometrySpec::Kind::Complement:
        return -signed_value(geom.children.front(), x);
    }
    return 0.0;
}

ScalarField implicit_field(const Grid& grid, const GeometrySpec& geom)
{
    validate_geometry(geom, grid.dim());
    ScalarField out(grid, 0.0);
    std::vector<double> x(grid.dim());
    for (std::size_t i = 0; i < grid.total_nodes(); ++i) {
        grid.node_point(i, x);
        out[i] = signed_value(geom, x);
    }
    return out;
}

} // namespace hjra
