#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "hjra/geometry.hpp"
#include "hjra/grid.hpp"

using namespace hjra;

TEST_CASE("grid layout and coordinates")
{
    Grid g({{-2.0, 2.0, 5}, {0.0, 1.0, 3}});
    CHECK(g.dim() == 2);
    CHECK(g.total_nodes() == 15);
    CHECK(g.spacing(0) == doctest::Approx(1.0));
    CHECK(g.spacing(1) == doctest::Approx(0.5));
    CHECK(g.coord(0, 0) == -2.0);
    CHECK(g.coord(0, 4) == 2.0);

    // Row-major, axis 0 slowest.
    const std::size_t multi[2] = {3, 2};
    CHECK(g.index(multi) == 3 * 3 + 2);
    std::size_t back[2];
    g.unravel(11, back);
    CHECK(back[0] == 3);
    CHECK(back[1] == 2);

    CHECK_THROWS_AS(Grid({{1.0, 1.0, 4}}), ValidationError);
    CHECK_THROWS_AS(Grid({{0.0, 1.0, 1}}), ValidationError);
}

TEST_CASE("scalar field rejects non-finite values")
{
    Grid g({{0.0, 1.0, 3}});
    CHECK_THROWS_AS(ScalarField(g, std::vector<double>{0.0, std::nan(""), 1.0}), NumericalError);
    ScalarField f(g, std::vector<double>{0.0, 0.5, 1.0});
    f[1] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(f.validate_finite("test"), NumericalError);
}

TEST_CASE("implicit box field is the exact signed distance")
{
    Grid g({{-2.0, 2.0, 9}}); // nodes at -2, -1.5, ..., 2
    auto field = implicit_field(g, GeometrySpec::box({-0.5}, {0.5}));
    CHECK(field[4] == doctest::Approx(-0.5)); // x = 0, center
    CHECK(field[7] == doctest::Approx(1.0));  // x = 1.5, exterior
    CHECK(field[0] == doctest::Approx(1.5));  // x = -2
}

TEST_CASE("union takes pointwise min, intersection max, complement negates")
{
    Grid g({{-3.0, 3.0, 13}});
    auto left = GeometrySpec::box({-2.0}, {-1.0});
    auto right = GeometrySpec::box({1.0}, {2.0});
    auto u = implicit_field(g, GeometrySpec::unite({left, right}));
    // x = 0 is equidistant (1.0) from both boxes.
    CHECK(u[6] == doctest::Approx(1.0));
    auto isect = implicit_field(g, GeometrySpec::intersect({left, right}));
    auto fa = implicit_field(g, left);
    auto fb = implicit_field(g, right);
    for (std::size_t i = 0; i < g.total_nodes(); ++i) {
        CHECK(u[i] == doctest::Approx(std::min(fa[i], fb[i])));
        CHECK(isect[i] == doctest::Approx(std::max(fa[i], fb[i])));
    }
    auto comp = implicit_field(g, GeometrySpec::complement(left));
    for (std::size_t i = 0; i < g.total_nodes(); ++i) CHECK(comp[i] == doctest::Approx(-fa[i]));

    CHECK_THROWS_AS(implicit_field(g, GeometrySpec::unite({})), ValidationError);
}

TEST_CASE("implicit field sign convention: negative strictly inside, positive strictly outside")
{
    Grid g({{-1.0, 1.0, 21}, {-1.0, 1.0, 21}});
    auto box = GeometrySpec::box({-0.4, -0.3}, {0.4, 0.3});
    auto f = implicit_field(g, box);
    std::vector<double> x(2);
    for (std::size_t i = 0; i < g.total_nodes(); ++i) {
        g.node_point(i, x);
        const bool strictly_inside =
            x[0] > -0.4 && x[0] < 0.4 && x[1] > -0.3 && x[1] < 0.3;
        const bool strictly_outside =
            x[0] < -0.4 || x[0] > 0.4 || x[1] < -0.3 || x[1] > 0.3;
        if (strictly_inside) CHECK(f[i] < 0.0);
        if (strictly_outside) CHECK(f[i] > 0.0);
    }
}

TEST_CASE("cylinder signed distance")
{
    Grid g({{-2.0, 2.0, 5}, {-2.0, 2.0, 5}});
    auto cyl = GeometrySpec::cylinder(1, {0.0, 0.0}, 1.0, 0.5);
    auto f = implicit_field(g, cyl);
    std::vector<double> x(2);
    for (std::size_t i = 0; i < g.total_nodes(); ++i) {
        g.node_point(i, x);
        const double dr = std::abs(x[0]) - 1.0;
        const double dz = std::abs(x[1]) - 0.5;
        const double expect =
            (dr > 0.0 || dz > 0.0) ? std::hypot(std::max(dr, 0.0), std::max(dz, 0.0)) : std::max(dr, dz);
        CHECK(f[i] == doctest::Approx(expect));
    }
}

TEST_CASE("interpolation: exact at nodes, linear between, clamped outside")
{
    Grid g({{0.0, 1.0, 3}});
    ScalarField f(g, std::vector<double>{2.0, 4.0, 8.0});
    const double q0[1] = {0.5};
    CHECK(interpolate(f, q0) == doctest::Approx(4.0));
    const double q1[1] = {0.25};
    CHECK(interpolate(f, q1) == doctest::Approx(3.0)); // midpoint of nodes valued 2 and 4
    const double q2[1] = {7.5};
    CHECK(interpolate(f, q2) == doctest::Approx(8.0)); // beyond max clamps to the boundary node
    const double q3[1] = {-3.0};
    CHECK(interpolate(f, q3) == doctest::Approx(2.0));
}

TEST_CASE("interpolation stays within the surrounding cell's corner range")
{
    Grid g({{-1.0, 1.0, 7}, {-1.0, 1.0, 5}});
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> val(-5.0, 5.0);
    std::vector<double> values(g.total_nodes());
    for (auto& v : values) v = val(rng);
    ScalarField f(g, values);

    std::uniform_real_distribution<double> px(-1.3, 1.3);
    double lo = *std::min_element(values.begin(), values.end());
    double hi = *std::max_element(values.begin(), values.end());
    for (int k = 0; k < 500; ++k) {
        const double q[2] = {px(rng), px(rng)};
        const double v = interpolate(f, q);
        CHECK(v >= lo - 1e-12);
        CHECK(v <= hi + 1e-12);
    }
}

TEST_CASE("one-sided derivatives")
{
    Grid g({{-1.0, 1.0, 9}});
    SUBCASE("linear field: both slopes equal m everywhere")
    {
        std::vector<double> values(9);
        for (std::size_t i = 0; i < 9; ++i) values[i] = 3.0 * g.coord(0, i) + 1.0;
        ScalarField f(g, values), dm, dp;
        one_sided_derivatives(f, 0, dm, dp);
        for (std::size_t i = 0; i < 9; ++i) {
            CHECK(dm[i] == doctest::Approx(3.0));
            CHECK(dp[i] == doctest::Approx(3.0));
        }
    }
    SUBCASE("constant field: both zero")
    {
        ScalarField f(g, 4.2), dm, dp;
        one_sided_derivatives(f, 0, dm, dp);
        for (std::size_t i = 0; i < 9; ++i) {
            CHECK(dm[i] == 0.0);
            CHECK(dp[i] == 0.0);
        }
    }
    SUBCASE("|x| kink: one-sided slopes -1 and +1 at the kink node")
    {
        std::vector<double> values(9);
        for (std::size_t i = 0; i < 9; ++i) values[i] = std::abs(g.coord(0, i));
        ScalarField f(g, values), dm, dp;
        one_sided_derivatives(f, 0, dm, dp);
        CHECK(dm[4] == doctest::Approx(-1.0));
        CHECK(dp[4] == doctest::Approx(1.0));
    }
    SUBCASE("interior identity D-(k) == D+(k-1)")
    {
        std::mt19937 rng(3);
        std::uniform_real_distribution<double> val(-2.0, 2.0);
        std::vector<double> values(9);
        for (auto& v : values) v = val(rng);
        ScalarField f(g, values), dm, dp;
        one_sided_derivatives(f, 0, dm, dp);
        for (std::size_t k = 1; k < 9; ++k) CHECK(dm[k] == doctest::Approx(dp[k - 1]));
    }
}

TEST_CASE("field max/min")
{
    Grid g({{0.0, 1.0, 5}});
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    std::vector<double> va(5), vb(5);
    for (auto& v : va) v = val(rng);
    for (auto& v : vb) v = val(rng);
    ScalarField a(g, va), b(g, vb);

    auto m = field_max(a, a);
    for (std::size_t i = 0; i < 5; ++i) CHECK(m[i] == a[i]); // idempotent

    ScalarField low(g, -1e9);
    auto ident = field_max(a, low);
    for (std::size_t i = 0; i < 5; ++i) CHECK(ident[i] == a[i]); // -inf-like fill is the identity

    // De Morgan: -max(-a, -b) == min(a, b).
    ScalarField na(g, va), nb(g, vb);
    for (std::size_t i = 0; i < 5; ++i) {
        na[i] = -va[i];
        nb[i] = -vb[i];
    }
    auto lhs = field_max(na, nb);
    auto rhs = field_min(a, b);
    for (std::size_t i = 0; i < 5; ++i) CHECK(-lhs[i] == rhs[i]);

    Grid g2({{0.0, 1.0, 4}});
    ScalarField c(g2, 0.0);
    CHECK_THROWS_AS(field_max(a, c), ValidationError);
}
