// Copyright 2026 The sloshspec Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "sloshspec/errors.hpp"
#include "sloshspec/geometry.hpp"

using namespace sloshspec;
using namespace sloshspec::geometry;
constexpr double pi = std::numbers::pi;

namespace {

double polygon_area(const std::vector<Point>& poly)
{
    double a2 = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Point p = poly[i], q = poly[(i + 1) % poly.size()];
        a2 += p.x * q.y - q.x * p.y;
    }
    return 0.5 * a2;
}

} // namespace

TEST_CASE("right isosceles triangle has its apex below the midpoint")
{
    const auto d = build_triangle_domain(pi / 4, pi / 4, 1.0);
    REQUIRE(d.walls.size() == 2);
    const Point apex = d.walls[0].curve.eval(1.0);
    CHECK(apex.x == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(apex.y == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(measured_angle_A(d) == doctest::Approx(pi / 4).epsilon(1e-12));
    CHECK(measured_angle_B(d) == doctest::Approx(pi / 4).epsilon(1e-12));
    CHECK(polygon_area(boundary_polygon(d, 4)) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("scalene triangle angles and area follow the law of sines")
{
    const double a = pi / 3, b = pi / 5, L = 2.0;
    const auto d = build_triangle_domain(a, b, L, Condition::Dirichlet, Condition::Neumann);
    CHECK(measured_angle_A(d) == doctest::Approx(a).epsilon(1e-12));
    CHECK(measured_angle_B(d) == doctest::Approx(b).epsilon(1e-12));
    const double side_a = L * std::sin(b) / std::sin(a + b);
    const double area = 0.5 * L * side_a * std::sin(a);
    CHECK(polygon_area(boundary_polygon(d, 2)) == doctest::Approx(area).epsilon(1e-13));
    CHECK(d.walls[0].condition == Condition::Dirichlet);
    CHECK(d.corner_A.condition_adjacent_wall == Condition::Dirichlet);
}

TEST_CASE("invalid triangles are rejected naming the field")
{
    CHECK_THROWS_AS(build_triangle_domain(0.0, pi / 4, 1.0), ConfigError);
    CHECK_THROWS_AS(build_triangle_domain(pi / 2, pi / 2, 1.0), ConfigError);
    CHECK_THROWS_AS(build_triangle_domain(pi / 4, pi / 4, -1.0), ConfigError);
    CHECK_THROWS_AS(build_triangle_domain(std::nan(""), pi / 4, 1.0), ConfigError);
    try {
        build_triangle_domain(pi / 4, pi / 4, 0.0);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.field()).find("length") != std::string::npos);
    }
}

TEST_CASE("curvilinear example has the advertised corners and surface length")
{
    for (int sign : {1, -1}) {
        const auto d = build_curvilinear_example(sign);
        CHECK_NOTHROW(validate(d));
        // Length of y = sin(2 pi x) / (2 pi) over [0, 1].
        CHECK(d.surface_length == doctest::Approx(1.21601).epsilon(1e-5));
        CHECK(measured_angle_A(d) == doctest::Approx(sign > 0 ? 0.75 * pi : 0.25 * pi).epsilon(1e-10));
        CHECK(measured_angle_B(d) == doctest::Approx(sign > 0 ? 0.25 * pi : 0.75 * pi).epsilon(1e-10));
        CHECK(d.walls[0].condition == Condition::Neumann);
        CHECK(d.walls[1].condition == Condition::Dirichlet);
        // The surface integral of sin vanishes, so the area is that of the half disc.
        CHECK(polygon_area(boundary_polygon(d, 4000)) == doctest::Approx(pi / 8).epsilon(1e-6));
    }
}

TEST_CASE("rectangle domain")
{
    const auto d = build_rectangle_domain(1.0, 1.0);
    CHECK_NOTHROW(validate(d));
    CHECK(d.walls.size() == 3);
    CHECK(measured_angle_A(d) == doctest::Approx(pi / 2));
    CHECK(polygon_area(boundary_polygon(d, 1)) == doctest::Approx(1.0));
}

TEST_CASE("mirroring swaps the corners and is an involution")
{
    const auto d = build_triangle_domain(pi / 3, pi / 5, 1.5, Condition::Dirichlet, Condition::Neumann);
    const auto m = mirror(d);
    CHECK_NOTHROW(validate(m));
    CHECK(measured_angle_A(m) == doctest::Approx(pi / 5).epsilon(1e-12));
    CHECK(measured_angle_B(m) == doctest::Approx(pi / 3).epsilon(1e-12));
    CHECK(m.corner_B.condition_adjacent_wall == Condition::Dirichlet);
    const auto mm = mirror(m);
    const auto p = boundary_polygon(d, 8), q = boundary_polygon(mm, 8);
    REQUIRE(p.size() == q.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        CHECK(p[i].x == doctest::Approx(q[i].x).epsilon(1e-14));
        CHECK(p[i].y == doctest::Approx(q[i].y).epsilon(1e-14));
    }
    const auto c = mirror(build_curvilinear_example(1));
    CHECK(measured_angle_A(c) == doctest::Approx(0.25 * pi).epsilon(1e-10));
    CHECK(c.corner_A.condition_adjacent_wall == Condition::Dirichlet);
}

TEST_CASE("validation rejects inconsistent domains")
{
    auto d = build_triangle_domain(pi / 4, pi / 4, 1.0);
    auto wrong_angle = d;
    wrong_angle.corner_A.angle = pi / 3;
    CHECK_THROWS_AS(validate(wrong_angle), ConfigError);
    auto wrong_length = d;
    wrong_length.surface_length = 1.1;
    CHECK_THROWS_AS(validate(wrong_length), ConfigError);
    auto open = d;
    open.walls[1].curve = Curve::segment({0.5, -0.5}, {0.9, 0.0});
    CHECK_THROWS_AS(validate(open), ConfigError);
    auto wrong_condition = d;
    wrong_condition.corner_B.condition_adjacent_wall = Condition::Dirichlet;
    CHECK_THROWS_AS(validate(wrong_condition), ConfigError);
    auto clockwise = d;
    clockwise.walls = {{Curve::segment({0.0, 0.0}, {0.5, 0.5}), Condition::Neumann},
                       {Curve::segment({0.5, 0.5}, {1.0, 0.0}), Condition::Neumann}};
    CHECK_THROWS_AS(validate(clockwise), ConfigError);
}

TEST_CASE("json round trip and family shorthands")
{
    for (const auto& d : {build_triangle_domain(pi / 3, pi / 5, 2.0, Condition::Dirichlet, Condition::Neumann),
                          build_curvilinear_example(-1), build_rectangle_domain(2.0, 0.5)}) {
        const auto j = to_json(d);
        const auto back = from_json(j);
        CHECK(to_json(back).dump() == j.dump());
        CHECK(back.surface_length == doctest::Approx(d.surface_length).epsilon(1e-14));
    }
    const auto t = from_json(nlohmann::json{{"family", "triangle"}, {"alpha", pi / 4}, {"beta", pi / 4},
                                            {"length", 1.0}, {"walls", {"neumann", "neumann"}}});
    CHECK(t.walls[0].curve.eval(1.0).y == doctest::Approx(-0.5));
    CHECK_THROWS_AS(from_json(nlohmann::json{{"family", "hexagon"}}), ConfigError);
    CHECK_THROWS_AS(from_json(nlohmann::json{{"family", "triangle"}, {"alpha", "x"}}), ConfigError);
}
