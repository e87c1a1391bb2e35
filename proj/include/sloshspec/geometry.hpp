// Copyright 2026 The sloshspec Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SLOSHSPEC_GEOMETRY_HPP
#define SLOSHSPEC_GEOMETRY_HPP

#include <string>
#include <vector>

#include "json.hpp"

namespace sloshspec::geometry {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

enum class Condition { Steklov, Neumann, Dirichlet };

Condition parse_condition(const std::string& name);
std::string condition_name(Condition c);

/// A parametrised curve on t in [0, 1].
struct Curve {
    enum class Kind { Segment, Arc, Polyline, SineGraph };
    Kind kind = Kind::Segment;
    // Segment
    Point a, b;
    // Arc from angle `start` to angle `end` (counterclockwise if end > start).
    Point center;
    double radius = 0.0, start = 0.0, end = 0.0;
    // Polyline, parametrised by cumulative chord length.
    std::vector<Point> points;
    // Graph y = amplitude * sin(wavenumber * x) for x from x_start to x_end.
    double amplitude = 0.0, wavenumber = 0.0, x_start = 0.0, x_end = 0.0;

    static Curve segment(Point a, Point b);
    static Curve arc(Point center, double radius, double start, double end);
    static Curve polyline(std::vector<Point> pts);
    static Curve sine_graph(double amplitude, double wavenumber, double x_start, double x_end);

    Point eval(double t) const;
    /// d/dt of eval.
    Point derivative(double t) const;
    double length() const;
    /// Parameter values at which the curve has a corner (polyline vertices).
    std::vector<double> kinks() const;
};

struct BoundaryPiece {
    Curve curve;
    Condition condition = Condition::Neumann;
};

struct CornerSpec {
    double angle = 0.0;
    Condition condition_adjacent_wall = Condition::Neumann;
};

/// The surface runs from A to B; the walls run from A to B through the fluid
/// bottom, so walls followed by the reversed surface is a counterclockwise loop.
struct SloshingDomain {
    BoundaryPiece sloshing_surface;
    std::vector<BoundaryPiece> walls;
    CornerSpec corner_A;
    CornerSpec corner_B;
    double surface_length = 0.0;

    Point A() const { return sloshing_surface.curve.eval(0.0); }
    Point B() const { return sloshing_surface.curve.eval(1.0); }
};

/// Throws ConfigError when the domain violates its invariants.
void validate(const SloshingDomain& d);

SloshingDomain build_triangle_domain(double alpha, double beta, double surface_length,
                                     Condition wall_A = Condition::Neumann,
                                     Condition wall_B = Condition::Neumann);

SloshingDomain build_curvilinear_example(int sign);

SloshingDomain build_rectangle_domain(double surface_length, double depth);

/// Mirror image across x = L/2 with A and B exchanged.
SloshingDomain mirror(const SloshingDomain& d);

/// Interior angles at A and B measured from the curve tangents.
double measured_angle_A(const SloshingDomain& d);
double measured_angle_B(const SloshingDomain& d);

/// Dense counterclockwise polygon through the boundary (for area and checks).
std::vector<Point> boundary_polygon(const SloshingDomain& d, int per_piece);

nlohmann::json to_json(const SloshingDomain& d);
/// Accepts either the full piece description or a family shorthand
/// ({"family": "triangle" | "curvilinear" | "rectangle", ...}).
SloshingDomain from_json(const nlohmann::json& j);

} // namespace sloshspec::geometry

#endif
