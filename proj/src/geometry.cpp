// Copyright 2026 The sloshspec Authors
// SPDX-License-Identifier: Apache-2.0

#include "sloshspec/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sloshspec/errors.hpp"
#include "sloshspec/quadrature.hpp"

namespace sloshspec::geometry {

namespace {

constexpr double pi = std::numbers::pi;

double dist(Point p, Point q) { return std::hypot(p.x - q.x, p.y - q.y); }

double wrap_positive(double a)
{
    a = std::fmod(a, 2.0 * pi);
    return a < 0.0 ? a + 2.0 * pi : a;
}

double orient(Point a, Point b, Point c) { return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x); }

bool segments_cross(Point p1, Point p2, Point q1, Point q2)
{
    const double d1 = orient(q1, q2, p1), d2 = orient(q1, q2, p2);
    const double d3 = orient(p1, p2, q1), d4 = orient(p1, p2, q2);
    // Near-collinear configurations are not counted as crossings.
    const double eps = 1e-12 * dist(p1, p2) * dist(q1, q2);
    for (double v : {d1, d2, d3, d4})
        if (std::abs(v) <= eps) return false;
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

std::vector<double> chord_params(const std::vector<Point>& pts)
{
    std::vector<double> s(pts.size(), 0.0);
    for (std::size_t i = 1; i < pts.size(); ++i) s[i] = s[i - 1] + dist(pts[i - 1], pts[i]);
    for (auto& v : s) v /= s.back();
    return s;
}

Point point_from_json(const nlohmann::json& j, const char* field)
{
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ConfigError(field, "expected [x, y]");
    return {j[0].get<double>(), j[1].get<double>()};
}

nlohmann::json point_to_json(Point p) { return nlohmann::json::array({p.x, p.y}); }

double number(const nlohmann::json& j, const char* key)
{
    if (!j.contains(key) || !j[key].is_number()) throw ConfigError(key, "missing or not a number");
    return j[key].get<double>();
}

Curve curve_from_json(const nlohmann::json& j)
{
    if (!j.contains("type") || !j["type"].is_string()) throw ConfigError("curve.type", "missing");
    const auto type = j["type"].get<std::string>();
    if (type == "segment") return Curve::segment(point_from_json(j.at("a"), "curve.a"), point_from_json(j.at("b"), "curve.b"));
    if (type == "arc")
        return Curve::arc(point_from_json(j.at("center"), "curve.center"), number(j, "radius"), number(j, "start"),
                          number(j, "end"));
    if (type == "polyline") {
        std::vector<Point> pts;
        if (!j.contains("points") || !j["points"].is_array()) throw ConfigError("curve.points", "missing");
        for (const auto& p : j["points"]) pts.push_back(point_from_json(p, "curve.points"));
        return Curve::polyline(std::move(pts));
    }
    if (type == "sine_graph")
        return Curve::sine_graph(number(j, "amplitude"), number(j, "wavenumber"), number(j, "x_start"),
                                 number(j, "x_end"));
    throw ConfigError("curve.type", "unknown curve type '" + type + "'");
}

nlohmann::json curve_to_json(const Curve& c)
{
    switch (c.kind) {
    case Curve::Kind::Segment: return {{"type", "segment"}, {"a", point_to_json(c.a)}, {"b", point_to_json(c.b)}};
    case Curve::Kind::Arc:
        return {{"type", "arc"}, {"center", point_to_json(c.center)}, {"radius", c.radius}, {"start", c.start}, {"end", c.end}};
    case Curve::Kind::Polyline: {
        nlohmann::json pts = nlohmann::json::array();
        for (auto p : c.points) pts.push_back(point_to_json(p));
        return {{"type", "polyline"}, {"points", pts}};
    }
    case Curve::Kind::SineGraph:
        return {{"type", "sine_graph"}, {"amplitude", c.amplitude}, {"wavenumber", c.wavenumber},
                {"x_start", c.x_start}, {"x_end", c.x_end}};
    }
    return {};
}

Point direction(Point d)
{
    const double n = std::hypot(d.x, d.y);
    return {d.x / n, d.y / n};
}

} // namespace

Condition parse_condition(const std::string& name)
{
    if (name == "steklov") return Condition::Steklov;
    if (name == "neumann" || name == "N") return Condition::Neumann;
    if (name == "dirichlet" || name == "D") return Condition::Dirichlet;
    throw ConfigError("condition", "unknown condition '" + name + "'");
}

std::string condition_name(Condition c)
{
    switch (c) {
    case Condition::Steklov: return "steklov";
    case Condition::Neumann: return "neumann";
    case Condition::Dirichlet: return "dirichlet";
    }
    return "?";
}

Curve Curve::segment(Point a, Point b)
{
    require(dist(a, b) > 0.0, "curve", "segment has zero length");
    Curve c;
    c.kind = Kind::Segment;
    c.a = a;
    c.b = b;
    return c;
}

Curve Curve::arc(Point center, double radius, double start, double end)
{
    require(std::isfinite(radius) && radius > 0.0, "curve.radius", "must be positive");
    require(std::isfinite(start) && std::isfinite(end) && start != end, "curve.end", "arc has zero length");
    require(std::abs(end - start) <= 2.0 * pi, "curve.end", "arc spans more than a full turn");
    Curve c;
    c.kind = Kind::Arc;
    c.center = center;
    c.radius = radius;
    c.start = start;
    c.end = end;
    return c;
}

Curve Curve::polyline(std::vector<Point> pts)
{
    require(pts.size() >= 2, "curve.points", "polyline needs at least two points");
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            require(dist(pts[i], pts[j]) > 0.0, "curve.points", "polyline points must be distinct");
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        for (std::size_t j = i + 2; j + 1 < pts.size(); ++j)
            require(!segments_cross(pts[i], pts[i + 1], pts[j], pts[j + 1]), "curve.points",
                    "polyline self-intersects");
    Curve c;
    c.kind = Kind::Polyline;
    c.points = std::move(pts);
    return c;
}

Curve Curve::sine_graph(double amplitude, double wavenumber, double x_start, double x_end)
{
    require(std::isfinite(amplitude) && std::isfinite(wavenumber), "curve", "non-finite graph parameters");
    require(std::isfinite(x_start) && std::isfinite(x_end) && x_start != x_end, "curve.x_end",
            "graph has zero length");
    Curve c;
    c.kind = Kind::SineGraph;
    c.amplitude = amplitude;
    c.wavenumber = wavenumber;
    c.x_start = x_start;
    c.x_end = x_end;
    return c;
}

Point Curve::eval(double t) const
{
    switch (kind) {
    case Kind::Segment:
        if (t == 1.0) return b;
        return {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
    case Kind::Arc: {
        const double th = start + t * (end - start);
        return {center.x + radius * std::cos(th), center.y + radius * std::sin(th)};
    }
    case Kind::Polyline: {
        if (t <= 0.0) return points.front();
        if (t >= 1.0) return points.back();
        const auto s = chord_params(points);
        const auto it = std::upper_bound(s.begin(), s.end(), t);
        const std::size_t i = static_cast<std::size_t>(it - s.begin()) - 1;
        const double u = (t - s[i]) / (s[i + 1] - s[i]);
        return {points[i].x + u * (points[i + 1].x - points[i].x), points[i].y + u * (points[i + 1].y - points[i].y)};
    }
    case Kind::SineGraph: {
        const double x = t == 1.0 ? x_end : x_start + t * (x_end - x_start);
        return {x, amplitude * std::sin(wavenumber * x)};
    }
    }
    return {};
}

Point Curve::derivative(double t) const
{
    switch (kind) {
    case Kind::Segment: return {b.x - a.x, b.y - a.y};
    case Kind::Arc: {
        const double th = start + t * (end - start);
        const double d = end - start;
        return {-radius * std::sin(th) * d, radius * std::cos(th) * d};
    }
    case Kind::Polyline: {
        const auto s = chord_params(points);
        std::size_t i = static_cast<std::size_t>(std::upper_bound(s.begin(), s.end(), t) - s.begin());
        i = std::clamp<std::size_t>(i, 1, points.size() - 1) - 1;
        const double ds = s[i + 1] - s[i];
        return {(points[i + 1].x - points[i].x) / ds, (points[i + 1].y - points[i].y) / ds};
    }
    case Kind::SineGraph: {
        const double x = x_start + t * (x_end - x_start);
        const double dx = x_end - x_start;
        return {dx, amplitude * wavenumber * std::cos(wavenumber * x) * dx};
    }
    }
    return {};
}

double Curve::length() const
{
    switch (kind) {
    case Kind::Segment: return dist(a, b);
    case Kind::Arc: return radius * std::abs(end - start);
    case Kind::Polyline: {
        double s = 0.0;
        for (std::size_t i = 1; i < points.size(); ++i) s += dist(points[i - 1], points[i]);
        return s;
    }
    case Kind::SineGraph: {
        // Split at the extrema of the slope so each panel is smooth and short.
        const double span = std::abs(x_end - x_start);
        const int panels = std::max(8, static_cast<int>(std::ceil(span * std::abs(wavenumber) / pi * 4.0)));
        std::vector<double> breaks(panels + 1);
        for (int i = 0; i <= panels; ++i) breaks[i] = static_cast<double>(i) / panels;
        auto f = [this](double t) {
            const Point d = derivative(t);
            return std::complex<double>(std::hypot(d.x, d.y), 0.0);
        };
        return quad::integrate(f, breaks, 1e-15, 1e-15).value.real();
    }
    }
    return 0.0;
}

std::vector<double> Curve::kinks() const
{
    if (kind != Kind::Polyline) return {};
    auto s = chord_params(points);
    return std::vector<double>(s.begin() + 1, s.end() - 1);
}

std::vector<Point> boundary_polygon(const SloshingDomain& d, int per_piece)
{
    std::vector<Point> poly;
    auto add = [&](const Curve& c, bool reverse) {
        std::vector<double> ts;
        for (int i = 0; i < per_piece; ++i) ts.push_back(static_cast<double>(i) / per_piece);
        for (double k : c.kinks()) ts.push_back(k);
        std::sort(ts.begin(), ts.end());
        if (reverse) {
            for (auto& t : ts) t = 1.0 - t;
            std::sort(ts.begin(), ts.end());
            std::reverse(ts.begin(), ts.end());
            ts.pop_back();
            ts.insert(ts.begin(), 1.0);
        }
        for (double t : ts) poly.push_back(c.eval(t));
    };
    for (const auto& w : d.walls) add(w.curve, false);
    add(d.sloshing_surface.curve, true);
    return poly;
}

double measured_angle_A(const SloshingDomain& d)
{
    const Point ds = direction(d.sloshing_surface.curve.derivative(0.0));
    const Point dw = direction(d.walls.front().curve.derivative(0.0));
    return wrap_positive(std::atan2(ds.y, ds.x) - std::atan2(dw.y, dw.x));
}

double measured_angle_B(const SloshingDomain& d)
{
    const Point ts = d.sloshing_surface.curve.derivative(1.0);
    const Point tw = d.walls.back().curve.derivative(1.0);
    const Point ds = direction({-ts.x, -ts.y});
    const Point dw = direction({-tw.x, -tw.y});
    return wrap_positive(std::atan2(dw.y, dw.x) - std::atan2(ds.y, ds.x));
}

void validate(const SloshingDomain& d)
{
    require(d.sloshing_surface.condition == Condition::Steklov, "sloshing_surface.condition", "must be steklov");
    require(!d.walls.empty(), "walls", "at least one wall piece is required");
    for (const auto& w : d.walls)
        require(w.condition != Condition::Steklov, "walls.condition", "exactly one Steklov piece is allowed");
    for (const auto& w : d.walls) require(w.curve.length() > 0.0, "walls.curve", "wall has zero length");

    const double scale = std::max(1.0, d.sloshing_surface.curve.length());
    const double tol = 1e-9 * scale;
    require(dist(d.walls.front().curve.eval(0.0), d.A()) < tol, "walls", "first wall must start at A");
    require(dist(d.walls.back().curve.eval(1.0), d.B()) < tol, "walls", "last wall must end at B");
    for (std::size_t i = 0; i + 1 < d.walls.size(); ++i)
        require(dist(d.walls[i].curve.eval(1.0), d.walls[i + 1].curve.eval(0.0)) < tol, "walls",
                "consecutive wall pieces must share endpoints");

    const auto poly = boundary_polygon(d, 96);
    double area2 = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Point p = poly[i], q = poly[(i + 1) % poly.size()];
        area2 += p.x * q.y - q.x * p.y;
    }
    require(area2 > 0.0, "walls", "boundary loop must be positively oriented (walls below the surface)");
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue;
            require(!segments_cross(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]), "walls",
                    "boundary loop is not simple");
        }

    const double len = d.sloshing_surface.curve.length();
    require(std::abs(d.surface_length - len) <= 1e-10 * len, "surface_length",
            "does not match the arc length of the Steklov piece");
    for (auto [c, measured, name] : {std::tuple{d.corner_A, measured_angle_A(d), "corner_A.angle"},
                                     std::tuple{d.corner_B, measured_angle_B(d), "corner_B.angle"}}) {
        require(c.angle > 0.0 && c.angle < pi, name, "corner angle must lie in (0, pi)");
        require(std::abs(c.angle - measured) < 1e-9, name, "does not match the boundary tangents");
    }
    require(d.corner_A.condition_adjacent_wall == d.walls.front().condition, "corner_A.condition",
            "does not match the first wall");
    require(d.corner_B.condition_adjacent_wall == d.walls.back().condition, "corner_B.condition",
            "does not match the last wall");
}

SloshingDomain build_triangle_domain(double alpha, double beta, double surface_length, Condition wall_A,
                                     Condition wall_B)
{
    require(std::isfinite(alpha) && alpha > 0.0, "alpha", "must be positive");
    require(std::isfinite(beta) && beta > 0.0, "beta", "must be positive");
    require(alpha + beta < pi, "alpha", "alpha + beta must be below pi");
    require(std::isfinite(surface_length) && surface_length > 0.0, "surface_length", "must be positive");
    require(wall_A != Condition::Steklov && wall_B != Condition::Steklov, "walls", "walls cannot be Steklov");
    const double L = surface_length;
    // Law of sines: |AZ| = L sin(beta) / sin(alpha + beta).
    const double az = L * std::sin(beta) / std::sin(alpha + beta);
    Point z{az * std::cos(alpha), -az * std::sin(alpha)};
    if (std::abs(alpha - beta) < 1e-15) z.x = 0.5 * L;
    SloshingDomain d;
    d.sloshing_surface = {Curve::segment({0.0, 0.0}, {L, 0.0}), Condition::Steklov};
    d.walls = {{Curve::segment({0.0, 0.0}, z), wall_A}, {Curve::segment(z, {L, 0.0}), wall_B}};
    d.corner_A = {alpha, wall_A};
    d.corner_B = {beta, wall_B};
    d.surface_length = L;
    return d;
}

SloshingDomain build_curvilinear_example(int sign)
{
    require(sign == 1 || sign == -1, "sign", "must be +1 or -1");
    SloshingDomain d;
    d.sloshing_surface = {Curve::sine_graph(sign / (2.0 * pi), 2.0 * pi, 0.0, 1.0), Condition::Steklov};
    d.walls = {{Curve::arc({0.5, 0.0}, 0.5, pi, 1.5 * pi), Condition::Neumann},
               {Curve::arc({0.5, 0.0}, 0.5, 1.5 * pi, 2.0 * pi), Condition::Dirichlet}};
    d.corner_A = {sign > 0 ? 0.75 * pi : 0.25 * pi, Condition::Neumann};
    d.corner_B = {sign > 0 ? 0.25 * pi : 0.75 * pi, Condition::Dirichlet};
    d.surface_length = d.sloshing_surface.curve.length();
    return d;
}

SloshingDomain build_rectangle_domain(double surface_length, double depth)
{
    require(std::isfinite(surface_length) && surface_length > 0.0, "surface_length", "must be positive");
    require(std::isfinite(depth) && depth > 0.0, "depth", "must be positive");
    const double L = surface_length;
    SloshingDomain d;
    d.sloshing_surface = {Curve::segment({0.0, 0.0}, {L, 0.0}), Condition::Steklov};
    d.walls = {{Curve::segment({0.0, 0.0}, {0.0, -depth}), Condition::Neumann},
               {Curve::segment({0.0, -depth}, {L, -depth}), Condition::Neumann},
               {Curve::segment({L, -depth}, {L, 0.0}), Condition::Neumann}};
    d.corner_A = {0.5 * pi, Condition::Neumann};
    d.corner_B = {0.5 * pi, Condition::Neumann};
    d.surface_length = L;
    return d;
}

SloshingDomain mirror(const SloshingDomain& d)
{
    const double xm = 0.5 * (d.A().x + d.B().x);
    auto reflect = [xm](Point p) { return Point{2.0 * xm - p.x, p.y}; };
    // Reflection reverses orientation, so every curve is also traversed backwards.
    auto flip = [&](const Curve& c) {
        switch (c.kind) {
        case Curve::Kind::Segment: return Curve::segment(reflect(c.b), reflect(c.a));
        case Curve::Kind::Arc: {
            // Angle th maps to pi - th; reversing swaps start and end.
            return Curve::arc(reflect(c.center), c.radius, pi - c.end, pi - c.start);
        }
        case Curve::Kind::Polyline: {
            std::vector<Point> pts;
            for (auto it = c.points.rbegin(); it != c.points.rend(); ++it) pts.push_back(reflect(*it));
            return Curve::polyline(std::move(pts));
        }
        case Curve::Kind::SineGraph: {
            // y = a sin(k x) on [x0, x1] becomes y = a sin(k (2 xm - x)) on [2xm - x1, 2xm - x0],
            // which is a sine graph only when sin(2 k xm) = 0.
            require(std::abs(std::sin(2.0 * c.wavenumber * xm)) < 1e-12, "surface",
                    "mirror of this sine graph is not a sine graph");
            const double s = std::cos(2.0 * c.wavenumber * xm) > 0 ? -1.0 : 1.0;
            return Curve::sine_graph(s * c.amplitude, c.wavenumber, 2.0 * xm - c.x_end, 2.0 * xm - c.x_start);
        }
        }
        return c;
    };
    SloshingDomain m;
    m.sloshing_surface = {flip(d.sloshing_surface.curve), Condition::Steklov};
    for (auto it = d.walls.rbegin(); it != d.walls.rend(); ++it) m.walls.push_back({flip(it->curve), it->condition});
    m.corner_A = d.corner_B;
    m.corner_B = d.corner_A;
    m.surface_length = d.surface_length;
    return m;
}

nlohmann::json to_json(const SloshingDomain& d)
{
    nlohmann::json walls = nlohmann::json::array();
    for (const auto& w : d.walls) walls.push_back({{"curve", curve_to_json(w.curve)}, {"condition", condition_name(w.condition)}});
    auto corner = [](const CornerSpec& c) {
        return nlohmann::json{{"angle", c.angle}, {"condition", condition_name(c.condition_adjacent_wall)}};
    };
    return {{"sloshing_surface", {{"curve", curve_to_json(d.sloshing_surface.curve)}, {"condition", "steklov"}}},
            {"walls", walls},
            {"corner_A", corner(d.corner_A)},
            {"corner_B", corner(d.corner_B)},
            {"surface_length", d.surface_length}};
}

SloshingDomain from_json(const nlohmann::json& j)
{
    if (!j.is_object()) throw ConfigError("domain", "expected a JSON object");
    if (j.contains("family")) {
        const auto fam = j["family"].get<std::string>();
        if (fam == "triangle") {
            Condition ca = Condition::Neumann, cb = Condition::Neumann;
            if (j.contains("walls")) {
                if (!j["walls"].is_array() || j["walls"].size() != 2) throw ConfigError("walls", "expected two conditions");
                ca = parse_condition(j["walls"][0].get<std::string>());
                cb = parse_condition(j["walls"][1].get<std::string>());
            }
            return build_triangle_domain(number(j, "alpha"), number(j, "beta"), number(j, "length"), ca, cb);
        }
        if (fam == "curvilinear") {
            const auto s = j.at("sign").get<std::string>();
            if (s != "+" && s != "-") throw ConfigError("sign", "expected + or -");
            return build_curvilinear_example(s == "+" ? 1 : -1);
        }
        if (fam == "rectangle") return build_rectangle_domain(number(j, "length"), number(j, "depth"));
        throw ConfigError("family", "unknown family '" + fam + "'");
    }
    SloshingDomain d;
    if (!j.contains("sloshing_surface")) throw ConfigError("sloshing_surface", "missing");
    d.sloshing_surface.curve = curve_from_json(j["sloshing_surface"].at("curve"));
    d.sloshing_surface.condition = Condition::Steklov;
    if (j["sloshing_surface"].contains("condition"))
        d.sloshing_surface.condition = parse_condition(j["sloshing_surface"]["condition"].get<std::string>());
    if (!j.contains("walls") || !j["walls"].is_array()) throw ConfigError("walls", "missing");
    for (const auto& w : j["walls"])
        d.walls.push_back({curve_from_json(w.at("curve")), parse_condition(w.at("condition").get<std::string>())});
    require(!d.walls.empty(), "walls", "at least one wall piece is required");
    d.surface_length = j.contains("surface_length") ? number(j, "surface_length") : d.sloshing_surface.curve.length();
    d.corner_A = {measured_angle_A(d), d.walls.front().condition};
    d.corner_B = {measured_angle_B(d), d.walls.back().condition};
    if (j.contains("corner_A")) d.corner_A.angle = number(j["corner_A"], "angle");
    if (j.contains("corner_B")) d.corner_B.angle = number(j["corner_B"], "angle");
    validate(d);
    return d;
}

} // namespace sloshspec::geometry
