// Copyright 2026 The sloshspec Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "sloshspec/errors.hpp"
#include "sloshspec/geometry.hpp"
#include "sloshspec/mesh.hpp"

using namespace sloshspec;
using geometry::Condition;
constexpr double pi = std::numbers::pi;

namespace {

double distance_to_curve(const geometry::Curve& c, geometry::Point p)
{
    // Golden-section search on a dense bracket.
    const int n = 400;
    int best = 0;
    double best_d = 1e300;
    for (int i = 0; i <= n; ++i) {
        const auto q = c.eval(static_cast<double>(i) / n);
        const double d = std::hypot(q.x - p.x, q.y - p.y);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    double lo = std::max(0.0, (best - 1.0) / n), hi = std::min(1.0, (best + 1.0) / n);
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    auto f = [&](double t) {
        const auto q = c.eval(t);
        return std::hypot(q.x - p.x, q.y - p.y);
    };
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        const double a = hi - r * (hi - lo), b = lo + r * (hi - lo);
        if (f(a) < f(b))
            hi = b;
        else
            lo = a;
    }
    return std::min(best_d, f(0.5 * (lo + hi)));
}

const geometry::Curve& piece_curve(const geometry::SloshingDomain& d, int piece)
{
    return piece == 0 ? d.sloshing_surface.curve : d.walls[piece - 1].curve;
}

void check_invariants(const geometry::SloshingDomain& d, const mesh::TriangleMesh& m, double exact_area)
{
    REQUIRE(!m.triangles.empty());
    for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t) REQUIRE(mesh::signed_area(m, t) > 0.0);
    CHECK(mesh::min_angle_degrees(m) >= 20.0);
    double area = 0.0;
    for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t) area += mesh::signed_area(m, t);
    CHECK(area == doctest::Approx(mesh::boundary_polygon_area(m)).epsilon(1e-12));
    if (exact_area > 0.0) CHECK(area == doctest::Approx(exact_area).epsilon(1e-10));

    // Every edge is shared by two triangles except boundary edges, which are tagged exactly once.
    std::map<std::pair<int, int>, int> count;
    for (const auto& t : m.triangles)
        for (int i = 0; i < 3; ++i) {
            const int a = t[i], b = t[(i + 1) % 3];
            ++count[{std::min(a, b), std::max(a, b)}];
        }
    std::map<std::pair<int, int>, int> tagged;
    for (const auto& e : m.boundary_edges)
        ++tagged[{std::min(e.nodes[0], e.nodes[1]), std::max(e.nodes[0], e.nodes[1])}];
    int boundary = 0;
    for (const auto& [k, c] : count) {
        CHECK(c <= 2);
        if (c == 1) {
            ++boundary;
            CHECK(tagged.count(k) == 1);
        }
    }
    CHECK(boundary == static_cast<int>(m.boundary_edges.size()));

    double worst = 0.0;
    for (const auto& e : m.boundary_edges) {
        const auto& c = piece_curve(d, e.piece);
        for (int v : e.nodes) worst = std::max(worst, distance_to_curve(c, m.nodes[v]));
        CHECK(e.tag == (e.piece == 0 ? Condition::Steklov : d.walls[e.piece - 1].condition));
    }
    CHECK(worst < 1e-12);
}

} // namespace

TEST_CASE("size function grades towards the surface corners")
{
    const auto d = geometry::build_triangle_domain(pi / 4, pi / 4, 1.0);
    CHECK(mesh::target_size(d, 0.1, 0.25, {0.0, 0.0}) == doctest::Approx(0.025));
    CHECK(mesh::target_size(d, 0.05, 0.25, {0.5, -0.5}) == doctest::Approx(0.05));
    CHECK(mesh::target_size(d, 0.01, 0.25, {0.05, 0.0}) == doctest::Approx(0.005));
    CHECK(mesh::target_size(d, 0.01, 0.25, {0.95, 0.0}) == doctest::Approx(0.005));
    CHECK(mesh::target_size(d, 0.1, 1.0, {0.01, 0.0}) == doctest::Approx(0.1));
}

TEST_CASE("triangle meshes satisfy the structural invariants")
{
    const auto d = geometry::build_triangle_domain(pi / 4, pi / 4, 1.0);
    for (double h : {0.2, 0.1, 0.05}) {
        const auto m = mesh::generate_mesh(d, h);
        check_invariants(d, m, 0.25);
        CHECK(mesh::tagged_length(m, Condition::Steklov) == doctest::Approx(1.0).epsilon(1e-14));
    }
    const auto s = geometry::build_triangle_domain(pi / 3, pi / 5, 2.0, Condition::Dirichlet, Condition::Neumann);
    check_invariants(s, mesh::generate_mesh(s, 0.1), -1.0);
}

TEST_CASE("curvilinear meshes keep nodes on the curves and converge in length")
{
    for (int sign : {1, -1}) {
        const auto d = geometry::build_curvilinear_example(sign);
        std::vector<double> hs{0.02, 0.01, 0.005}, errs;
        for (double h : hs) {
            const auto m = mesh::generate_mesh(d, h);
            check_invariants(d, m, -1.0);
            errs.push_back(std::abs(mesh::tagged_length(m, Condition::Steklov) - d.surface_length));
        }
        // Chord length converges at second order.
        std::vector<double> lx, ly;
        for (std::size_t i = 0; i < hs.size(); ++i) {
            lx.push_back(std::log(hs[i]));
            ly.push_back(std::log(errs[i]));
        }
        const auto fit = oracle::fit_line(lx, ly);
        CHECK(fit.slope == doctest::Approx(2.0).epsilon(0.15));
    }
}

TEST_CASE("halving the mesh size at least triples the triangle count")
{
    const auto d = geometry::build_triangle_domain(pi / 3, pi / 5, 1.0);
    std::size_t prev = 0;
    for (double h : {0.02, 0.01, 0.005}) {
        const auto m = mesh::generate_mesh(d, h);
        if (prev > 0) CHECK(m.triangles.size() >= 3 * prev);
        prev = m.triangles.size();
    }
}

TEST_CASE("boundary spacing respects the target size")
{
    const auto d = geometry::build_curvilinear_example(1);
    const double h = 0.05;
    for (double g : {1.0, 0.25}) {
        const auto m = mesh::generate_mesh(d, h, g);
        for (const auto& e : m.boundary_edges) {
            const auto p = m.nodes[e.nodes[0]], q = m.nodes[e.nodes[1]];
            CHECK(std::hypot(p.x - q.x, p.y - q.y) <= h * (1.0 + 1e-12));
        }
        // Next to A the edges are refined by the grading factor.
        double shortest_at_a = 1e300;
        for (const auto& e : m.boundary_edges)
            for (int v : e.nodes)
                if (std::hypot(m.nodes[v].x, m.nodes[v].y) < 1e-15) {
                    const auto p = m.nodes[e.nodes[0]], q = m.nodes[e.nodes[1]];
                    shortest_at_a = std::min(shortest_at_a, std::hypot(p.x - q.x, p.y - q.y));
                }
        CHECK(shortest_at_a <= g * h * (1.0 + 1e-9));
    }
}

TEST_CASE("meshing is deterministic and the dump is parseable")
{
    const auto d = geometry::build_curvilinear_example(-1);
    const auto a = mesh::generate_mesh(d, 0.08), b = mesh::generate_mesh(d, 0.08);
    std::ostringstream sa, sb;
    mesh::write_dump(sa, a);
    mesh::write_dump(sb, b);
    CHECK(sa.str() == sb.str());
    std::istringstream in(sa.str());
    std::string word;
    std::size_t n = 0;
    in >> word >> n;
    CHECK(word == "nodes");
    CHECK(n == a.nodes.size());
}

TEST_CASE("invalid mesh parameters are rejected")
{
    const auto d = geometry::build_rectangle_domain(1.0, 1.0);
    CHECK_THROWS_AS(mesh::generate_mesh(d, 0.0), ConfigError);
    CHECK_THROWS_AS(mesh::generate_mesh(d, 0.1, 0.0), ConfigError);
    CHECK_THROWS_AS(mesh::generate_mesh(d, std::nan("")), ConfigError);
}
