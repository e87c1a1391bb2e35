// Copyright 2026 The sloshspec Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SLOSHSPEC_MESH_HPP
#define SLOSHSPEC_MESH_HPP

#include <array>
#include <iosfwd>
#include <vector>

#include "sloshspec/geometry.hpp"

namespace sloshspec::mesh {

using geometry::Condition;
using geometry::Point;

struct BoundaryEdge {
    std::array<int, 2> nodes;
    Condition tag;
    /// Index of the boundary piece: 0 is the surface, 1.. the walls in order.
    int piece;
};

struct TriangleMesh {
    std::vector<Point> nodes;
    std::vector<std::array<int, 3>> triangles;
    std::vector<BoundaryEdge> boundary_edges;
    double mesh_size = 0.0;
    double grading_factor = 1.0;
};

/// Local target edge length: grading_factor * h at A and B, growing linearly
/// (so successive boundary edges grow geometrically) to h at distance 10 h.
double target_size(const geometry::SloshingDomain& d, double h, double grading_factor, Point p);

/// Conforming Delaunay refinement with minimum angle >= 20 degrees. Boundary
/// vertices are placed on the exact curves.
TriangleMesh generate_mesh(const geometry::SloshingDomain& d, double h, double grading_factor = 0.25);

double signed_area(const TriangleMesh& m, int t);
double min_angle_degrees(const TriangleMesh& m);
/// Shoelace area of the polygon formed by the boundary edges.
double boundary_polygon_area(const TriangleMesh& m);
double tagged_length(const TriangleMesh& m, Condition tag);

void write_dump(std::ostream& os, const TriangleMesh& m);

} // namespace sloshspec::mesh

#endif
