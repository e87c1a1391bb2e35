// Copyright 2026 The sloshspec Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SLOSHSPEC_FEM_STEKLOV_HPP
#define SLOSHSPEC_FEM_STEKLOV_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <iosfwd>
#include <vector>

#include "sloshspec/geometry.hpp"
#include "sloshspec/mesh.hpp"

namespace sloshspec::fem {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// P1 system with Dirichlet nodes removed. Free nodes are numbered with the
/// surface nodes first (ordered from A to B), then all remaining free nodes.
struct AssembledSystem {
    SparseMatrix stiffness;      // free x free
    SparseMatrix steklov_mass;   // surface x surface
    std::vector<int> free_nodes; // mesh node id per free index
    std::vector<int> surface_nodes;
    std::vector<int> interior_nodes;
    std::vector<int> dirichlet_nodes;
    std::vector<double> surface_arclength; // arc-length parameter of each surface node
    std::vector<geometry::Point> surface_points;
    bool has_dirichlet = false;
};

AssembledSystem assemble(const mesh::TriangleMesh& m);

struct DtNOperatorMatrix {
    Eigen::MatrixXd matrix;
    Eigen::MatrixXd mass;
    std::vector<double> arclength;
    std::vector<geometry::Point> points;
};

DtNOperatorMatrix dtn_matrix(const AssembledSystem& sys);

struct SteklovSpectrum {
    std::vector<double> eigenvalues;
    Eigen::MatrixXd traces;  // columns, orthonormal in the mass inner product
    std::vector<double> arclength;
    std::vector<geometry::Point> points;
    double mesh_size = 0.0;
    double grading_factor = 1.0;
    int surface_nodes = 0;
    int triangles = 0;
};

/// Lowest n_eigs pairs of D x = lambda M x.
SteklovSpectrum solve_dtn(const DtNOperatorMatrix& dtn, int n_eigs);

SteklovSpectrum solve_steklov(const geometry::SloshingDomain& d, double h, int n_eigs,
                              double grading_factor = 0.25);

Eigen::VectorXd apply_dtn(const DtNOperatorMatrix& dtn, const Eigen::VectorXd& trace);

/// ||D v - sigma M v|| in the M^{-1} norm divided by sigma ||v||_M.
double relative_residual(const DtNOperatorMatrix& dtn, const Eigen::VectorXd& trace, double sigma);

/// Eigenvalues at h with the error bar 2 |lambda(h) - lambda(h/2)|.
struct EigenvaluesWithError {
    std::vector<double> lambda;
    std::vector<double> errbar;
    std::vector<double> lambda_half;
};

EigenvaluesWithError solve_with_error_bar(const geometry::SloshingDomain& d, double h, int n_eigs,
                                          double grading_factor = 0.25);

struct ConvergenceRow {
    double h = 0.0;
    int k = 0;
    double lambda = 0.0;
    // Filled from the second row of each k on: Aitken/Richardson estimates.
    double observed_order = 0.0;
    double extrapolated = 0.0;
};

std::vector<ConvergenceRow> convergence_study(const geometry::SloshingDomain& d, const std::vector<double>& h_list,
                                              const std::vector<int>& k_list, double grading_factor = 0.25);

/// Row-major binary dump: uint64 size n followed by n*n little-endian doubles.
void write_dtn_binary(std::ostream& os, const DtNOperatorMatrix& dtn);

} // namespace sloshspec::fem

#endif
