// Copyright 2026 The sloshspec Authors
// SPDX-License-Identifier: Apache-2.0

#include "sloshspec/fem_steklov.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>
#include <string>

#include "sloshspec/errors.hpp"

namespace sloshspec::fem {

namespace {

using geometry::Condition;
using Triplet = Eigen::Triplet<double>;

double dist(geometry::Point p, geometry::Point q) { return std::hypot(p.x - q.x, p.y - q.y); }

// Surface nodes in order from A to B. Surface edges are stored in loop
// order, which runs from B to A.
std::vector<int> surface_chain(const mesh::TriangleMesh& m)
{
    std::map<int, int> toward_b;  // node -> neighbour one step closer to B
    std::map<int, int> indeg;
    for (const auto& e : m.boundary_edges) {
        if (e.tag != Condition::Steklov) continue;
        if (toward_b.count(e.nodes[1]))
            throw ConfigError("mesh", "Steklov edges do not form a single chain");
        toward_b[e.nodes[1]] = e.nodes[0];
        ++indeg[e.nodes[0]];
    }
    if (toward_b.empty()) throw ConfigError("mesh", "no Steklov boundary edges");
    int start = -1;
    for (const auto& [from, to] : toward_b)
        if (!indeg.count(from)) {
            if (start >= 0) throw ConfigError("mesh", "Steklov edges do not form a single chain");
            start = from;
        }
    if (start < 0) throw ConfigError("mesh", "Steklov edges form a closed loop");
    std::vector<int> chain{start};
    for (auto it = toward_b.find(start); it != toward_b.end(); it = toward_b.find(it->second))
        chain.push_back(it->second);
    if (chain.size() != toward_b.size() + 1) throw ConfigError("mesh", "Steklov edges do not form a single chain");
    return chain;
}

} // namespace

AssembledSystem assemble(const mesh::TriangleMesh& m)
{
    AssembledSystem sys;
    const int n = static_cast<int>(m.nodes.size());
    std::vector<char> dirichlet(n, 0);
    for (const auto& e : m.boundary_edges)
        if (e.tag == Condition::Dirichlet) dirichlet[e.nodes[0]] = dirichlet[e.nodes[1]] = 1;
    sys.has_dirichlet = std::find(dirichlet.begin(), dirichlet.end(), 1) != dirichlet.end();

    const auto chain = surface_chain(m);
    std::vector<int> index(n, -1);
    double s = 0.0;
    for (std::size_t i = 0; i < chain.size(); ++i) {
        if (i > 0) s += dist(m.nodes[chain[i - 1]], m.nodes[chain[i]]);
        const int v = chain[i];
        if (dirichlet[v]) continue;
        index[v] = static_cast<int>(sys.free_nodes.size());
        sys.free_nodes.push_back(v);
        sys.surface_nodes.push_back(v);
        sys.surface_arclength.push_back(s);
        sys.surface_points.push_back(m.nodes[v]);
    }
    if (sys.surface_nodes.empty()) throw ConfigError("mesh", "every Steklov node is constrained");
    for (int v = 0; v < n; ++v) {
        if (dirichlet[v]) {
            sys.dirichlet_nodes.push_back(v);
        } else if (index[v] < 0) {
            index[v] = static_cast<int>(sys.free_nodes.size());
            sys.free_nodes.push_back(v);
            sys.interior_nodes.push_back(v);
        }
    }

    const int nf = static_cast<int>(sys.free_nodes.size());
    std::vector<Triplet> kt;
    kt.reserve(9 * m.triangles.size());
    for (const auto& t : m.triangles) {
        const geometry::Point p[3] = {m.nodes[t[0]], m.nodes[t[1]], m.nodes[t[2]]};
        double b[3], c[3];
        for (int i = 0; i < 3; ++i) {
            const int j = (i + 1) % 3, k = (i + 2) % 3;
            b[i] = p[j].y - p[k].y;
            c[i] = p[k].x - p[j].x;
        }
        const double area = 0.5 * (b[0] * c[1] - b[1] * c[0]);
        if (!(area > 0.0)) throw NumericalError("fem: degenerate or inverted triangle");
        for (int i = 0; i < 3; ++i) {
            const int gi = index[t[i]];
            if (gi < 0) continue;
            for (int j = 0; j < 3; ++j) {
                const int gj = index[t[j]];
                if (gj < 0) continue;
                kt.emplace_back(gi, gj, (b[i] * b[j] + c[i] * c[j]) / (4.0 * area));
            }
        }
    }
    sys.stiffness.resize(nf, nf);
    sys.stiffness.setFromTriplets(kt.begin(), kt.end());

    const int ns = static_cast<int>(sys.surface_nodes.size());
    std::vector<Triplet> mt;
    for (const auto& e : m.boundary_edges) {
        if (e.tag != Condition::Steklov) continue;
        const double len = dist(m.nodes[e.nodes[0]], m.nodes[e.nodes[1]]);
        const int a = index[e.nodes[0]], b = index[e.nodes[1]];
        if (a >= 0) mt.emplace_back(a, a, len / 3.0);
        if (b >= 0) mt.emplace_back(b, b, len / 3.0);
        if (a >= 0 && b >= 0) {
            mt.emplace_back(a, b, len / 6.0);
            mt.emplace_back(b, a, len / 6.0);
        }
    }
    sys.steklov_mass.resize(ns, ns);
    sys.steklov_mass.setFromTriplets(mt.begin(), mt.end());
    return sys;
}

DtNOperatorMatrix dtn_matrix(const AssembledSystem& sys)
{
    const int ns = static_cast<int>(sys.surface_nodes.size());
    const int ni = static_cast<int>(sys.interior_nodes.size());
    if (ni == 0) throw ConfigError("mesh", "mesh has no interior nodes");
    const SparseMatrix kss = sys.stiffness.topLeftCorner(ns, ns);
    const SparseMatrix kis = sys.stiffness.bottomLeftCorner(ni, ns);
    const SparseMatrix kii = sys.stiffness.bottomRightCorner(ni, ni);

    Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt(kii);
    if (ldlt.info() != Eigen::Success) throw NumericalError("fem: interior factorization failed");
    const Eigen::VectorXd pivots = ldlt.vectorD();
    for (Eigen::Index i = 0; i < pivots.size(); ++i)
        if (!(pivots[i] > 0.0))
            throw NumericalError("fem: non-positive pivot " + std::to_string(pivots[i]) + " at index " + std::to_string(i));

    DtNOperatorMatrix dtn;
    dtn.matrix = Eigen::MatrixXd(kss);
    // Column blocks keep the dense right-hand side small on fine meshes.
    const int block = 32;
    for (int c0 = 0; c0 < ns; c0 += block) {
        const int w = std::min(block, ns - c0);
        const Eigen::MatrixXd rhs = Eigen::MatrixXd(kis.middleCols(c0, w));
        const Eigen::MatrixXd x = ldlt.solve(rhs);
        dtn.matrix.middleCols(c0, w) -= kis.transpose() * x;
    }
    dtn.matrix = 0.5 * (dtn.matrix + dtn.matrix.transpose()).eval();
    dtn.mass = Eigen::MatrixXd(sys.steklov_mass);
    dtn.arclength = sys.surface_arclength;
    dtn.points = sys.surface_points;
    return dtn;
}

SteklovSpectrum solve_dtn(const DtNOperatorMatrix& dtn, int n_eigs)
{
    const int ns = static_cast<int>(dtn.matrix.rows());
    require(n_eigs >= 1, "n_eigs", "must be at least 1");
    require(ns >= 4 * n_eigs, "h",
            "mesh too coarse: " + std::to_string(ns) + " surface nodes for " + std::to_string(n_eigs) +
                " eigenvalues (need at least 4 per eigenvalue)");
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(dtn.matrix, dtn.mass, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
    if (es.info() != Eigen::Success) throw NumericalError("fem: generalized eigensolver failed");
    SteklovSpectrum sp;
    sp.traces.resize(ns, n_eigs);
    for (int k = 0; k < n_eigs; ++k) {
        sp.eigenvalues.push_back(es.eigenvalues()[k]);
        Eigen::VectorXd v = es.eigenvectors().col(k);
        v /= std::sqrt(v.dot(dtn.mass * v));
        // Fix the sign: positive integral against the mass.
        const double s = (dtn.mass * Eigen::VectorXd::Ones(ns)).dot(v);
        if (s < 0.0 || (s == 0.0 && v[0] < 0.0)) v = -v;
        sp.traces.col(k) = v;
    }
    sp.arclength = dtn.arclength;
    sp.points = dtn.points;
    sp.surface_nodes = ns;
    return sp;
}

SteklovSpectrum solve_steklov(const geometry::SloshingDomain& d, double h, int n_eigs, double grading_factor)
{
    require(n_eigs >= 1, "n_eigs", "must be at least 1");
    const auto m = mesh::generate_mesh(d, h, grading_factor);
    const auto sys = assemble(m);
    const auto dtn = dtn_matrix(sys);
    auto sp = solve_dtn(dtn, n_eigs);
    sp.mesh_size = h;
    sp.grading_factor = grading_factor;
    sp.triangles = static_cast<int>(m.triangles.size());
    return sp;
}

Eigen::VectorXd apply_dtn(const DtNOperatorMatrix& dtn, const Eigen::VectorXd& trace)
{
    if (trace.size() != dtn.matrix.cols())
        throw ConfigError("trace", "dimension " + std::to_string(trace.size()) + " does not match " +
                                       std::to_string(dtn.matrix.cols()) + " surface nodes");
    return dtn.matrix * trace;
}

double relative_residual(const DtNOperatorMatrix& dtn, const Eigen::VectorXd& trace, double sigma)
{
    const Eigen::VectorXd r = apply_dtn(dtn, trace) - sigma * (dtn.mass * trace);
    const Eigen::VectorXd z = dtn.mass.llt().solve(r);
    return std::sqrt(r.dot(z)) / (sigma * std::sqrt(trace.dot(dtn.mass * trace)));
}

EigenvaluesWithError solve_with_error_bar(const geometry::SloshingDomain& d, double h, int n_eigs,
                                          double grading_factor)
{
    const auto coarse = solve_steklov(d, h, n_eigs, grading_factor);
    const auto fine = solve_steklov(d, 0.5 * h, n_eigs, grading_factor);
    EigenvaluesWithError out;
    for (int k = 0; k < n_eigs; ++k) {
        out.lambda.push_back(coarse.eigenvalues[k]);
        out.lambda_half.push_back(fine.eigenvalues[k]);
        out.errbar.push_back(2.0 * std::abs(coarse.eigenvalues[k] - fine.eigenvalues[k]));
    }
    return out;
}

std::vector<ConvergenceRow> convergence_study(const geometry::SloshingDomain& d, const std::vector<double>& h_list,
                                              const std::vector<int>& k_list, double grading_factor)
{
    require(!h_list.empty(), "h_list", "must not be empty");
    require(!k_list.empty(), "k_list", "must not be empty");
    for (std::size_t i = 1; i < h_list.size(); ++i)
        require(h_list[i] < h_list[i - 1], "h_list", "must be strictly decreasing");
    int kmax = 0;
    for (int k : k_list) {
        require(k >= 1, "k_list", "indices start at 1");
        kmax = std::max(kmax, k);
    }
    std::vector<std::vector<double>> lam;
    for (double h : h_list) lam.push_back(solve_steklov(d, h, kmax, grading_factor).eigenvalues);
    std::vector<ConvergenceRow> rows;
    for (int k : k_list)
        for (std::size_t i = 0; i < h_list.size(); ++i) {
            ConvergenceRow r;
            r.h = h_list[i];
            r.k = k;
            r.lambda = lam[i][k - 1];
            double order = 2.0;
            if (i >= 2) {
                const double d1 = lam[i - 1][k - 1] - lam[i - 2][k - 1];
                const double d2 = lam[i][k - 1] - lam[i - 1][k - 1];
                if (d1 != 0.0 && d2 != 0.0 && d1 / d2 > 0.0)
                    order = std::log(d1 / d2) / std::log(h_list[i - 1] / h_list[i]);
                r.observed_order = order;
            }
            if (i >= 1) {
                const double ratio = std::pow(h_list[i - 1] / h_list[i], order);
                r.extrapolated = r.lambda + (r.lambda - lam[i - 1][k - 1]) / (ratio - 1.0);
            } else {
                r.extrapolated = r.lambda;
            }
            rows.push_back(r);
        }
    return rows;
}

void write_dtn_binary(std::ostream& os, const DtNOperatorMatrix& dtn)
{
    static_assert(std::endian::native == std::endian::little, "binary dump assumes a little-endian host");
    auto put = [&os](const void* p, std::size_t n) {
        os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
    };
    const std::uint64_t n = static_cast<std::uint64_t>(dtn.matrix.rows());
    put(&n, sizeof n);
    for (Eigen::Index i = 0; i < dtn.matrix.rows(); ++i)
        for (Eigen::Index j = 0; j < dtn.matrix.cols(); ++j) {
            const double v = dtn.matrix(i, j);
            put(&v, sizeof v);
        }
}

} // namespace sloshspec::fem
