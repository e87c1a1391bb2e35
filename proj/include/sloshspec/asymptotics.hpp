// Copyright 2026 The sloshspec Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SLOSHSPEC_ASYMPTOTICS_HPP
#define SLOSHSPEC_ASYMPTOTICS_HPP

#include <string>
#include <vector>

namespace sloshspec::asymptotics {

/// Wall-condition pairing at the two surface corners.
///
/// For `MixedDirichletA_NeumannB` the first angle is taken at the Dirichlet
/// corner and the second at the Neumann corner. The two `HalfPi` regimes have
/// a straight vertical Neumann (resp. Dirichlet) wall at A and a Neumann wall
/// of angle `beta` at B.
enum class Regime {
    NeumannNeumann,
    DirichletDirichlet,
    MixedDirichletA_NeumannB,
    HalfPiNeumann,
    HalfPiDirichlet,
};

/// Parses "nn", "dd", "dn", "halfpi-n", "halfpi-d".
Regime parse_regime(const std::string& name);
std::string regime_name(Regime r);

/// k-th predicted eigenvalue (k >= 1).
double sigma_k(Regime r, double alpha, double beta, double length, int k);

std::vector<double> sigma_sequence(Regime r, double alpha, double beta, double length, int kmax);

/// Decay rate of the eigenvalue remainder: O(k^exponent), or exponentially small.
struct RemainderRate {
    bool exponential = false;
    double exponent = 0.0;
};

RemainderRate remainder_exponent(Regime r, double alpha, double beta);

/// Weyl term L * lambda / pi.
double weyl_count_estimate(double lambda, double length);

/// True when an angle exceeds pi/2, where the formula is not a theorem.
bool is_conjectural(Regime r, double alpha, double beta);

} // namespace sloshspec::asymptotics

#endif
