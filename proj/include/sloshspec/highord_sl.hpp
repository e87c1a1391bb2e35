// Copyright 2026 The sloshspec Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SLOSHSPEC_HIGHORD_SL_HPP
#define SLOSHSPEC_HIGHORD_SL_HPP

#include <complex>
#include <string>
#include <vector>

namespace sloshspec::sl {

using cplx = std::complex<double>;

enum class BoundaryKind { Neumann, Dirichlet };

BoundaryKind parse_boundary(const std::string& name);

/// (-1)^q U^(2q) = Lambda^(2q) U on [0, length]. Neumann fixes the derivatives
/// of order q..2q-1 at both ends, Dirichlet those of order 0..q-1.
struct Problem {
    int q = 1;
    BoundaryKind bc = BoundaryKind::Neumann;
    double length = 1.0;
};

/// The 2q solutions of w^(2q) = -1, ordered by argument in (-pi, pi].
std::vector<cplx> roots_of_minus_one(int q);

/// The 2q exponents w with (-1)^q w^(2q) = 1, so that exp(w Lambda x) solves
/// the equation. Same ordering convention. Equal to the roots of -1 for odd q.
std::vector<cplx> characteristic_exponents(int q);

/// sigma_min / sigma_max of the row- and column-scaled boundary matrix.
double characteristic_smallest_singular_value(const Problem& p, double lambda);

struct Eigenpair {
    double lambda = 0.0;
    int multiplicity = 1;
    /// Index inside a multiple eigenvalue (0-based).
    int branch = 0;
    /// Coefficients of exp(w_k Lambda (x - shift_k)), shift_k = L if Re w_k > 0
    /// and 0 otherwise. Empty for the polynomial zero modes.
    std::vector<cplx> coefficients;
};

/// First kmax eigenvalues, repeated according to multiplicity.
std::vector<Eigenpair> solve_spectrum(const Problem& p, int kmax);

/// m-th derivative of the real, L2-normalised eigenfunction at x.
double eigenfunction_eval(const Problem& p, const Eigenpair& e, double x, int derivative = 0);

/// Sends c_k to c_k w_k^q. Maps Dirichlet eigenvectors to Neumann ones.
std::vector<cplx> duality_map(int q, const std::vector<cplx>& coefficients);

/// Complex combination sum_k c_k (w_k Lambda)^m exp(w_k Lambda (x - shift_k)).
cplx combination_derivative(const Problem& p, double lambda, const std::vector<cplx>& c, double x,
                            int m);

/// (pi (k - 1/2) - pi q / 2) / L, defined for k > q.
double ode_asymptotic_prediction(int q, double length, int k);

} // namespace sloshspec::sl

#endif
