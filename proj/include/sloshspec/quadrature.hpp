// Copyright 2026 The sloshspec Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SLOSHSPEC_QUADRATURE_HPP
#define SLOSHSPEC_QUADRATURE_HPP

#include <complex>
#include <functional>
#include <vector>

namespace sloshspec::quad {

using cplx = std::complex<double>;

struct Result {
    cplx value;
    double error;
    int evaluations;
};

/// Globally adaptive 7/15-point Gauss-Kronrod on [a, b]. Stops when the
/// summed error estimate is below max(abs_tol, rel_tol * |value|).
Result integrate(const std::function<cplx(double)>& f, double a, double b,
                 double abs_tol, double rel_tol, int max_intervals = 2000);

/// Same, with the initial partition given by `breaks` (sorted, >= 2 entries).
Result integrate(const std::function<cplx(double)>& f, const std::vector<double>& breaks,
                 double abs_tol, double rel_tol, int max_intervals = 2000);

struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1].
Rule gauss_legendre(int n);

/// Composite Gauss-Legendre rule with `per_panel` nodes on each panel.
Rule composite(const std::vector<double>& breaks, int per_panel);

} // namespace sloshspec::quad

#endif
