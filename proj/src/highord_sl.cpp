// Copyright 2026 The sloshspec Authors
// SPDX-License-Identifier: Apache-2.0

#include "sloshspec/highord_sl.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include <Eigen/Dense>

#include "sloshspec/errors.hpp"
#include "sloshspec/quadrature.hpp"

namespace sloshspec::sl {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double kRootThreshold = 1e-9;

using CMatrix = Eigen::MatrixXcd;

void check_problem(const Problem& p)
{
    require(p.q >= 1 && p.q <= 12, "q", "order must lie in 1..12");
    require(std::isfinite(p.length) && p.length > 0.0, "length", "must be positive");
}

std::vector<cplx> sorted_by_arg(std::vector<cplx> w)
{
    std::sort(w.begin(), w.end(), [](cplx a, cplx b) {
        auto arg = [](cplx z) {
            double t = std::arg(z);
            return t <= -pi + 1e-12 ? pi : t;
        };
        return arg(a) < arg(b);
    });
    return w;
}

int first_order(const Problem& p) { return p.bc == BoundaryKind::Neumann ? p.q : 0; }

double shift_of(cplx w, double length) { return w.real() > 1e-12 ? length : 0.0; }

CMatrix boundary_matrix(const Problem& p, const std::vector<cplx>& w, double lambda)
{
    const int n = 2 * p.q;
    const int m0 = first_order(p);
    CMatrix a(n, n);
    for (int k = 0; k < n; ++k) {
        const double s = shift_of(w[k], p.length);
        const cplx left = std::exp(-w[k] * lambda * s);
        const cplx right = std::exp(w[k] * lambda * (p.length - s));
        cplx wm = std::pow(w[k], m0);
        for (int r = 0; r < p.q; ++r) {
            a(r, k) = wm * left;
            a(p.q + r, k) = wm * right;
            wm *= w[k];
        }
    }
    return a;
}

double golden_minimum(const std::function<double(double)>& f, double a, double b, double rel_tol)
{
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - g * (b - a);
    double d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 400 && (b - a) > rel_tol * std::abs(0.5 * (a + b)); ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    return fc < fd ? c : d;
}

// Monomial coefficients (in t on [-1, 1]) of the Legendre polynomial P_j.
std::vector<double> legendre_coefficients(int j)
{
    std::vector<double> p0{1.0}, p1{0.0, 1.0};
    if (j == 0) return p0;
    for (int k = 1; k < j; ++k) {
        std::vector<double> p2(k + 2, 0.0);
        for (int i = 0; i <= k; ++i) p2[i + 1] += (2.0 * k + 1.0) * p1[i] / (k + 1.0);
        for (int i = 0; i < k; ++i) p2[i] -= k * p0[i] / (k + 1.0);
        p0 = std::move(p1);
        p1 = std::move(p2);
    }
    return p1;
}

double zero_mode_eval(const Problem& p, int degree, double x, int m)
{
    const auto c = legendre_coefficients(degree);
    const double t = 2.0 * x / p.length - 1.0;
    double value = 0.0;
    for (int i = m; i < static_cast<int>(c.size()); ++i) {
        double falling = 1.0;
        for (int j = 0; j < m; ++j) falling *= (i - j);
        value += c[i] * falling * std::pow(t, i - m);
    }
    const double scale = std::pow(2.0 / p.length, m) * std::sqrt((2.0 * degree + 1.0) / p.length);
    const double sign = degree % 2 == 0 ? 1.0 : -1.0;
    return sign * scale * value;
}

std::vector<cplx> normalised_null_vector(const Problem& p, double lambda)
{
    const auto w = characteristic_exponents(p.q);
    Eigen::JacobiSVD<CMatrix> svd(boundary_matrix(p, w, lambda), Eigen::ComputeFullV);
    const Eigen::VectorXcd v = svd.matrixV().col(2 * p.q - 1);
    std::vector<cplx> c(v.data(), v.data() + v.size());

    // Rotate so that the combination is real.
    cplx peak = 0.0;
    for (int i = 0; i <= 64; ++i) {
        const cplx u = combination_derivative(p, lambda, c, p.length * i / 64.0, 0);
        if (std::abs(u) > std::abs(peak)) peak = u;
    }
    if (std::abs(peak) == 0.0) throw NumericalError("sl: null vector gives a vanishing eigenfunction");
    const cplx rot = std::conj(peak) / std::abs(peak);
    for (auto& ck : c) ck *= rot;

    // L2 normalisation with a composite Gauss rule resolving the oscillation.
    const int panels = std::max(8, static_cast<int>(std::ceil(4.0 * lambda * p.length / pi)) + 8);
    std::vector<double> breaks(panels + 1);
    for (int i = 0; i <= panels; ++i) breaks[i] = p.length * i / panels;
    const auto rule = quad::composite(breaks, 12);
    double norm2 = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double u = combination_derivative(p, lambda, c, rule.nodes[i], 0).real();
        norm2 += rule.weights[i] * u * u;
    }
    const double scale = 1.0 / std::sqrt(norm2);
    for (auto& ck : c) ck *= scale;

    // Sign of the first non-vanishing derivative at x = 0.
    for (int m = 0; m < 2 * p.q; ++m) {
        const double d = combination_derivative(p, lambda, c, 0.0, m).real() / std::pow(lambda, m);
        if (std::abs(d) > 1e-6) {
            if (d < 0.0)
                for (auto& ck : c) ck = -ck;
            break;
        }
    }
    return c;
}

} // namespace

BoundaryKind parse_boundary(const std::string& name)
{
    if (name == "N" || name == "n" || name == "neumann") return BoundaryKind::Neumann;
    if (name == "D" || name == "d" || name == "dirichlet") return BoundaryKind::Dirichlet;
    throw ConfigError("bc", "expected N or D, got '" + name + "'");
}

std::vector<cplx> roots_of_minus_one(int q)
{
    require(q >= 1, "q", "order must be >= 1");
    std::vector<cplx> w;
    for (int k = 0; k < 2 * q; ++k) w.push_back(std::polar(1.0, pi * (2.0 * k + 1.0) / (2.0 * q)));
    return sorted_by_arg(std::move(w));
}

std::vector<cplx> characteristic_exponents(int q)
{
    require(q >= 1, "q", "order must be >= 1");
    const double offset = q % 2 == 0 ? 0.0 : 1.0;
    std::vector<cplx> w;
    for (int k = 0; k < 2 * q; ++k) w.push_back(std::polar(1.0, pi * (2.0 * k + offset) / (2.0 * q)));
    return sorted_by_arg(std::move(w));
}

double characteristic_smallest_singular_value(const Problem& p, double lambda)
{
    check_problem(p);
    require(std::isfinite(lambda) && lambda > 0.0, "lambda", "must be positive");
    const auto w = characteristic_exponents(p.q);
    Eigen::JacobiSVD<CMatrix> svd(boundary_matrix(p, w, lambda));
    const auto& s = svd.singularValues();
    return s(s.size() - 1) / s(0);
}

std::vector<Eigenpair> solve_spectrum(const Problem& p, int kmax)
{
    check_problem(p);
    require(kmax >= 1, "kmax", "must be >= 1");
    std::vector<Eigenpair> out;
    if (p.bc == BoundaryKind::Neumann)
        for (int j = 0; j < p.q && static_cast<int>(out.size()) < kmax; ++j)
            out.push_back({0.0, p.q, j, {}});

    const double step = pi / (4.0 * p.length);
    const double ceiling = pi * (kmax + p.q + 4) / p.length;
    auto f = [&](double x) { return characteristic_smallest_singular_value(p, x); };
    const auto w = characteristic_exponents(p.q);

    double x0 = 0.5 * step, x1 = 1.5 * step;
    double f0 = f(x0), f1 = f(x1);
    std::vector<double> roots;
    while (static_cast<int>(out.size()) < kmax) {
        const double x2 = x1 + step;
        if (x2 > ceiling) throw NumericalError("sl: scan ceiling reached before kmax eigenvalues");
        const double f2 = f(x2);
        if (f1 <= f0 && f1 <= f2) {
            const double root = golden_minimum(f, x0, x2, 1e-13);
            if (f(root) < kRootThreshold) {
                Eigen::JacobiSVD<CMatrix> svd(boundary_matrix(p, w, root));
                const auto& s = svd.singularValues();
                int mult = 0;
                for (int i = 0; i < s.size(); ++i) mult += s(i) / s(0) < kRootThreshold ? 1 : 0;
                mult = std::max(mult, 1);
                const auto c = normalised_null_vector(p, root);
                for (int b = 0; b < mult && static_cast<int>(out.size()) < kmax; ++b)
                    out.push_back({root, mult, b, c});
                roots.push_back(root);
            }
        }
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f2;
    }

    // One eigenvalue per pi/L asymptotically; a larger gap means a missed root.
    for (std::size_t i = 1; i < roots.size(); ++i) {
        const double gap = (roots[i] - roots[i - 1]) * p.length / pi;
        if (gap < 0.5 || gap > 1.5) throw NumericalError("sl: eigenvalue gap inconsistent with density pi/L");
    }
    return out;
}

cplx combination_derivative(const Problem& p, double lambda, const std::vector<cplx>& c, double x,
                            int m)
{
    const auto w = characteristic_exponents(p.q);
    if (c.size() != w.size()) throw ConfigError("coefficients", "expected 2q entries");
    cplx sum = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        const cplx wl = w[k] * lambda;
        sum += c[k] * std::pow(wl, m) * std::exp(wl * (x - shift_of(w[k], p.length)));
    }
    return sum;
}

double eigenfunction_eval(const Problem& p, const Eigenpair& e, double x, int derivative)
{
    check_problem(p);
    require(derivative >= 0, "derivative", "order must be >= 0");
    if (e.coefficients.empty()) return zero_mode_eval(p, e.branch, x, derivative);
    return combination_derivative(p, e.lambda, e.coefficients, x, derivative).real();
}

std::vector<cplx> duality_map(int q, const std::vector<cplx>& coefficients)
{
    const auto w = characteristic_exponents(q);
    if (coefficients.size() != w.size()) throw ConfigError("coefficients", "expected 2q entries");
    std::vector<cplx> out(coefficients.size());
    for (std::size_t k = 0; k < w.size(); ++k) out[k] = coefficients[k] * std::pow(w[k], q);
    return out;
}

double ode_asymptotic_prediction(int q, double length, int k)
{
    require(q >= 1, "q", "order must be >= 1");
    require(k > q, "k", "prediction is defined for k > q");
    require(std::isfinite(length) && length > 0.0, "length", "must be positive");
    return (pi * (k - 0.5) - pi * q / 2.0) / length;
}

} // namespace sloshspec::sl
