// Copyright 2026 The sloshspec Authors
// SPDX-License-Identifier: Apache-2.0

#include "sloshspec/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <stdexcept>

namespace sloshspec::quad {

namespace {

constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b;
    cplx value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gk15(const std::function<cplx(double)>& f, double a, double b, int& evals)
{
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const cplx fc = f(c);
    cplx kron = fc * kWgk[7];
    cplx gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        const cplx s = f(c - dx) + f(c + dx);
        kron += kWgk[j] * s;
        if (j % 2 == 1) gauss += kWg[j / 2] * s;
    }
    evals += 15;
    return {a, b, kron * h, std::abs((kron - gauss) * h)};
}

} // namespace

Result integrate(const std::function<cplx(double)>& f, const std::vector<double>& breaks,
                 double abs_tol, double rel_tol, int max_intervals)
{
    if (breaks.size() < 2) throw std::invalid_argument("quad::integrate: need two breakpoints");
    std::priority_queue<Panel> heap;
    int evals = 0;
    cplx total = 0.0;
    double err = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        if (!(breaks[i + 1] > breaks[i])) continue;
        Panel p = gk15(f, breaks[i], breaks[i + 1], evals);
        total += p.value;
        err += p.error;
        heap.push(p);
    }
    int count = static_cast<int>(heap.size());
    while (!heap.empty() && err > std::max(abs_tol, rel_tol * std::abs(total)) && count < max_intervals) {
        Panel p = heap.top();
        heap.pop();
        const double m = 0.5 * (p.a + p.b);
        if (!(m > p.a && m < p.b)) break;
        Panel l = gk15(f, p.a, m, evals);
        Panel r = gk15(f, m, p.b, evals);
        total += l.value + r.value - p.value;
        err += l.error + r.error - p.error;
        heap.push(l);
        heap.push(r);
        ++count;
    }
    // Re-sum to limit the drift of the running totals.
    total = 0.0;
    err = 0.0;
    while (!heap.empty()) {
        total += heap.top().value;
        err += heap.top().error;
        heap.pop();
    }
    return {total, err, evals};
}

Result integrate(const std::function<cplx(double)>& f, double a, double b, double abs_tol,
                 double rel_tol, int max_intervals)
{
    return integrate(f, std::vector<double>{a, b}, abs_tol, rel_tol, max_intervals);
}

Rule gauss_legendre(int n)
{
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
    Rule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        r.weights[i] = w;
        r.weights[n - 1 - i] = w;
    }
    return r;
}

Rule composite(const std::vector<double>& breaks, int per_panel)
{
    const Rule base = gauss_legendre(per_panel);
    Rule r;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double c = 0.5 * (breaks[i] + breaks[i + 1]);
        const double h = 0.5 * (breaks[i + 1] - breaks[i]);
        for (int j = 0; j < per_panel; ++j) {
            r.nodes.push_back(c + h * base.nodes[j]);
            r.weights.push_back(h * base.weights[j]);
        }
    }
    return r;
}

} // namespace sloshspec::quad
