// Copyright 2026 The sloshspec Authors
// SPDX-License-Identifier: Apache-2.0

#include "sloshspec/model_solutions.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "sloshspec/errors.hpp"
#include "sloshspec/quadrature.hpp"

namespace sloshspec::model {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);

cplx log1p_complex(cplx u)
{
    if (std::abs(u) < 0.5) {
        const double re = 0.5 * std::log1p(2.0 * u.real() + std::norm(u));
        const double im = std::atan2(u.imag(), 1.0 + u.real());
        return {re, im};
    }
    return std::log(1.0 + u);
}

// log(1 + v^{-2 mu}) for v = e^{s + i phi} with |2 mu phi| < pi.
cplx log_one_plus_inverse_power(double mu, double s, double phi)
{
    const cplx e = -2.0 * mu * cplx(s, phi);
    if (e.real() > 0.0) return e + log1p_complex(std::exp(-e));
    return log1p_complex(std::exp(e));
}

// (1/pi) int log(1 + v^{-2 mu}) w v / (v^2 + w^2) ds along v = e^{s + i phi}.
cplx integral_on_ray(double mu, double modulus, double arg_w, double phi)
{
    const double lw = std::log(modulus);
    const cplx w = std::polar(modulus, arg_w);
    const double lo = std::min(0.0, lw) - 40.0;
    const double hi = std::max(0.0, lw) + 40.0;
    std::vector<double> breaks{lo};
    if (std::abs(lw) > 1e-12) breaks.push_back(std::min(0.0, lw));
    breaks.push_back(std::max(0.0, lw));
    breaks.push_back(hi);
    auto f = [&](double s) -> cplx {
        const cplx v = std::polar(std::exp(s), phi);
        const cplx ratio = v / w;
        return log_one_plus_inverse_power(mu, s, phi) * ratio / (ratio * ratio + 1.0);
    };
    return quad::integrate(f, breaks, 1e-14, 1e-14, 4000).value / kPi;
}

struct RayExpMinusI {
    cplx ray_value;  // exp(-I_phi(w))
    int factor = 0;  // +1: divided by 1 + (-iw)^{-2mu}; -1: by 1 + (iw)^{-2mu}
    cplx total;
};

RayExpMinusI exp_minus_I_parts(double alpha, double modulus, double arg_w)
{
    const double mu = kPi / (2.0 * alpha);
    constexpr std::array<double, 5> kFractions{-0.75, -0.4, 0.0, 0.4, 0.75};
    double best_phi = 0.0;
    double best_score = -1.0;
    for (double frac : kFractions) {
        const double phi = frac * alpha;
        const double score = std::min({std::abs(arg_w - (phi + kPi / 2)), std::abs(arg_w - (phi - kPi / 2)),
                                       (phi + 1.5 * kPi) - arg_w, arg_w - (phi - 1.5 * kPi)});
        if (score > best_score) {
            best_score = score;
            best_phi = phi;
        }
    }
    if (best_score < 1e-3)
        throw NumericalError("exp(-I) continuation: argument " + std::to_string(arg_w) +
                             " outside the supported range");
    RayExpMinusI out;
    out.ray_value = std::exp(-integral_on_ray(mu, modulus, arg_w, best_phi));
    out.total = out.ray_value;
    const double lr = std::log(modulus);
    if (arg_w > best_phi + kPi / 2) {
        out.factor = 1;
        out.total /= 1.0 + std::exp(-2.0 * mu * cplx(lr, arg_w - kPi / 2));
    } else if (arg_w < best_phi - kPi / 2) {
        out.factor = -1;
        out.total /= 1.0 + std::exp(-2.0 * mu * cplx(lr, arg_w + kPi / 2));
    }
    return out;
}

void check_alpha(double alpha)
{
    if (!(alpha > 0.0) || alpha > kPi / 2 + 1e-14)
        throw ConfigError("alpha", "sector angle must lie in (0, pi/2]");
}

// log((1 - t^{-2mu}) / (1 - t^{-2})) with t = e^s.
double g_log_ratio(double mu, double s)
{
    if (std::abs(s) < 1e-9) return std::log(mu) - (mu - 1.0) * s;
    if (s > 0.0) return std::log(std::expm1(-2.0 * mu * s) / std::expm1(-2.0 * s));
    return -2.0 * (mu - 1.0) * s + std::log(std::expm1(2.0 * mu * s) / std::expm1(2.0 * s));
}

cplx power_minus_mu(double mu, double modulus, double arg)
{
    return std::exp(-mu * cplx(std::log(modulus), arg));
}

} // namespace

double far_field_phase(double alpha, BoundaryKind condition)
{
    check_alpha(alpha);
    const double mu = kPi / (2.0 * alpha);
    return condition == BoundaryKind::Neumann ? kPi / 4 * (1.0 - mu) : kPi / 4 * (1.0 + mu);
}

SectorParams make_sector(double alpha, BoundaryKind condition)
{
    check_alpha(alpha);
    SectorParams p;
    p.alpha = std::min(alpha, kPi / 2);
    p.condition = condition;
    p.mu = kPi / (2.0 * p.alpha);
    p.chi = far_field_phase(p.alpha, condition);
    return p;
}

cplx eval_I_alpha(double alpha, cplx zeta)
{
    check_alpha(alpha);
    if (zeta == cplx(0.0)) throw ConfigError("zeta", "must be nonzero");
    const double arg = std::arg(zeta);
    if (std::abs(arg) > alpha - 1e-8) throw ConfigError("zeta", "argument outside the open sector |arg| < alpha");
    return integral_on_ray(kPi / (2.0 * alpha), std::abs(zeta), arg, arg);
}

cplx exp_minus_I(double alpha, double modulus, double arg_w)
{
    check_alpha(alpha);
    if (!(modulus > 0.0)) throw ConfigError("w", "must be nonzero");
    return exp_minus_I_parts(alpha, modulus, arg_w).total;
}

cplx eval_g_alpha(double alpha, cplx zeta)
{
    check_alpha(alpha);
    if (!(zeta.real() > 0.0)) throw ConfigError("zeta", "requires Re zeta > 0");
    const double mu = kPi / (2.0 * alpha);
    if (std::abs(mu - 1.0) < 1e-15) return 1.0;
    const double lz = std::log(std::abs(zeta));
    std::vector<double> breaks{std::min(0.0, lz) - 40.0};
    if (std::abs(lz) > 1e-12) breaks.push_back(std::min(0.0, lz));
    breaks.push_back(std::max(0.0, lz));
    breaks.push_back(std::max(0.0, lz) + 40.0);
    auto f = [&](double s) -> cplx {
        const double t = std::exp(s);
        const cplx ratio = t / zeta;
        return g_log_ratio(mu, s) * ratio / (ratio * ratio + 1.0);
    };
    return std::exp(-quad::integrate(f, breaks, 1e-13, 1e-13, 4000).value / kPi);
}

cplx eval_g_continued(double alpha, double modulus, double arg_zeta)
{
    const cplx zeta = std::polar(modulus, arg_zeta);
    return (zeta + kI) / zeta * exp_minus_I(alpha, modulus, arg_zeta - alpha);
}

double eval_ReJ(double mu)
{
    if (!(mu > 0.5)) throw ConfigError("mu", "must exceed 1/2");
    return kPi * kPi * (1.0 - mu) / 4.0;
}

double eval_ReJ_quadrature(double mu)
{
    if (!(mu > 0.5)) throw ConfigError("mu", "must exceed 1/2");
    const cplx numerator = std::exp(kI * (kPi / (2.0 * mu)));
    const cplx shift = std::exp(kI * (kPi / mu));
    auto f = [&](double s) -> cplx {
        const double t = std::exp(s);
        return log_one_plus_inverse_power(mu, s, 0.0) * numerator * t / (t * t - shift);
    };
    return quad::integrate(f, {-60.0, 0.0, 60.0}, 1e-14, 1e-14, 4000).value.real();
}

ContourQuadrature default_contour(const SectorParams& params)
{
    ContourQuadrature c;
    c.ray_angle = kPi + params.alpha / 2.0;
    return c;
}

PetersSolution::PetersSolution(SectorParams params, ContourQuadrature contour)
    : params_(params), contour_(contour)
{
    check_alpha(params_.alpha);
    params_ = make_sector(params_.alpha, params_.condition);
    if (contour_.ray_angle == 0.0) contour_.ray_angle = kPi + params_.alpha / 2.0;
    if (!(contour_.circle_radius > 1.0)) throw ConfigError("circle_radius", "must exceed 1");
    if (!(contour_.tolerance > 0.0)) throw ConfigError("tolerance", "must be positive");
}

cplx PetersSolution::kernel(double modulus, double arg_zeta) const
{
    cplx h = exp_minus_I_parts(params_.alpha, modulus, arg_zeta - params_.alpha).total /
             std::polar(modulus, arg_zeta);
    if (params_.condition == BoundaryKind::Dirichlet) h *= power_minus_mu(params_.mu, modulus, arg_zeta);
    return h;
}

std::vector<double> PetersSolution::pole_angles(double theta) const
{
    const double a = params_.alpha;
    std::vector<double> out;
    for (int j = 0;; ++j) {
        const double ang = -kPi / 2 - 2.0 * j * a;
        if (ang <= theta - 2.0 * kPi) break;
        if (ang < theta) out.push_back(ang);
    }
    for (int j = 0;; ++j) {
        const double ang = kPi / 2 + 2.0 * a * (j + 1);
        if (ang >= theta) break;
        if (ang > theta - 2.0 * kPi) out.push_back(ang);
    }
    return out;
}

double PetersSolution::hairpin_angle(cplx z) const
{
    const double lo = kPi / 2 + params_.alpha + 0.05;
    const double hi = 1.5 * kPi - 0.05;
    double theta = std::clamp(kPi - std::arg(z), lo, hi);
    std::vector<double> poles;
    for (int j = 0; j < 64; ++j) {
        poles.push_back(-kPi / 2 - 2.0 * j * params_.alpha + 2.0 * kPi);
        poles.push_back(kPi / 2 + 2.0 * params_.alpha * (j + 1));
    }
    for (int iter = 0; iter < 8; ++iter) {
        bool moved = false;
        for (double p : poles) {
            if (std::abs(theta - p) < 0.05) {
                theta = p + 0.05 <= hi ? p + 0.05 : p - 0.05;
                moved = true;
            }
        }
        if (!moved) break;
    }
    return std::round(theta * 1e9) / 1e9;
}

const PetersSolution::HairpinGrid& PetersSolution::hairpin_grid(double theta) const
{
    const long long key = std::llround(theta * 1e9);
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = grids_.find(key);
        if (it != grids_.end()) return *it->second;
    }
    double delta = 0.1;
    for (double p : pole_angles(theta)) delta = std::min({delta, std::abs(theta - p), std::abs(theta - 2.0 * kPi - p)});
    delta = std::max(delta, 0.02);
    std::vector<double> breaks;
    for (double r = 1e-14; r < 1.0 - 8.0 * delta * 0.999; r *= 2.0) breaks.push_back(r);
    for (double m : {8.0, 4.0, 2.0, 1.0, 0.5}) breaks.push_back(1.0 - m * delta);
    breaks.push_back(1.0);
    for (double m : {0.5, 1.0, 2.0, 4.0, 8.0}) breaks.push_back(1.0 + m * delta);
    const double rmax = contour_.truncation_radius > 0.0 ? contour_.truncation_radius : 48.0;
    for (double r = 2.0 * (1.0 + 8.0 * delta); r < rmax; r *= 2.0) breaks.push_back(r);
    breaks.push_back(rmax);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::remove_if(breaks.begin(), breaks.end(), [](double r) { return r <= 0.0; }), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end(), [](double a, double b) { return b - a < 1e-15; }),
                 breaks.end());
    const quad::Rule rule = quad::composite(breaks, 20);
    auto grid = std::make_shared<HairpinGrid>();
    grid->theta = theta;
    grid->radii = rule.nodes;
    grid->weights = rule.weights;
    grid->jump.resize(rule.nodes.size());
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double r = rule.nodes[i];
        grid->jump[i] = kernel(r, theta) - kernel(r, theta - 2.0 * kPi);
    }
    std::lock_guard<std::mutex> lock(mutex_);
    auto [it, inserted] = grids_.emplace(key, std::move(grid));
    return *it->second;
}

PetersValue PetersSolution::evaluate_keyhole(cplx z) const
{
    const double radius = contour_.circle_radius;
    const double theta = contour_.ray_angle;
    const double tol = contour_.tolerance;
    const cplx prefactor = std::sqrt(params_.mu) / (kI * kPi);
    PetersValue out{};
    for (int deriv = 0; deriv < 2; ++deriv) {
        auto arc = [&](double t) -> cplx {
            const cplx zeta = std::polar(radius, t);
            cplx v = kernel(radius, t) * std::exp(z * zeta) * kI * zeta;
            return deriv ? v * zeta : v;
        };
        std::vector<double> arc_breaks;
        for (int i = 0; i <= 8; ++i) arc_breaks.push_back(theta - 2.0 * kPi + 2.0 * kPi * i / 8.0);
        const cplx arc_value = quad::integrate(arc, arc_breaks, tol, tol, 4000).value;
        const cplx dir = std::polar(1.0, theta);
        const double decay = std::max(-(z * dir).real(), 1e-3);
        const double umax = std::log(std::max(2.0, 40.0 / decay / radius + 2.0)) + 4.0;
        auto ray = [&](double u) -> cplx {
            const double r = radius * std::exp(u);
            const cplx zeta = r * dir;
            cplx v = (kernel(r, theta) - kernel(r, theta - 2.0 * kPi)) * std::exp(z * zeta) * dir * r;
            return deriv ? v * zeta : v;
        };
        std::vector<double> ray_breaks;
        for (int i = 0; i <= 8; ++i) ray_breaks.push_back(umax * i / 8.0);
        const cplx ray_value = quad::integrate(ray, ray_breaks, tol, tol, 4000).value;
        (deriv ? out.df : out.f) = prefactor * (arc_value + ray_value);
    }
    return out;
}

PetersSolution::Split PetersSolution::split(cplx z) const
{
    if (!(std::abs(z) >= 1.0)) throw ConfigError("z", "residue route requires |z| >= 1");
    const double theta = hairpin_angle(z);
    const HairpinGrid& grid = hairpin_grid(theta);
    const cplx prefactor = std::sqrt(params_.mu) / (kI * kPi);
    Split out{0.0, 0.0, 0.0, 0.0};
    for (double ang : pole_angles(theta)) {
        const cplx p = std::polar(1.0, ang);
        const RayExpMinusI parts = exp_minus_I_parts(params_.alpha, 1.0, ang - params_.alpha);
        cplx res = parts.ray_value * std::exp(z * p) / (2.0 * params_.mu);
        if (params_.condition == BoundaryKind::Dirichlet) res *= power_minus_mu(params_.mu, 1.0, ang);
        (std::abs(ang + kPi / 2) < 1e-12 ? out.plane_wave : out.other_poles) += prefactor * 2.0 * kPi * kI * res;
    }
    if (params_.condition == BoundaryKind::Dirichlet)
        out.constant = 2.0 * std::sqrt(params_.mu) * std::exp(-kI * (params_.alpha * params_.mu));
    const cplx dir = std::polar(1.0, theta);
    cplx sum = 0.0;
    for (std::size_t i = 0; i < grid.radii.size(); ++i)
        sum += grid.weights[i] * grid.jump[i] * std::exp(z * grid.radii[i] * dir) * dir;
    out.hairpin += prefactor * sum;
    return out;
}

PetersValue PetersSolution::evaluate_residues(cplx z) const
{
    if (!(std::abs(z) >= 1.0)) throw ConfigError("z", "residue route requires |z| >= 1");
    const double theta = hairpin_angle(z);
    const HairpinGrid& grid = hairpin_grid(theta);
    const cplx prefactor = std::sqrt(params_.mu) / (kI * kPi);
    cplx sum_f = 0.0;
    cplx sum_df = 0.0;
    for (double ang : pole_angles(theta)) {
        const cplx p = std::polar(1.0, ang);
        const RayExpMinusI parts = exp_minus_I_parts(params_.alpha, 1.0, ang - params_.alpha);
        cplx res = parts.ray_value * std::exp(z * p) / (2.0 * params_.mu);
        if (params_.condition == BoundaryKind::Dirichlet) res *= power_minus_mu(params_.mu, 1.0, ang);
        sum_f += 2.0 * kPi * kI * res;
        sum_df += 2.0 * kPi * kI * res * p;
    }
    if (params_.condition == BoundaryKind::Dirichlet)
        sum_f += 2.0 * kPi * kI * std::exp(-kI * (params_.alpha * params_.mu));
    const cplx dir = std::polar(1.0, theta);
    for (std::size_t i = 0; i < grid.radii.size(); ++i) {
        const cplx zeta = grid.radii[i] * dir;
        const cplx v = grid.weights[i] * grid.jump[i] * std::exp(z * zeta) * dir;
        sum_f += v;
        sum_df += v * zeta;
    }
    return {prefactor * sum_f, prefactor * sum_df};
}

PetersValue PetersSolution::evaluate(cplx z) const
{
    if (z == cplx(0.0)) throw ConfigError("z", "must be nonzero");
    const double arg = std::arg(z);
    if (arg > 1e-12 || arg < -params_.alpha - 1e-12) throw ConfigError("z", "must lie in the closed sector");
    return std::abs(z) < 1.0 ? evaluate_keyhole(z) : evaluate_residues(z);
}

cplx PetersSolution::plane_wave_coefficient() const
{
    const RayExpMinusI parts = exp_minus_I_parts(params_.alpha, 1.0, -kPi / 2 - params_.alpha);
    cplx c = parts.ray_value / std::sqrt(params_.mu);
    if (params_.condition == BoundaryKind::Dirichlet) c *= std::exp(kI * (kPi * params_.mu / 2.0));
    return c;
}

TraceParts peters_trace_parts(const PetersSolution& solution, double x)
{
    if (!(x >= 1.0)) throw ConfigError("x", "trace split requires x >= 1");
    const PetersSolution::Split parts = solution.split(x);
    return {parts.plane_wave.real(), parts.other_poles.real(), (parts.hairpin + parts.constant).real()};
}

cplx eval_peters(const SectorParams& params, cplx z, const ContourQuadrature& contour)
{
    check_alpha(params.alpha);
    if (std::abs(params.alpha - kPi / 2) < 1e-14) {
        const double arg = std::arg(z);
        if (arg > 1e-12 || arg < -kPi / 2 - 1e-12) throw ConfigError("z", "must lie in the closed sector");
        const cplx wave = std::exp(-kI * z);
        return params.condition == BoundaryKind::Neumann ? wave : kI * wave;
    }
    return PetersSolution(params, contour).evaluate(z).f;
}

namespace {

Eigen::Vector2cd plane_wave_lsq(const std::vector<double>& xs, const std::vector<cplx>& values, double p,
                                double& rss)
{
    const Eigen::Index n = static_cast<Eigen::Index>(xs.size());
    Eigen::MatrixXcd a(n, 2);
    Eigen::VectorXcd rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double x = xs[static_cast<std::size_t>(i)];
        a(i, 0) = std::exp(-kI * x);
        a(i, 1) = std::pow(x, -p);
        rhs(i) = values[static_cast<std::size_t>(i)];
    }
    const Eigen::Vector2cd coef = a.colPivHouseholderQr().solve(rhs);
    rss = (a * coef - rhs).squaredNorm();
    return coef;
}

} // namespace

FarFieldFit fit_far_field(const std::vector<double>& xs, const std::vector<cplx>& values, double p_min,
                          double p_max)
{
    if (xs.size() != values.size() || xs.size() < 5) throw ConfigError("samples", "need at least 5 matched samples");
    if (!(p_min > 0.0) || !(p_max > p_min)) throw ConfigError("p_range", "need 0 < p_min < p_max");
    if (!(xs.front() > 0.0)) throw ConfigError("samples", "abscissae must be positive");
    auto rss_at = [&](double p) {
        double rss = 0.0;
        plane_wave_lsq(xs, values, p, rss);
        return rss;
    };
    constexpr int kScan = 400;
    double best_p = p_min;
    double best = rss_at(p_min);
    for (int i = 1; i <= kScan; ++i) {
        const double p = p_min * std::pow(p_max / p_min, static_cast<double>(i) / kScan);
        const double r = rss_at(p);
        if (r < best) {
            best = r;
            best_p = p;
        }
    }
    const double step = std::pow(p_max / p_min, 1.0 / kScan);
    double lo = std::max(p_min, best_p / step);
    double hi = std::min(p_max, best_p * step);
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 100; ++it) {
        const double m1 = hi - ratio * (hi - lo);
        const double m2 = lo + ratio * (hi - lo);
        if (rss_at(m1) < rss_at(m2))
            hi = m2;
        else
            lo = m1;
    }
    const double p = 0.5 * (lo + hi);
    double rss = 0.0;
    const Eigen::Vector2cd coef = plane_wave_lsq(xs, values, p, rss);
    FarFieldFit fit;
    fit.amplitude = std::abs(coef(0));
    fit.phase = std::arg(coef(0));
    fit.decay_exponent = -p;
    fit.remainder_scale = 0.0;
    for (double x : xs) fit.remainder_scale = std::max(fit.remainder_scale, std::abs(coef(1)) * std::pow(x, -p));
    fit.rms_residual = std::sqrt(rss / static_cast<double>(xs.size()));
    return fit;
}

double log_log_slope(const std::vector<double>& xs, const std::vector<cplx>& values)
{
    if (xs.size() != values.size() || xs.size() < 2) throw ConfigError("samples", "need at least 2 matched samples");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] > 0.0) || !(std::abs(values[i]) > 0.0))
            throw NumericalError("log-log slope needs positive abscissae and nonzero values");
        const double lx = std::log(xs[i]);
        const double ly = std::log(std::abs(values[i]));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double n = static_cast<double>(xs.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

FarFieldFit fit_peters_far_field(const PetersSolution& solution, double x_min, double x_max, int samples)
{
    if (!(x_min >= 1.0) || !(x_max > x_min)) throw ConfigError("x_range", "need 1 <= x_min < x_max");
    if (samples < 5) throw ConfigError("samples", "need at least 5");
    std::vector<double> xs(static_cast<std::size_t>(samples));
    std::vector<cplx> vals(xs.size());
    std::vector<cplx> remainder(xs.size());
    double remainder_scale = 0.0;
    for (int i = 0; i < samples; ++i) {
        const auto k = static_cast<std::size_t>(i);
        xs[k] = x_min + (x_max - x_min) * i / (samples - 1);
        const PetersSolution::Split parts = solution.split(xs[k]);
        vals[k] = parts.plane_wave + parts.hairpin;
        remainder[k] = parts.hairpin;
        remainder_scale = std::max(remainder_scale, std::abs(parts.hairpin));
    }
    FarFieldFit fit;
    fit.remainder_scale = remainder_scale;
    double rss = 0.0;
    const double reference = std::abs(solution.plane_wave_coefficient());
    if (remainder_scale <= 1e-12 * reference) {
        const Eigen::Index n = static_cast<Eigen::Index>(xs.size());
        cplx c = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            c += vals[static_cast<std::size_t>(i)] * std::exp(kI * xs[static_cast<std::size_t>(i)]);
        c /= static_cast<double>(n);
        for (std::size_t i = 0; i < xs.size(); ++i) rss += std::norm(vals[i] - c * std::exp(-kI * xs[i]));
        fit.amplitude = std::abs(c);
        fit.phase = std::arg(c);
        fit.decay_exponent = std::numeric_limits<double>::quiet_NaN();
    } else {
        const double slope = log_log_slope(xs, remainder);
        const Eigen::Vector2cd coef = plane_wave_lsq(xs, vals, -slope, rss);
        fit.amplitude = std::abs(coef(0));
        fit.phase = std::arg(coef(0));
        fit.decay_exponent = slope;
    }
    fit.rms_residual = std::sqrt(rss / static_cast<double>(xs.size()));
    return fit;
}

cplx hanson_lewy_gamma(int q)
{
    if (q < 1) throw ConfigError("q", "must be a positive integer");
    // Exact unit values of e^{i pi (q-1)/2}.
    static const std::array<cplx, 4> kUnits{cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};
    return kUnits[static_cast<std::size_t>((q - 1) % 4)];
}

double hanson_lewy_phase(int q)
{
    if (q < 1) throw ConfigError("q", "must be a positive integer");
    return -kPi * (q - 1) / 4.0;
}

HansonLewySolution build_hanson_lewy(int q, BoundaryKind condition)
{
    if (q < 1) throw ConfigError("q", "must be a positive integer");
    HansonLewySolution sol;
    sol.q = q;
    sol.condition = condition;
    sol.xi = std::polar(1.0, -kPi / q);
    auto rotation = [&](int j) { return std::polar(1.0, -kPi * j / q); };
    cplx product = 1.0;
    for (int j = 0; j < q; ++j) {
        if (j > 0) {
            const cplx p = rotation(j);
            product *= (p + 1.0) / (p - 1.0);
        }
        const double even_sign = condition == BoundaryKind::Dirichlet && (j % 2 == 1) ? -1.0 : 1.0;
        const double odd_sign = condition == BoundaryKind::Dirichlet && (j % 2 == 0) ? -1.0 : 1.0;
        sol.terms.push_back({even_sign * product, rotation(j), false});
        sol.terms.push_back({odd_sign * product, rotation(j + 1), true});
    }
    return sol;
}

cplx hl_eval(const HansonLewySolution& sol, cplx z)
{
    cplx sum = 0.0;
    for (const auto& t : sol.terms) sum += t.coefficient * std::exp(-kI * t.rotation * (t.conjugated ? std::conj(z) : z));
    return sum;
}

cplx hl_trace_derivative(const HansonLewySolution& sol, double x, int m)
{
    if (m < 0) throw ConfigError("m", "derivative order must be nonnegative");
    cplx sum = 0.0;
    for (const auto& t : sol.terms) {
        const cplx k = -kI * t.rotation;
        sum += t.coefficient * std::pow(k, m) * std::exp(k * x);
    }
    return sum;
}

cplx hl_derivative_at_origin(const HansonLewySolution& sol, int m)
{
    if (m < 0 || m > 4 * sol.q) throw ConfigError("m", "derivative order must lie in [0, 4q]");
    return hl_trace_derivative(sol, 0.0, m);
}

cplx hl_steklov_defect(const HansonLewySolution& sol, double x)
{
    cplx sum = 0.0;
    for (const auto& t : sol.terms) {
        const cplx factor = t.conjugated ? -t.rotation - 1.0 : t.rotation - 1.0;
        sum += factor * t.coefficient * std::exp(-kI * t.rotation * x);
    }
    return sum;
}

cplx hl_wall_residual(const HansonLewySolution& sol, double radius)
{
    const double alpha = kPi / (2.0 * sol.q);
    const cplx z = std::polar(radius, -alpha);
    if (sol.condition == BoundaryKind::Dirichlet) return hl_eval(sol, z);
    const cplx normal = std::polar(1.0, -alpha - kPi / 2);
    cplx sum = 0.0;
    for (const auto& t : sol.terms) {
        const cplx arg = t.conjugated ? std::conj(z) : z;
        const cplx derivative = -kI * t.rotation * t.coefficient * std::exp(-kI * t.rotation * arg);
        sum += derivative * (t.conjugated ? std::conj(normal) : normal);
    }
    return sum;
}

HansonLewySolution decaying_part(const HansonLewySolution& sol)
{
    HansonLewySolution out = sol;
    out.terms.clear();
    for (const auto& t : sol.terms)
        if (std::abs(t.rotation.imag()) > 1e-12) out.terms.push_back(t);
    return out;
}

double quasimode_frequency(int q, double length, int k)
{
    if (q < 1) throw ConfigError("q", "must be a positive integer");
    if (!(length > 0.0)) throw ConfigError("length", "must be positive");
    if (k < 1) throw ConfigError("k", "must be at least 1");
    return kPi * (k - 0.5 - 0.5 * q) / length;
}

int quasimode_index(int q, double length, double sigma)
{
    if (!(length > 0.0)) throw ConfigError("length", "must be positive");
    if (!(sigma > 0.0)) throw ConfigError("sigma", "must be positive");
    const double n = sigma * length / kPi + 0.5 + 0.5 * q;
    const double k = std::round(n);
    if (std::abs(n - k) > 1e-10 * std::max(1.0, n)) throw ConfigError("sigma", "not on the quantization lattice");
    return static_cast<int>(k);
}

std::vector<double> quasimode_trace(int q, double sigma, const std::vector<double>& xs, double length)
{
    const int k = quasimode_index(q, length, sigma);
    if (xs.size() < 2) throw ConfigError("surface_samples", "need at least two samples");
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i] < -1e-12 || xs[i] > length + 1e-12)
            throw ConfigError("surface_samples", "samples must lie on [0, L]");
        if (i > 0 && !(xs[i] > xs[i - 1])) throw ConfigError("surface_samples", "samples must be increasing");
    }
    const HansonLewySolution full = build_hanson_lewy(q, BoundaryKind::Neumann);
    const HansonLewySolution tail = decaying_part(full);
    const cplx phase = std::polar(1.0, hanson_lewy_phase(q));
    const double sign = (k - 1) % 2 == 0 ? 1.0 : -1.0;
    std::vector<double> trace(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const cplx g = hl_eval(full, sigma * xs[i]) + sign * hl_eval(tail, sigma * (length - xs[i]));
        trace[i] = (phase * g).real();
    }
    double norm2 = 0.0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        const double dx = xs[i + 1] - xs[i];
        norm2 += 0.5 * dx * (trace[i] * trace[i] + trace[i + 1] * trace[i + 1]);
    }
    if (!(norm2 > 0.0)) throw NumericalError("quasimode trace has zero norm");
    const double scale = 1.0 / std::sqrt(norm2);
    for (double& v : trace) v *= scale;
    return trace;
}

} // namespace sloshspec::model
