// Copyright 2026 The sloshspec Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SLOSHSPEC_MODEL_SOLUTIONS_HPP
#define SLOSHSPEC_MODEL_SOLUTIONS_HPP

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "sloshspec/highord_sl.hpp"

namespace sloshspec::model {

using cplx = std::complex<double>;
using sl::BoundaryKind;

struct SectorParams {
    double alpha = 0.0;
    BoundaryKind condition = BoundaryKind::Neumann;
    double mu = 0.0;
    double chi = 0.0;
};

/// Validates alpha in (0, pi/2] and fills mu = pi/(2 alpha) and the far-field phase.
SectorParams make_sector(double alpha, BoundaryKind condition);

/// Far-field phase pi/4 (1 - mu) for Neumann, pi/4 (1 + mu) for Dirichlet.
double far_field_phase(double alpha, BoundaryKind condition);

/// Integral (1/pi) int_0^inf log(1 + v^{-2mu}) zeta / (v^2 + zeta^2) dv taken
/// along the ray through zeta. Requires |arg zeta| < alpha - 1e-8.
cplx eval_I_alpha(double alpha, cplx zeta);

/// exp(-I) continued analytically from the principal sector to the point
/// |w| e^{i arg_w}, with arg_w a continuous argument in (-3pi/2, 3pi/2).
cplx exp_minus_I(double alpha, double modulus, double arg_w);

/// Representation valid for Re zeta > 0 with the log singularity at t = 1
/// removed analytically.
cplx eval_g_alpha(double alpha, cplx zeta);

/// g continued from the right half-plane: ((zeta + i)/zeta) exp(-I(zeta e^{-i alpha}))
/// with arg zeta taken continuously.
cplx eval_g_continued(double alpha, double modulus, double arg_zeta);

/// Closed form pi^2 (1 - mu) / 4. Rejects mu <= 1/2.
double eval_ReJ(double mu);

/// Real part of the defining integral of J(mu), by adaptive quadrature.
double eval_ReJ_quadrature(double mu);

struct ContourQuadrature {
    double ray_angle = 0.0;          // direction of the branch-cut rays
    double circle_radius = 2.0;
    double truncation_radius = 0.0;  // outer end of the rays (0 picks automatically)
    double tolerance = 1e-11;
};

/// Default keyhole path for a given sector: rays at pi + alpha/2.
ContourQuadrature default_contour(const SectorParams& params);

struct PetersValue {
    cplx f;
    cplx df;
};

/// Contour-integral solution f for a sector (velocity potential Re f).
/// Normalized so that f = 2 mu^{1/2} sum of residues; evaluation is thread-safe.
class PetersSolution {
public:
    explicit PetersSolution(SectorParams params, ContourQuadrature contour = {});

    const SectorParams& params() const { return params_; }

    /// Value and derivative at z with -alpha <= arg z <= 0, z != 0.
    PetersValue evaluate(cplx z) const;

    /// Keyhole route around radius `circle_radius` (used for |z| < 1).
    PetersValue evaluate_keyhole(cplx z) const;

    /// Residue expansion plus a hairpin integral (used for |z| >= 1).
    PetersValue evaluate_residues(cplx z) const;

    /// Coefficient c with f ~ c e^{-iz} along the real axis.
    cplx plane_wave_coefficient() const;

    /// Residue route split into the pole at -i, the remaining poles, the
    /// hairpin integral, and the constant from the small circle (Dirichlet only).
    /// Requires |z| >= 1.
    struct Split {
        cplx plane_wave;
        cplx other_poles;
        cplx hairpin;
        cplx constant;
    };
    Split split(cplx z) const;

private:
    struct HairpinGrid {
        double theta = 0.0;
        std::vector<double> radii;
        std::vector<double> weights;
        std::vector<cplx> jump;  // H_+ - H_- without the exponential factor
    };

    cplx kernel(double modulus, double arg_zeta) const;
    const HairpinGrid& hairpin_grid(double theta) const;
    double hairpin_angle(cplx z) const;
    std::vector<double> pole_angles(double theta) const;

    SectorParams params_;
    ContourQuadrature contour_;
    mutable std::mutex mutex_;
    mutable std::map<long long, std::shared_ptr<const HairpinGrid>> grids_;
};

/// For alpha = pi/2 the closed forms e^{-iz} (Neumann) and i e^{-iz} (Dirichlet);
/// otherwise the contour solution.
cplx eval_peters(const SectorParams& params, cplx z, const ContourQuadrature& contour = {});

struct FarFieldFit {
    double amplitude = 0.0;
    double phase = 0.0;
    double decay_exponent = 0.0;  // remainder ~ x^{decay_exponent}; NaN if no algebraic remainder
    double remainder_scale = 0.0;  // max |remainder| over the samples
    double rms_residual = 0.0;
};

/// Fits values(x) ~ c e^{-ix} + d x^{-p} with complex c, d by least squares, scanning
/// and golden-refining p over [p_min, p_max]. amplitude = |c|, phase = arg c.
FarFieldFit fit_far_field(const std::vector<double>& xs, const std::vector<cplx>& values,
                          double p_min = 0.2, double p_max = 8.0);

/// Slope of log|values| against log x by linear regression.
double log_log_slope(const std::vector<double>& xs, const std::vector<cplx>& values);

/// Far-field fit of f on the real axis over [x_min, x_max] with uniform samples.
/// The exponentially decaying residue terms and the Dirichlet constant are removed;
/// the decay exponent is the log-log slope of the remaining algebraic part, and
/// amplitude and phase come from a least-squares fit with that exponent held fixed.
/// A remainder below 1e-12 of the amplitude is reported as absent (NaN exponent).
FarFieldFit fit_peters_far_field(const PetersSolution& solution, double x_min, double x_max,
                                 int samples);

/// Real-axis trace separated into the oscillating part, exponentially decaying
/// residue terms, and the algebraic hairpin part.
struct TraceParts {
    double plane_wave = 0.0;
    double residues = 0.0;
    double hairpin = 0.0;
};
TraceParts peters_trace_parts(const PetersSolution& solution, double x);

struct HansonLewyTerm {
    cplx coefficient;
    cplx rotation;  // unit complex number; term is c e^{-i rotation z} (or z-bar)
    bool conjugated = false;
};

struct HansonLewySolution {
    int q = 0;
    BoundaryKind condition = BoundaryKind::Neumann;
    cplx xi;
    std::vector<HansonLewyTerm> terms;
};

HansonLewySolution build_hanson_lewy(int q, BoundaryKind condition);

/// e^{i pi (q - 1) / 2}.
cplx hanson_lewy_gamma(int q);

/// Sum of all terms at z.
cplx hl_eval(const HansonLewySolution& sol, cplx z);

/// m-th x-derivative of the trace sum at real x.
cplx hl_trace_derivative(const HansonLewySolution& sol, double x, int m);

/// m-th derivative of the trace at x = 0. Requires 0 <= m <= 4q.
cplx hl_derivative_at_origin(const HansonLewySolution& sol, int m);

/// d/dy - 1 applied to the sum on the real axis.
cplx hl_steklov_defect(const HansonLewySolution& sol, double x);

/// Wall quantity on arg z = -pi/(2q): normal derivative (Neumann) or value (Dirichlet).
cplx hl_wall_residual(const HansonLewySolution& sol, double radius);

/// Terms with |Im rotation| > 0, which decay along the positive real axis.
HansonLewySolution decaying_part(const HansonLewySolution& sol);

/// Phase of the far-field plane wave: -pi (q - 1) / 4.
double hanson_lewy_phase(int q);

/// sigma L = pi (k - 1/2) - pi q / 2.
double quasimode_frequency(int q, double length, int k);

/// Rejects sigma off the lattice by more than 1e-10 in sigma L / pi.
int quasimode_index(int q, double length, double sigma);

/// Glued trace Re(e^{i chi} g) at surface positions xs in [0, L], with
/// g(z) = upsilon(sigma z) + (-1)^{k-1} upsilon^d(sigma (L - z-bar)),
/// normalized to unit discrete L2 norm with trapezoid weights.
std::vector<double> quasimode_trace(int q, double sigma, const std::vector<double>& xs,
                                    double length);

} // namespace sloshspec::model

#endif
