// Copyright 2026 The sloshspec Authors
// SPDX-License-Identifier: Apache-2.0

#include "sloshspec/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sloshspec/errors.hpp"

namespace sloshspec::asymptotics {

namespace {

constexpr double pi = std::numbers::pi;

void check_angle(double a, const char* field)
{
    require(std::isfinite(a) && a > 0.0 && a < pi, field, "corner angle must lie in (0, pi)");
}

} // namespace

Regime parse_regime(const std::string& name)
{
    if (name == "nn") return Regime::NeumannNeumann;
    if (name == "dd") return Regime::DirichletDirichlet;
    if (name == "dn" || name == "mixed") return Regime::MixedDirichletA_NeumannB;
    if (name == "halfpi-n") return Regime::HalfPiNeumann;
    if (name == "halfpi-d") return Regime::HalfPiDirichlet;
    throw ConfigError("regime", "unknown regime '" + name + "'");
}

std::string regime_name(Regime r)
{
    switch (r) {
    case Regime::NeumannNeumann: return "nn";
    case Regime::DirichletDirichlet: return "dd";
    case Regime::MixedDirichletA_NeumannB: return "dn";
    case Regime::HalfPiNeumann: return "halfpi-n";
    case Regime::HalfPiDirichlet: return "halfpi-d";
    }
    return "?";
}

double sigma_k(Regime r, double alpha, double beta, double length, int k)
{
    require(k >= 1, "k", "index must be >= 1");
    require(std::isfinite(length) && length > 0.0, "length", "must be positive");
    check_angle(beta, "beta");
    const double pi2_8 = pi * pi / 8.0;
    double phase = 0.0;
    switch (r) {
    case Regime::NeumannNeumann:
        check_angle(alpha, "alpha");
        phase = pi * (k - 0.5) - pi2_8 * (1.0 / alpha + 1.0 / beta);
        break;
    case Regime::DirichletDirichlet:
        check_angle(alpha, "alpha");
        phase = pi * (k - 0.5) + pi2_8 * (1.0 / alpha + 1.0 / beta);
        break;
    case Regime::MixedDirichletA_NeumannB:
        check_angle(alpha, "alpha");
        phase = pi * (k - 0.5) + pi2_8 * (1.0 / alpha - 1.0 / beta);
        break;
    case Regime::HalfPiNeumann:
        phase = pi * (k - 0.75) - pi2_8 / beta;
        break;
    case Regime::HalfPiDirichlet:
        phase = pi * (k - 0.25) + pi2_8 / beta;
        break;
    }
    return phase / length;
}

std::vector<double> sigma_sequence(Regime r, double alpha, double beta, double length, int kmax)
{
    require(kmax >= 1, "kmax", "must be >= 1");
    std::vector<double> out;
    out.reserve(kmax);
    for (int k = 1; k <= kmax; ++k) out.push_back(sigma_k(r, alpha, beta, length, k));
    return out;
}

RemainderRate remainder_exponent(Regime r, double alpha, double beta)
{
    check_angle(beta, "beta");
    switch (r) {
    case Regime::NeumannNeumann:
        check_angle(alpha, "alpha");
        return {false, 1.0 - pi / (2.0 * std::max(alpha, beta))};
    case Regime::DirichletDirichlet:
        check_angle(alpha, "alpha");
        return {false, 1.0 - pi / std::max(alpha, beta)};
    case Regime::MixedDirichletA_NeumannB:
        check_angle(alpha, "alpha");
        return {false, 1.0 - pi / std::max(alpha, 2.0 * beta)};
    case Regime::HalfPiNeumann:
    case Regime::HalfPiDirichlet:
        if (std::abs(beta - pi / 2.0) < 1e-14) return {true, 0.0};
        return {false, 1.0 - pi / (2.0 * beta)};
    }
    return {};
}

double weyl_count_estimate(double lambda, double length)
{
    require(std::isfinite(length) && length > 0.0, "length", "must be positive");
    return length * lambda / pi;
}

bool is_conjectural(Regime r, double alpha, double beta)
{
    const bool uses_alpha = r != Regime::HalfPiNeumann && r != Regime::HalfPiDirichlet;
    return beta > pi / 2.0 || (uses_alpha && alpha > pi / 2.0);
}

} // namespace sloshspec::asymptotics
