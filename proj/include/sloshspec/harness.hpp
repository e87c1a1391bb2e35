// Copyright 2026 The sloshspec Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SLOSHSPEC_HARNESS_HPP
#define SLOSHSPEC_HARNESS_HPP

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "sloshspec/geometry.hpp"

namespace sloshspec::harness {

/// |sigma / lambda - 1|; NaN when lambda is zero to within 1e-9.
double relative_deviation(double sigma, double lambda);

struct ComparisonRow {
    int k = 0;
    double lambda = 0.0;
    double sigma = 0.0;
    double deviation = 0.0;
    double errbar = 0.0;  // 2 |lambda(h) - lambda(h/2)|, or 0 when not computed
};

struct ComparisonBlock {
    std::string label;  // e.g. "neumann", "dirichlet", "plus", "minus"
    std::vector<ComparisonRow> rows;
};

struct ComparisonReport {
    std::string name;
    std::vector<ComparisonBlock> blocks;
    nlohmann::json metadata;       // deterministic fields only
    double runtime_seconds = 0.0;  // not serialized
};

struct RunOptions {
    int threads = 2;
    bool error_bars = true;
    double grading_factor = 0.25;
};

/// Example 1: Neumann and Dirichlet spectra of the (2pi/5, pi/6, L = 2) triangle.
/// Example 2: mixed spectra of the two curvilinear domains.
ComparisonReport reproduce_table(int example, double h, const RunOptions& opts = {});

/// FEM spectrum of the isosceles triangle with angles pi/(2q) against the order-2q ODE.
ComparisonReport sl_vs_sloshing(int q, double length, double h, int kmax, const RunOptions& opts = {});

struct ResidualRow {
    int k = 0;
    double sigma = 0.0;
    double residual = 0.0;  // relative residual of the quasimode trace under the discrete DtN map
    double nearest_eigenvalue = 0.0;
    double distance = 0.0;
};

std::vector<ResidualRow> quasimode_residual_study(int q, double length, double h, const std::vector<int>& ks,
                                                  double grading_factor = 0.25);

/// Table writers. Numbers use %.10g; NaN is written as an empty CSV field / JSON null.
std::string format_number(double v);
std::string report_csv(const ComparisonReport& r);
nlohmann::json report_json(const ComparisonReport& r);
std::string residual_csv(const std::vector<ResidualRow>& rows);
nlohmann::json residual_json(const std::vector<ResidualRow>& rows);

/// Writes to a temporary file in the same directory, then renames.
void write_atomic(const std::filesystem::path& path, const std::string& content);

enum class ExperimentKind {
    ReproduceExample1,
    ReproduceExample2,
    SlVsSloshing,
    PetersPhase,
    QuasimodeResidual,
    Convergence,
    Custom,
};

ExperimentKind parse_experiment_kind(const std::string& name);
std::string experiment_kind_name(ExperimentKind k);

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::ReproduceExample1;
    double h = 0.01;
    std::vector<double> h_list;
    int kmax = 10;
    std::vector<int> k_list;
    int q = 2;
    double length = 1.0;
    std::vector<double> alphas;
    std::string bc = "neumann";
    double x_min = 5.0;
    double x_max = 40.0;
    int samples = 141;
    double grading_factor = 0.25;
    bool error_bars = true;
    bool has_domain = false;
    geometry::SloshingDomain domain;
    std::string regime;  // optional asymptotic regime for custom domains
    std::string format = "csv";
    std::filesystem::path output_dir = ".";
    int threads = 2;
};

/// Validates and fills a config; ConfigError names the offending field.
/// Relative "domain_file" paths resolve against `base_dir`.
ExperimentConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = ".");

struct ExperimentOutput {
    std::vector<std::filesystem::path> files;
};

/// Runs one experiment and writes its artifacts atomically into output_dir:
/// <kind>.<csv|json> and plot series <kind>_<series>.csv (two columns each).
ExperimentOutput run_experiment(const ExperimentConfig& config);

/// Machine-readable error document: {"error": kind, "field": ..., "message": ...}.
nlohmann::json error_json(const std::exception& e);

/// 0 success, 1 numerical failure, 2 configuration error.
int exit_code_for(const std::exception& e);

} // namespace sloshspec::harness

#endif
