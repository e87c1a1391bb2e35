// Copyright 2026 The sloshspec Authors
// SPDX-License-Identifier: Apache-2.0

#include "sloshspec/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>
#include <unistd.h>

#include "sloshspec/asymptotics.hpp"
#include "sloshspec/errors.hpp"
#include "sloshspec/fem_steklov.hpp"
#include "sloshspec/highord_sl.hpp"
#include "sloshspec/mesh.hpp"
#include "sloshspec/model_solutions.hpp"

namespace sloshspec::harness {

namespace {

constexpr double pi = std::numbers::pi;
using geometry::Condition;
using nlohmann::json;

// Runs the tasks on up to `threads` workers and rethrows the first failure.
void run_parallel(const std::vector<std::function<void()>>& tasks, int threads)
{
    std::vector<std::exception_ptr> errors(tasks.size());
    auto run_one = [&](std::size_t i) {
        try {
            tasks[i]();
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };
    if (threads <= 1 || tasks.size() <= 1) {
        for (std::size_t i = 0; i < tasks.size(); ++i) run_one(i);
    } else {
        std::size_t next = 0;
        while (next < tasks.size()) {
            std::vector<std::thread> pool;
            for (int t = 0; t < threads && next < tasks.size(); ++t, ++next) pool.emplace_back(run_one, next);
            for (auto& th : pool) th.join();
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

struct SpectrumWithBars {
    std::vector<double> lambda;
    std::vector<double> errbar;
    int surface_nodes = 0;
    int triangles = 0;
};

SpectrumWithBars compute_spectrum(const geometry::SloshingDomain& d, double h, int n, const RunOptions& opts)
{
    SpectrumWithBars out;
    const fem::SteklovSpectrum sp = fem::solve_steklov(d, h, n, opts.grading_factor);
    out.lambda = sp.eigenvalues;
    out.surface_nodes = sp.surface_nodes;
    out.triangles = sp.triangles;
    out.errbar.assign(out.lambda.size(), 0.0);
    if (opts.error_bars) {
        const fem::SteklovSpectrum half = fem::solve_steklov(d, h / 2.0, n, opts.grading_factor);
        for (std::size_t k = 0; k < out.lambda.size(); ++k)
            out.errbar[k] = 2.0 * std::abs(out.lambda[k] - half.eigenvalues[k]);
    }
    return out;
}

struct RegimeChoice {
    asymptotics::Regime regime;
    double alpha;
    double beta;
};

// Chooses the asymptotic regime from the wall conditions at the two corners.
RegimeChoice regime_for_domain(const geometry::SloshingDomain& d)
{
    const Condition ca = d.corner_A.condition_adjacent_wall;
    const Condition cb = d.corner_B.condition_adjacent_wall;
    if (ca == Condition::Neumann && cb == Condition::Neumann)
        return {asymptotics::Regime::NeumannNeumann, d.corner_A.angle, d.corner_B.angle};
    if (ca == Condition::Dirichlet && cb == Condition::Dirichlet)
        return {asymptotics::Regime::DirichletDirichlet, d.corner_A.angle, d.corner_B.angle};
    if (ca == Condition::Dirichlet) return {asymptotics::Regime::MixedDirichletA_NeumannB, d.corner_A.angle, d.corner_B.angle};
    return {asymptotics::Regime::MixedDirichletA_NeumannB, d.corner_B.angle, d.corner_A.angle};
}

ComparisonBlock make_block(const std::string& label, const SpectrumWithBars& s, const std::vector<double>& sigma)
{
    ComparisonBlock b;
    b.label = label;
    for (std::size_t k = 0; k < sigma.size() && k < s.lambda.size(); ++k)
        b.rows.push_back({static_cast<int>(k + 1), s.lambda[k], sigma[k], relative_deviation(sigma[k], s.lambda[k]),
                          s.errbar[k]});
    return b;
}

ComparisonReport compare_domains(const std::string& name, const std::vector<std::string>& labels,
                                 const std::vector<geometry::SloshingDomain>& domains, double h, int kmax,
                                 const RunOptions& opts)
{
    if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("h", "must be positive");
    if (kmax < 1) throw ConfigError("kmax", "must be at least 1");
    const auto start = std::chrono::steady_clock::now();
    std::vector<SpectrumWithBars> spectra(domains.size());
    std::vector<std::function<void()>> tasks;
    for (std::size_t i = 0; i < domains.size(); ++i)
        tasks.push_back([&, i] { spectra[i] = compute_spectrum(domains[i], h, kmax, opts); });
    run_parallel(tasks, opts.threads);
    ComparisonReport r;
    r.name = name;
    r.metadata = {{"h", h}, {"grading_factor", opts.grading_factor}, {"error_bars", opts.error_bars}};
    json blocks = json::array();
    for (std::size_t i = 0; i < domains.size(); ++i) {
        const RegimeChoice rc = regime_for_domain(domains[i]);
        const auto sigma =
            asymptotics::sigma_sequence(rc.regime, rc.alpha, rc.beta, domains[i].surface_length, kmax);
        r.blocks.push_back(make_block(labels[i], spectra[i], sigma));
        blocks.push_back({{"label", labels[i]},
                          {"regime", asymptotics::regime_name(rc.regime)},
                          {"alpha", rc.alpha},
                          {"beta", rc.beta},
                          {"surface_length", domains[i].surface_length},
                          {"surface_nodes", spectra[i].surface_nodes},
                          {"triangles", spectra[i].triangles}});
    }
    r.metadata["domains"] = blocks;
    r.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

json number_or_null(double v)
{
    if (std::isfinite(v)) return v;
    return nullptr;
}

std::string two_column_csv(const std::string& xname, const std::string& yname, const std::vector<double>& x,
                           const std::vector<double>& y)
{
    std::string out = xname + "," + yname + "\n";
    for (std::size_t i = 0; i < x.size(); ++i) out += format_number(x[i]) + "," + format_number(y[i]) + "\n";
    return out;
}

} // namespace

double relative_deviation(double sigma, double lambda)
{
    if (std::abs(lambda) < 1e-9) return std::numeric_limits<double>::quiet_NaN();
    return std::abs(sigma / lambda - 1.0);
}

ComparisonReport reproduce_table(int example, double h, const RunOptions& opts)
{
    if (example == 1) {
        const double a = 2.0 * pi / 5.0, b = pi / 6.0;
        auto r = compare_domains("reproduce_example_1", {"neumann", "dirichlet"},
                                 {geometry::build_triangle_domain(a, b, 2.0, Condition::Neumann, Condition::Neumann),
                                  geometry::build_triangle_domain(a, b, 2.0, Condition::Dirichlet, Condition::Dirichlet)},
                                 h, 10, opts);
        r.metadata["example"] = 1;
        return r;
    }
    if (example == 2) {
        auto r = compare_domains("reproduce_example_2", {"plus", "minus"},
                                 {geometry::build_curvilinear_example(1), geometry::build_curvilinear_example(-1)}, h,
                                 10, opts);
        r.metadata["example"] = 2;
        return r;
    }
    throw ConfigError("example", "must be 1 or 2");
}

ComparisonReport sl_vs_sloshing(int q, double length, double h, int kmax, const RunOptions& opts)
{
    if (q == 1)
        throw ConfigError("q", "q = 1 gives two right-angle corners whose angles sum to pi, so the triangle degenerates");
    if (q < 2) throw ConfigError("q", "must be an integer >= 2");
    if (!(length > 0.0) || !std::isfinite(length)) throw ConfigError("length", "must be positive");
    if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("h", "must be positive");
    if (kmax < 1) throw ConfigError("kmax", "must be at least 1");
    const auto start = std::chrono::steady_clock::now();
    const double angle = pi / (2.0 * q);
    const auto d = geometry::build_triangle_domain(angle, angle, length);
    SpectrumWithBars fem_spec;
    std::vector<sl::Eigenpair> ode;
    run_parallel({[&] { fem_spec = compute_spectrum(d, h, kmax, opts); },
                  [&] { ode = sl::solve_spectrum({q, sl::BoundaryKind::Neumann, length}, kmax); }},
                 opts.threads);
    std::vector<double> sigma;
    for (const auto& e : ode) sigma.push_back(e.lambda);
    ComparisonReport r;
    r.name = "sl_vs_sloshing";
    r.blocks.push_back(make_block("fem_vs_ode", fem_spec, sigma));
    r.metadata = {{"q", q},
                  {"length", length},
                  {"h", h},
                  {"grading_factor", opts.grading_factor},
                  {"error_bars", opts.error_bars},
                  {"surface_nodes", fem_spec.surface_nodes},
                  {"triangles", fem_spec.triangles}};
    r.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

std::vector<ResidualRow> quasimode_residual_study(int q, double length, double h, const std::vector<int>& ks,
                                                  double grading_factor)
{
    if (q < 2) throw ConfigError("q", "must be an integer >= 2");
    if (!(length > 0.0) || !std::isfinite(length)) throw ConfigError("length", "must be positive");
    if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("h", "must be positive");
    if (ks.empty()) throw ConfigError("k_list", "must not be empty");
    for (int k : ks)
        if (k <= q) throw ConfigError("k_list", "entries must exceed q");
    const double angle = pi / (2.0 * q);
    const auto d = geometry::build_triangle_domain(angle, angle, length);
    const auto m = mesh::generate_mesh(d, h, grading_factor);
    const auto dtn = fem::dtn_matrix(fem::assemble(m));
    const int kmax = *std::max_element(ks.begin(), ks.end());
    const int ns = static_cast<int>(dtn.arclength.size());
    const int n_eigs = std::min(kmax + 3, ns / 4);
    if (n_eigs < kmax) throw ConfigError("h", "too coarse for the requested k");
    const fem::SteklovSpectrum sp = fem::solve_dtn(dtn, n_eigs);
    std::vector<ResidualRow> rows;
    for (int k : ks) {
        ResidualRow row;
        row.k = k;
        row.sigma = model::quasimode_frequency(q, length, k);
        const auto trace = model::quasimode_trace(q, row.sigma, dtn.arclength, length);
        row.residual = fem::relative_residual(dtn, Eigen::Map<const Eigen::VectorXd>(trace.data(), ns), row.sigma);
        row.distance = std::numeric_limits<double>::infinity();
        for (double lam : sp.eigenvalues) {
            if (std::abs(lam - row.sigma) < row.distance) {
                row.distance = std::abs(lam - row.sigma);
                row.nearest_eigenvalue = lam;
            }
        }
        rows.push_back(row);
    }
    return rows;
}

std::string format_number(double v)
{
    if (std::isnan(v)) return "";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string report_csv(const ComparisonReport& r)
{
    std::ostringstream os;
    os << "k";
    for (const auto& b : r.blocks)
        os << ",lambda_" << b.label << ",sigma_" << b.label << ",deviation_" << b.label;
    os << "\n";
    std::size_t nrows = 0;
    for (const auto& b : r.blocks) nrows = std::max(nrows, b.rows.size());
    for (std::size_t i = 0; i < nrows; ++i) {
        os << i + 1;
        for (const auto& b : r.blocks) {
            if (i < b.rows.size())
                os << "," << format_number(b.rows[i].lambda) << "," << format_number(b.rows[i].sigma) << ","
                   << format_number(b.rows[i].deviation);
            else
                os << ",,,";
        }
        os << "\n";
    }
    return os.str();
}

json report_json(const ComparisonReport& r)
{
    json blocks = json::array();
    for (const auto& b : r.blocks) {
        json rows = json::array();
        for (const auto& row : b.rows)
            rows.push_back({{"k", row.k},
                            {"lambda", row.lambda},
                            {"sigma", row.sigma},
                            {"deviation", number_or_null(row.deviation)},
                            {"errbar", row.errbar}});
        blocks.push_back({{"label", b.label}, {"rows", rows}});
    }
    return {{"name", r.name}, {"metadata", r.metadata}, {"blocks", blocks}};
}

std::string residual_csv(const std::vector<ResidualRow>& rows)
{
    std::string out = "k,sigma,residual,nearest_eigenvalue,distance\n";
    for (const auto& r : rows)
        out += std::to_string(r.k) + "," + format_number(r.sigma) + "," + format_number(r.residual) + "," +
               format_number(r.nearest_eigenvalue) + "," + format_number(r.distance) + "\n";
    return out;
}

json residual_json(const std::vector<ResidualRow>& rows)
{
    json out = json::array();
    for (const auto& r : rows)
        out.push_back({{"k", r.k},
                       {"sigma", r.sigma},
                       {"residual", r.residual},
                       {"nearest_eigenvalue", r.nearest_eigenvalue},
                       {"distance", r.distance}});
    return out;
}

void write_atomic(const std::filesystem::path& path, const std::string& content)
{
    std::filesystem::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw ConfigError("output_dir", "cannot write " + tmp.string());
        os << content;
        os.flush();
        if (!os) throw NumericalError("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

ExperimentKind parse_experiment_kind(const std::string& name)
{
    static const std::vector<std::pair<std::string, ExperimentKind>> kinds{
        {"reproduce_example_1", ExperimentKind::ReproduceExample1},
        {"reproduce_example_2", ExperimentKind::ReproduceExample2},
        {"sl_vs_sloshing", ExperimentKind::SlVsSloshing},
        {"peters_phase", ExperimentKind::PetersPhase},
        {"quasimode_residual", ExperimentKind::QuasimodeResidual},
        {"convergence", ExperimentKind::Convergence},
        {"custom", ExperimentKind::Custom}};
    for (const auto& [n, k] : kinds)
        if (n == name) return k;
    throw ConfigError("experiment", "unknown experiment kind '" + name + "'");
}

std::string experiment_kind_name(ExperimentKind k)
{
    switch (k) {
    case ExperimentKind::ReproduceExample1: return "reproduce_example_1";
    case ExperimentKind::ReproduceExample2: return "reproduce_example_2";
    case ExperimentKind::SlVsSloshing: return "sl_vs_sloshing";
    case ExperimentKind::PetersPhase: return "peters_phase";
    case ExperimentKind::QuasimodeResidual: return "quasimode_residual";
    case ExperimentKind::Convergence: return "convergence";
    case ExperimentKind::Custom: return "custom";
    }
    return "custom";
}

ExperimentConfig parse_config(const json& j, const std::filesystem::path& base_dir)
{
    if (!j.is_object()) throw ConfigError("config", "must be a JSON object");
    static const std::set<std::string> known{"experiment", "h", "h_list", "kmax", "k_list", "q", "length",
                                             "alphas", "bc", "x_min", "x_max", "samples", "grading_factor",
                                             "error_bars", "domain", "domain_file", "regime", "format",
                                             "output_dir", "threads"};
    for (const auto& [key, value] : j.items())
        if (!known.count(key)) throw ConfigError(key, "unknown configuration key");
    if (!j.contains("experiment")) throw ConfigError("experiment", "is required");

    ExperimentConfig c;
    auto field = [&](const char* name, auto& target) {
        if (!j.contains(name)) return;
        try {
            j.at(name).get_to(target);
        } catch (const nlohmann::json::exception&) {
            throw ConfigError(name, "has the wrong type");
        }
    };
    std::string kind;
    field("experiment", kind);
    c.kind = parse_experiment_kind(kind);
    field("h", c.h);
    field("h_list", c.h_list);
    field("kmax", c.kmax);
    field("k_list", c.k_list);
    field("q", c.q);
    field("length", c.length);
    field("alphas", c.alphas);
    field("bc", c.bc);
    field("x_min", c.x_min);
    field("x_max", c.x_max);
    field("samples", c.samples);
    field("grading_factor", c.grading_factor);
    field("error_bars", c.error_bars);
    field("regime", c.regime);
    field("format", c.format);
    std::string out;
    field("output_dir", out);
    if (!out.empty()) c.output_dir = out;
    field("threads", c.threads);

    if (!(c.h > 0.0) || !std::isfinite(c.h)) throw ConfigError("h", "must be positive");
    for (double h : c.h_list)
        if (!(h > 0.0)) throw ConfigError("h_list", "entries must be positive");
    if (c.kmax < 1) throw ConfigError("kmax", "must be at least 1");
    for (int k : c.k_list)
        if (k < 1) throw ConfigError("k_list", "entries must be at least 1");
    if (!(c.length > 0.0)) throw ConfigError("length", "must be positive");
    for (double a : c.alphas)
        if (!(a > 0.0) || a > pi / 2 + 1e-12) throw ConfigError("alphas", "entries must lie in (0, pi/2]");
    if (c.bc != "neumann" && c.bc != "dirichlet") throw ConfigError("bc", "must be neumann or dirichlet");
    if (!(c.x_min >= 1.0) || !(c.x_max > c.x_min)) throw ConfigError("x_max", "need 1 <= x_min < x_max");
    if (c.samples < 5) throw ConfigError("samples", "must be at least 5");
    if (!(c.grading_factor > 0.0) || c.grading_factor > 1.0)
        throw ConfigError("grading_factor", "must lie in (0, 1]");
    if (c.format != "csv" && c.format != "json") throw ConfigError("format", "must be csv or json");
    if (c.threads < 1) throw ConfigError("threads", "must be at least 1");
    if (!c.regime.empty()) asymptotics::parse_regime(c.regime);

    if (j.contains("domain") && j.contains("domain_file"))
        throw ConfigError("domain", "give either domain or domain_file, not both");
    if (j.contains("domain")) {
        c.domain = geometry::from_json(j.at("domain"));
        c.has_domain = true;
    } else if (j.contains("domain_file")) {
        std::string rel;
        field("domain_file", rel);
        std::filesystem::path p(rel);
        if (p.is_relative()) p = base_dir / p;
        std::ifstream is(p);
        if (!is) throw ConfigError("domain_file", "cannot open " + p.string());
        json dj;
        try {
            is >> dj;
        } catch (const nlohmann::json::exception&) {
            throw ConfigError("domain_file", "is not valid JSON");
        }
        c.domain = geometry::from_json(dj);
        c.has_domain = true;
    }
    if (c.kind == ExperimentKind::Custom && !c.has_domain)
        throw ConfigError("domain", "custom experiments need a domain or domain_file");
    if (c.kind == ExperimentKind::SlVsSloshing || c.kind == ExperimentKind::QuasimodeResidual) {
        if (c.q == 1) throw ConfigError("q", "q = 1 gives a degenerate triangle");
        if (c.q < 2) throw ConfigError("q", "must be an integer >= 2");
    }
    return c;
}

ExperimentOutput run_experiment(const ExperimentConfig& c)
{
    std::error_code ec;
    std::filesystem::create_directories(c.output_dir, ec);
    if (!std::filesystem::is_directory(c.output_dir)) throw ConfigError("output_dir", "cannot create directory");

    const std::string stem = experiment_kind_name(c.kind);
    ExperimentOutput out;
    auto emit = [&](const std::string& name, const std::string& content) {
        const auto path = c.output_dir / name;
        write_atomic(path, content);
        out.files.push_back(path);
    };
    RunOptions opts;
    opts.threads = c.threads;
    opts.error_bars = c.error_bars;
    opts.grading_factor = c.grading_factor;

    auto emit_report = [&](const ComparisonReport& r) {
        if (c.format == "csv")
            emit(stem + ".csv", report_csv(r));
        else
            emit(stem + ".json", report_json(r).dump(2) + "\n");
        for (const auto& b : r.blocks) {
            std::vector<double> ks, lam, sig;
            for (const auto& row : b.rows) {
                ks.push_back(row.k);
                lam.push_back(row.lambda);
                sig.push_back(row.sigma);
            }
            emit(stem + "_" + b.label + "_lambda.csv", two_column_csv("k", "lambda", ks, lam));
            emit(stem + "_" + b.label + "_sigma.csv", two_column_csv("k", "sigma", ks, sig));
        }
    };

    switch (c.kind) {
    case ExperimentKind::ReproduceExample1:
        emit_report(reproduce_table(1, c.h, opts));
        break;
    case ExperimentKind::ReproduceExample2:
        emit_report(reproduce_table(2, c.h, opts));
        break;
    case ExperimentKind::SlVsSloshing:
        emit_report(sl_vs_sloshing(c.q, c.length, c.h, c.kmax, opts));
        break;
    case ExperimentKind::Custom: {
        auto r = compare_domains("custom", {"domain"}, {c.domain}, c.h, c.kmax, opts);
        if (!c.regime.empty()) {
            const auto reg = asymptotics::parse_regime(c.regime);
            const auto sigma = asymptotics::sigma_sequence(reg, c.domain.corner_A.angle, c.domain.corner_B.angle,
                                                           c.domain.surface_length, c.kmax);
            for (std::size_t i = 0; i < r.blocks[0].rows.size(); ++i) {
                auto& row = r.blocks[0].rows[i];
                row.sigma = sigma[i];
                row.deviation = relative_deviation(row.sigma, row.lambda);
            }
            r.metadata["domains"][0]["regime"] = asymptotics::regime_name(reg);
        }
        emit_report(r);
        break;
    }
    case ExperimentKind::QuasimodeResidual: {
        std::vector<int> ks = c.k_list;
        if (ks.empty())
            for (int k = c.q + 2; k <= 10; ++k) ks.push_back(k);
        const auto rows = quasimode_residual_study(c.q, c.length, c.h, ks, c.grading_factor);
        if (c.format == "csv")
            emit(stem + ".csv", residual_csv(rows));
        else
            emit(stem + ".json",
                 json{{"q", c.q}, {"length", c.length}, {"h", c.h}, {"rows", residual_json(rows)}}.dump(2) + "\n");
        std::vector<double> kk, res;
        for (const auto& r : rows) {
            kk.push_back(r.k);
            res.push_back(r.residual);
        }
        emit(stem + "_residual.csv", two_column_csv("k", "residual", kk, res));
        break;
    }
    case ExperimentKind::Convergence: {
        const auto d = c.has_domain ? c.domain : geometry::build_triangle_domain(2.0 * pi / 5.0, pi / 6.0, 2.0);
        const auto hs = c.h_list.empty() ? std::vector<double>{0.04, 0.02, 0.01} : c.h_list;
        const auto ks = c.k_list.empty() ? std::vector<int>{5, 10} : c.k_list;
        const auto rows = fem::convergence_study(d, hs, ks, c.grading_factor);
        std::string csv = "h,k,lambda,observed_order,extrapolated\n";
        json jrows = json::array();
        for (const auto& r : rows) {
            csv += format_number(r.h) + "," + std::to_string(r.k) + "," + format_number(r.lambda) + "," +
                   format_number(r.observed_order) + "," + format_number(r.extrapolated) + "\n";
            jrows.push_back({{"h", r.h},
                             {"k", r.k},
                             {"lambda", r.lambda},
                             {"observed_order", r.observed_order},
                             {"extrapolated", r.extrapolated}});
        }
        if (c.format == "csv")
            emit(stem + ".csv", csv);
        else
            emit(stem + ".json", json{{"rows", jrows}}.dump(2) + "\n");
        for (int k : ks) {
            std::vector<double> hh, lam;
            for (const auto& r : rows)
                if (r.k == k) {
                    hh.push_back(r.h);
                    lam.push_back(r.lambda);
                }
            emit(stem + "_k" + std::to_string(k) + ".csv", two_column_csv("h", "lambda", hh, lam));
        }
        break;
    }
    case ExperimentKind::PetersPhase: {
        const auto alphas = c.alphas.empty() ? std::vector<double>{pi / 3, pi / 4, pi / 5} : c.alphas;
        const auto bc = sl::parse_boundary(c.bc);
        std::vector<model::FarFieldFit> fits(alphas.size());
        std::vector<std::vector<double>> traces(alphas.size());
        std::vector<double> xs;
        for (int i = 0; i < c.samples; ++i) xs.push_back(c.x_min + (c.x_max - c.x_min) * i / (c.samples - 1));
        std::vector<std::function<void()>> tasks;
        for (std::size_t i = 0; i < alphas.size(); ++i)
            tasks.push_back([&, i] {
                const model::PetersSolution s(model::make_sector(alphas[i], bc));
                fits[i] = model::fit_peters_far_field(s, c.x_min, c.x_max, c.samples);
                for (double x : xs) traces[i].push_back(s.evaluate(x).f.real());
            });
        run_parallel(tasks, c.threads);
        std::string csv = "alpha,mu,chi,fitted_phase,amplitude,decay_exponent,target_exponent\n";
        json jrows = json::array();
        for (std::size_t i = 0; i < alphas.size(); ++i) {
            const auto p = model::make_sector(alphas[i], bc);
            const double target = (bc == sl::BoundaryKind::Neumann ? -1.0 : -2.0) * p.mu;
            csv += format_number(p.alpha) + "," + format_number(p.mu) + "," + format_number(p.chi) + "," +
                   format_number(fits[i].phase) + "," + format_number(fits[i].amplitude) + "," +
                   format_number(fits[i].decay_exponent) + "," + format_number(target) + "\n";
            jrows.push_back({{"alpha", p.alpha},
                             {"mu", p.mu},
                             {"chi", p.chi},
                             {"fitted_phase", fits[i].phase},
                             {"amplitude", fits[i].amplitude},
                             {"decay_exponent", number_or_null(fits[i].decay_exponent)},
                             {"target_exponent", target}});
            emit(stem + "_alpha" + std::to_string(i) + ".csv", two_column_csv("x", "re_f", xs, traces[i]));
        }
        if (c.format == "csv")
            emit(stem + ".csv", csv);
        else
            emit(stem + ".json", json{{"bc", c.bc}, {"rows", jrows}}.dump(2) + "\n");
        break;
    }
    }
    return out;
}

json error_json(const std::exception& e)
{
    if (const auto* ce = dynamic_cast<const ConfigError*>(&e))
        return {{"error", "config"}, {"field", ce->field()}, {"message", e.what()}};
    if (dynamic_cast<const NumericalError*>(&e)) return {{"error", "numerical"}, {"message", e.what()}};
    return {{"error", "internal"}, {"message", e.what()}};
}

int exit_code_for(const std::exception& e)
{
    return dynamic_cast<const ConfigError*>(&e) ? 2 : 1;
}

} // namespace sloshspec::harness
