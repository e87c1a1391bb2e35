// Copyright 2026 The sloshspec Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sloshspec/asymptotics.hpp"
#include "sloshspec/errors.hpp"
#include "sloshspec/fem_steklov.hpp"
#include "sloshspec/harness.hpp"
#include "sloshspec/highord_sl.hpp"
#include "sloshspec/mesh.hpp"
#include "sloshspec/model_solutions.hpp"

using namespace sloshspec;
using nlohmann::json;

namespace {

struct GlobalOptions {
    std::string format = "csv";
    std::string out_dir;
    long long seed = 0;
    int threads = 2;
};

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

std::string table_csv(const Table& t)
{
    std::string s;
    for (std::size_t i = 0; i < t.columns.size(); ++i) s += (i ? "," : "") + t.columns[i];
    s += "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + harness::format_number(row[i]);
        s += "\n";
    }
    return s;
}

json table_json(const Table& t)
{
    json rows = json::array();
    for (const auto& row : t.rows) {
        json r = json::object();
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (std::isfinite(row[i]))
                r[t.columns[i]] = row[i];
            else
                r[t.columns[i]] = nullptr;
        }
        rows.push_back(r);
    }
    return rows;
}

// Prints to stdout, or writes <name>.<format> into --out.
void emit(const GlobalOptions& g, const std::string& name, const std::string& csv, const json& doc)
{
    const std::string content = g.format == "csv" ? csv : doc.dump(2) + "\n";
    if (g.out_dir.empty()) {
        std::cout << content;
        return;
    }
    std::error_code ec;
    std::filesystem::create_directories(g.out_dir, ec);
    if (!std::filesystem::is_directory(g.out_dir)) throw ConfigError("out", "cannot create directory " + g.out_dir);
    harness::write_atomic(std::filesystem::path(g.out_dir) / (name + "." + g.format), content);
}

void emit_table(const GlobalOptions& g, const std::string& name, const Table& t, json meta = json::object())
{
    meta["rows"] = table_json(t);
    emit(g, name, table_csv(t), meta);
}

geometry::SloshingDomain load_domain(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw ConfigError("domain", "cannot open " + path);
    json j;
    try {
        is >> j;
    } catch (const json::exception&) {
        throw ConfigError("domain", "is not valid JSON");
    }
    return geometry::from_json(j);
}

std::ofstream open_output(const std::string& path, const std::string& field, bool binary)
{
    std::ofstream os(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
    if (!os) throw ConfigError(field, "cannot write " + path);
    return os;
}

int report_error(const std::exception& e)
{
    std::cerr << harness::error_json(e).dump() << "\n";
    return harness::exit_code_for(e);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Sloshing eigenvalue asymptotics, model solutions and FEM experiments"};
    app.set_help_flag("--help", "Print help and exit");
    app.require_subcommand(1);
    app.fallthrough();
    GlobalOptions g;
    app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--out", g.out_dir, "Write outputs into this directory instead of stdout");
    app.add_option("--seed", g.seed, "Reserved; all algorithms are deterministic");
    app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);

    // asymptotics
    auto* asym = app.add_subcommand("asymptotics", "Quasi-frequencies sigma_k");
    std::string regime = "nn";
    double alpha = std::numbers::pi / 4, beta = std::numbers::pi / 4, length = 1.0;
    int kmax = 10;
    asym->add_option("--regime", regime, "nn, dd, dn, halfpi-n or halfpi-d");
    asym->add_option("--alpha", alpha, "Angle at A");
    asym->add_option("--beta", beta, "Angle at B");
    asym->add_option("--length", length, "Surface length");
    asym->add_option("--kmax", kmax, "Number of terms");

    // sl
    auto* slc = app.add_subcommand("sl", "Higher-order Sturm-Liouville spectrum");
    int q = 2;
    std::string bc = "neumann";
    slc->add_option("--q", q, "Half the ODE order");
    slc->add_option("--bc", bc, "neumann or dirichlet");
    slc->add_option("--length", length, "Interval length");
    slc->add_option("--kmax", kmax, "Number of eigenvalues");

    // peters
    auto* pet = app.add_subcommand("peters", "Sector model solution on the free surface");
    int samples = 200;
    double xmax = 40.0;
    pet->add_option("--alpha", alpha, "Sector angle in (0, pi/2]");
    pet->add_option("--bc", bc, "neumann or dirichlet");
    pet->add_option("--samples", samples, "Number of sample points");
    pet->add_option("--xmax", xmax, "Largest sample position");

    // fem
    auto* femc = app.add_subcommand("fem", "P1 finite-element Steklov eigenvalues");
    std::string domain_path, dump_mesh, dump_dtn;
    double h = 0.01, grading = 0.25;
    int neigs = 10;
    bool no_errbar = false;
    femc->add_option("--domain", domain_path, "Domain JSON file")->required();
    femc->add_option("--h", h, "Mesh size");
    femc->add_option("--neigs", neigs, "Number of eigenvalues");
    femc->add_option("--grading", grading, "Corner grading factor in (0, 1]");
    femc->add_flag("--no-errbar", no_errbar, "Skip the h/2 solve");
    femc->add_option("--dump-mesh", dump_mesh, "Write the mesh as text");
    femc->add_option("--dump-dtn", dump_dtn, "Write the DtN matrix as binary");

    // reproduce
    auto* rep = app.add_subcommand("reproduce", "Reproduce an example table");
    int example = 1;
    rep->add_option("--example", example, "1 or 2");
    rep->add_option("--h", h, "Mesh size");
    rep->add_option("--grading", grading, "Corner grading factor");
    rep->add_flag("--no-errbar", no_errbar, "Skip the h/2 solves");

    // residual
    auto* res = app.add_subcommand("residual", "Quasimode residuals under the discrete DtN map");
    std::vector<int> ks;
    res->add_option("--q", q, "Corner parameter, angles pi/(2q)");
    res->add_option("--length", length, "Surface length");
    res->add_option("--h", h, "Mesh size");
    res->add_option("--k", ks, "Mode indices")->delimiter(',');
    res->add_option("--grading", grading, "Corner grading factor");

    // convergence
    auto* conv = app.add_subcommand("convergence", "Mesh convergence study");
    std::vector<double> hs;
    conv->add_option("--domain", domain_path, "Domain JSON file (default: Example 1 Neumann triangle)");
    conv->add_option("--h-list", hs, "Mesh sizes")->delimiter(',');
    conv->add_option("--k", ks, "Mode indices")->delimiter(',');
    conv->add_option("--grading", grading, "Corner grading factor");

    // run
    auto* run = app.add_subcommand("run", "Run a JSON-configured experiment");
    std::string config_path;
    run->add_option("--config", config_path, "Configuration file")->required();

    for (auto* sub : app.get_subcommands({})) sub->set_help_flag("--help", "Print help and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report_error(ConfigError("arguments", e.what()));
    }

    try {
        if (*asym) {
            const auto r = asymptotics::parse_regime(regime);
            require(kmax >= 1, "kmax", "must be at least 1");
            Table t{{"k", "sigma"}, {}};
            const auto sigma = asymptotics::sigma_sequence(r, alpha, beta, length, kmax);
            for (int k = 1; k <= kmax; ++k) t.rows.push_back({double(k), sigma[k - 1]});
            emit_table(g, "asymptotics", t,
                       {{"regime", asymptotics::regime_name(r)}, {"alpha", alpha}, {"beta", beta}, {"length", length}});
        } else if (*slc) {
            const sl::Problem p{q, sl::parse_boundary(bc), length};
            const auto spec = sl::solve_spectrum(p, kmax);
            Table t{{"k", "lambda", "prediction", "residual"}, {}};
            for (int k = 1; k <= static_cast<int>(spec.size()); ++k) {
                const double pred = k > q ? sl::ode_asymptotic_prediction(q, length, k) : std::nan("");
                t.rows.push_back({double(k), spec[k - 1].lambda, pred, spec[k - 1].lambda - pred});
            }
            emit_table(g, "sl", t, {{"q", q}, {"bc", bc}, {"length", length}});
        } else if (*pet) {
            require(samples >= 2, "samples", "must be at least 2");
            require(xmax > 0.0, "xmax", "must be positive");
            const model::PetersSolution s(model::make_sector(alpha, sl::parse_boundary(bc)));
            const auto c = s.plane_wave_coefficient();
            Table t{{"x", "re_f", "im_f", "planewave_re", "residual"}, {}};
            for (int i = 1; i <= samples; ++i) {
                const double x = xmax * i / samples;
                const auto f = s.evaluate(x).f;
                const double pw = (c * std::exp(model::cplx(0.0, -x))).real();
                t.rows.push_back({x, f.real(), f.imag(), pw, f.real() - pw});
            }
            emit_table(g, "peters", t,
                       {{"alpha", alpha}, {"bc", bc}, {"mu", s.params().mu}, {"chi", s.params().chi}});
        } else if (*femc) {
            const auto d = load_domain(domain_path);
            require(h > 0.0, "h", "must be positive");
            require(neigs >= 1, "neigs", "must be at least 1");
            const auto m = mesh::generate_mesh(d, h, grading);
            const auto dtn = fem::dtn_matrix(fem::assemble(m));
            const auto sp = fem::solve_dtn(dtn, neigs);
            std::vector<double> errbar(sp.eigenvalues.size(), std::nan(""));
            if (!no_errbar) {
                const auto half = fem::solve_steklov(d, h / 2, neigs, grading);
                for (std::size_t k = 0; k < errbar.size(); ++k)
                    errbar[k] = 2.0 * std::abs(sp.eigenvalues[k] - half.eigenvalues[k]);
            }
            if (!dump_mesh.empty()) {
                auto os = open_output(dump_mesh, "dump-mesh", false);
                mesh::write_dump(os, m);
            }
            if (!dump_dtn.empty()) {
                auto os = open_output(dump_dtn, "dump-dtn", true);
                fem::write_dtn_binary(os, dtn);
            }
            Table t{{"k", "lambda", "errbar"}, {}};
            for (std::size_t k = 0; k < sp.eigenvalues.size(); ++k)
                t.rows.push_back({double(k + 1), sp.eigenvalues[k], errbar[k]});
            emit_table(g, "fem", t,
                       {{"h", h},
                        {"grading_factor", grading},
                        {"surface_nodes", static_cast<int>(dtn.arclength.size())},
                        {"triangles", static_cast<int>(m.triangles.size())}});
        } else if (*rep) {
            harness::RunOptions opts;
            opts.threads = g.threads;
            opts.error_bars = !no_errbar;
            opts.grading_factor = grading;
            const auto r = harness::reproduce_table(example, h, opts);
            emit(g, r.name, harness::report_csv(r), harness::report_json(r));
        } else if (*res) {
            if (ks.empty())
                for (int k = q + 2; k <= 10; ++k) ks.push_back(k);
            const auto rows = harness::quasimode_residual_study(q, length, h, ks, grading);
            emit(g, "residual", harness::residual_csv(rows),
                 json{{"q", q}, {"length", length}, {"h", h}, {"rows", harness::residual_json(rows)}});
        } else if (*conv) {
            const auto d = domain_path.empty()
                               ? geometry::build_triangle_domain(2 * std::numbers::pi / 5, std::numbers::pi / 6, 2.0)
                               : load_domain(domain_path);
            if (hs.empty()) hs = {0.04, 0.02, 0.01};
            if (ks.empty()) ks = {5, 10};
            const auto rows = fem::convergence_study(d, hs, ks, grading);
            Table t{{"h", "k", "lambda", "observed_order", "extrapolated"}, {}};
            for (const auto& r : rows) t.rows.push_back({r.h, double(r.k), r.lambda, r.observed_order, r.extrapolated});
            emit_table(g, "convergence", t, {{"grading_factor", grading}});
        } else if (*run) {
            std::ifstream is(config_path);
            if (!is) throw ConfigError("config", "cannot open " + config_path);
            json j;
            try {
                is >> j;
            } catch (const json::exception&) {
                throw ConfigError("config", "is not valid JSON");
            }
            const auto base = std::filesystem::path(config_path).parent_path();
            auto cfg = harness::parse_config(j, base.empty() ? std::filesystem::path(".") : base);
            if (!g.out_dir.empty()) cfg.output_dir = g.out_dir;
            if (app.get_option("--threads")->count() > 0) cfg.threads = g.threads;
            if (app.get_option("--format")->count() > 0) cfg.format = g.format;
            const auto out = harness::run_experiment(cfg);
            for (const auto& f : out.files) std::cout << f.string() << "\n";
        }
    } catch (const std::exception& e) {
        return report_error(e);
    }
    return 0;
}
