// Copyright 2026 The qsf Authors
// SPDX-License-Identifier: Apache-2.0

// qsf: reference tables, parameter queries, q-normal curves and EGOE(t+k)
// strength-function simulations.

#include "qsf/bca.hpp"
#include "qsf/ensemble.hpp"
#include "qsf/qnormal.hpp"
#include "qsf/report.hpp"
#include "qsf/spectral.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace {

struct Options {
    int N = 12;
    int m = 6;
    int t = 1;
    int k = 2;
    std::optional<double> lambda;
    std::optional<double> xi_sq;
    std::string mode = "finite";
    std::size_t members = 100;
    std::uint64_t seed = 1;
    std::vector<double> windows{-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0};
    double window_width = 0.1;
    std::string grid = "-3.2:3.2:64";
    std::string points = "-4:4:161";
    std::string out = ".";
    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    std::string convention = "per-member";
    bool check = false;
    bool verify = false;
    int which = 1;
    std::vector<double> e_hat{-2.0, -1.0, 0.0, 1.0, 2.0};
    double q = 0.0;
    std::optional<double> y;
    double xi = 0.0;
};

qsf::Grid parse_grid(const std::string& text) {
    std::istringstream ss(text);
    qsf::Grid g;
    char c1 = 0;
    char c2 = 0;
    if (!(ss >> g.lo >> c1 >> g.hi >> c2 >> g.bins) || c1 != ':' || c2 != ':') {
        throw std::invalid_argument("grid must look like lo:hi:count, got " + text);
    }
    g.validate();
    return g;
}

std::vector<double> parse_points(const std::string& text) {
    const qsf::Grid g = parse_grid(text);
    std::vector<double> xs;
    if (g.bins == 1) {
        return {g.lo};
    }
    for (int i = 0; i < g.bins; ++i) {
        xs.push_back(g.lo + (g.hi - g.lo) * i / (g.bins - 1));
    }
    return xs;
}

qsf::QMode parse_mode(const std::string& s) {
    if (s == "finite") {
        return qsf::QMode::finite_n;
    }
    if (s == "infinite") {
        return qsf::QMode::infinite_n;
    }
    throw std::invalid_argument("mode must be finite or infinite");
}

qsf::SystemParams system_from(const Options& o) {
    if (o.lambda.has_value() == o.xi_sq.has_value()) {
        throw std::invalid_argument("give exactly one of --lambda and --xi-sq");
    }
    qsf::SystemParams p{o.N, o.m, o.t, o.k, 0.0};
    p.validate();
    p.lambda = o.lambda ? *o.lambda : qsf::lambda_for_xi_sq(o.N, o.m, o.t, o.k, *o.xi_sq, parse_mode(o.mode));
    p.validate();
    return p;
}

std::string out_path(const Options& o, const std::string& name) {
    std::filesystem::create_directories(o.out);
    return (std::filesystem::path(o.out) / name).string();
}

int cmd_tables(const Options& o) {
    const std::string path = out_path(o, "table" + std::to_string(o.which) + ".csv");
    qsf::write_csv_file(path, qsf::make_reference_table(o.which));
    std::cout << "wrote " << path << '\n';
    return 0;
}

int cmd_params(const Options& o) {
    const qsf::SystemParams p = system_from(o);
    const qsf::CsvTable t = qsf::make_params_table(p, o.e_hat);
    const std::string path = out_path(o, "params.csv");
    qsf::write_csv_file(path, t);
    qsf::write_csv(std::cout, t);
    return 0;
}

int cmd_qnormal(const Options& o) {
    const qsf::QValue q(o.q);
    qsf::CsvTable t;
    std::ostringstream canonical;
    canonical.precision(17);
    canonical << "q=" << o.q << ";points=" << o.points;
    if (o.y) {
        canonical << ";y=" << *o.y << ";xi=" << o.xi;
        t.header = {"x", "f_qn", "f_cqn"};
    } else {
        t.header = {"x", "f_qn"};
    }
    t.metadata = qsf::metadata_block("qnormal", canonical.str(), "none");
    for (double x : parse_points(o.points)) {
        std::vector<std::string> row{qsf::format_number(x), qsf::format_number(qsf::f_qn(x, q))};
        if (o.y) {
            row.push_back(qsf::format_number(qsf::f_cqn(x, *o.y, o.xi, q)));
        }
        t.rows.push_back(std::move(row));
    }
    const std::string path = out_path(o, "qnormal.csv");
    qsf::write_csv_file(path, t);
    std::cout << "wrote " << path << '\n';
    return 0;
}

int cmd_npc(const Options& o) {
    const qsf::SystemParams p = system_from(o);
    const qsf::QParameterSet qp = qsf::q_params(p, parse_mode(o.mode));
    const double d = qsf::binom_real(p.N, p.m);
    qsf::CsvTable t;
    std::ostringstream canonical;
    canonical.precision(17);
    canonical << "N=" << p.N << ";m=" << p.m << ";t=" << p.t << ";k=" << p.k << ";lambda=" << p.lambda
              << ";mode=" << o.mode << ";points=" << o.points;
    t.metadata = qsf::metadata_block("npc", canonical.str(), "none");
    t.header = {"x", "npc_integral", "error", "guarded"};
    for (double x : parse_points(o.points)) {
        const qsf::NpcIntegral v = qsf::npc_integral(x, qp, d);
        t.rows.push_back({qsf::format_number(x), qsf::format_number(v.value), qsf::format_number(v.error),
                          v.guarded ? "1" : "0"});
    }
    const std::string path = out_path(o, "npc.csv");
    qsf::write_csv_file(path, t);
    std::cout << "wrote " << path << '\n';
    return 0;
}

int cmd_simulate(const Options& o) {
    qsf::SimulationConfig cfg;
    cfg.system = system_from(o);
    cfg.members = o.members;
    cfg.seed = o.seed;
    cfg.workers = o.workers;
    cfg.windows.centers = o.windows;
    cfg.windows.width = o.window_width;
    cfg.grid = parse_grid(o.grid);
    cfg.verify = o.verify;
    if (o.convention == "per-member") {
        cfg.convention = qsf::Standardization::per_member;
    } else if (o.convention == "ensemble") {
        cfg.convention = qsf::Standardization::ensemble;
    } else {
        throw std::invalid_argument("convention must be per-member or ensemble");
    }

    const qsf::SimulationResult result = qsf::run_simulation(cfg, &std::cerr);
    const qsf::SimulationTables tables = qsf::make_simulation_tables(cfg, result);
    qsf::write_csv_file(out_path(o, "strength_functions.csv"), tables.strength);
    qsf::write_csv_file(out_path(o, "moments.csv"), tables.moments);
    qsf::write_csv_file(out_path(o, "npc.csv"), tables.npc);
    qsf::write_csv_file(out_path(o, "params.csv"), tables.params);
    qsf::write_csv_file(out_path(o, "bivariate_moments.csv"), tables.bivariate);
    {
        std::ofstream f(out_path(o, "summary.txt"), std::ios::binary);
        f << tables.summary;
    }
    std::cout << tables.summary;

    if (!o.check) {
        return 0;
    }
    bool all = true;
    for (const qsf::CheckResult& c : qsf::evaluate_checks(cfg, result)) {
        std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
        all = all && c.pass;
    }
    return all ? 0 : 1;
}

void add_system_options(CLI::App& app, Options& o) {
    app.add_option("--N", o.N, "number of single-particle states")->capture_default_str();
    app.add_option("--m", o.m, "number of fermions")->capture_default_str();
    app.add_option("--t", o.t, "body rank of H0")->capture_default_str();
    app.add_option("--k", o.k, "body rank of V")->capture_default_str();
    app.add_option("--lambda", o.lambda, "interaction strength");
    app.add_option("--xi-sq", o.xi_sq, "target xi^2 (alternative to --lambda)");
    app.add_option("--mode", o.mode, "finite or infinite: xi convention for --xi-sq")->capture_default_str();
}

} // namespace

int main(int argc, char** argv) {
    Options o;
    CLI::App app{"EGOE strength functions and the conditional q-normal form"};
    app.set_config("--config", "", "key = value configuration file");
    app.require_subcommand(1);
    app.fallthrough();
    add_system_options(app, o);
    app.add_option("--out", o.out, "output directory")->capture_default_str();
    app.add_option("--members", o.members, "ensemble members")->capture_default_str();
    app.add_option("--seed", o.seed, "master seed")->capture_default_str();
    app.add_option("--windows", o.windows, "E_kappa window centres")->delimiter(',');
    app.add_option("--window-width", o.window_width, "E_kappa window width")->capture_default_str();
    app.add_option("--grid", o.grid, "histogram grid lo:hi:bins")->capture_default_str();
    app.add_option("--points", o.points, "evaluation points lo:hi:count")->capture_default_str();
    app.add_option("--workers", o.workers, "worker threads")->capture_default_str();
    app.add_option("--convention", o.convention, "per-member or ensemble standardization")
        ->capture_default_str();
    app.add_flag("--check", o.check, "exit non-zero unless the tolerance checks pass");
    app.add_flag("--verify", o.verify, "verify every eigendecomposition");
    app.add_option("--which", o.which, "reference table 1 or 2")->capture_default_str();
    app.add_option("--e-hat", o.e_hat, "E_kappa values for predictions")->delimiter(',');
    app.add_option("--q", o.q, "q for qnormal")->capture_default_str();
    app.add_option("--y", o.y, "conditioning value for f_CqN");
    app.add_option("--xi", o.xi, "correlation for f_CqN")->capture_default_str();

    auto* tables = app.add_subcommand("tables", "emit a reference parameter table");
    auto* params = app.add_subcommand("params", "analytic parameters and moment predictions");
    auto* qnormal = app.add_subcommand("qnormal", "q-normal or conditional q-normal curve");
    auto* simulate = app.add_subcommand("simulate", "Monte-Carlo ensemble run");
    auto* npc = app.add_subcommand("npc", "analytic NPC curve");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*tables) {
            return cmd_tables(o);
        }
        if (*params) {
            return cmd_params(o);
        }
        if (*qnormal) {
            return cmd_qnormal(o);
        }
        if (*simulate) {
            return cmd_simulate(o);
        }
        if (*npc) {
            return cmd_npc(o);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
