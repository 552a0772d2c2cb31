// Copyright 2026 The qsf Authors
// SPDX-License-Identifier: Apache-2.0

#include "qsf/report.hpp"

#include "qsf/qnormal.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace qsf {

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string format_number(double v, int digits) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    if (v == 0.0) {
        return "0";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

std::string format_fixed3(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    std::string s = buf;
    if (s == "-0.000") {
        s = "0.000";
    }
    return s;
}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) {
            return i;
        }
    }
    throw std::out_of_range("no column named " + name);
}

double CsvTable::number(std::size_t row, const std::string& name) const {
    return std::stod(rows.at(row).at(column(name)));
}

namespace {

void write_row(std::ostream& os, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) {
            os << ',';
        }
        os << cells[i];
    }
    os << '\n';
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, sep)) {
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == sep) {
        out.emplace_back();
    }
    return out;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) {
            out += sep;
        }
        out += parts[i];
    }
    return out;
}

} // namespace

void write_csv(std::ostream& os, const CsvTable& table) {
    for (const auto& [key, value] : table.metadata) {
        os << "# " << key << ": " << value << '\n';
    }
    write_row(os, table.header);
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size()) {
            throw std::logic_error("write_csv: row width differs from header");
        }
        write_row(os, row);
    }
}

void write_csv_file(const std::string& path, const CsvTable& table) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    write_csv(f, table);
    if (!f) {
        throw std::runtime_error("failed writing " + path);
    }
}

CsvTable read_csv(std::istream& is) {
    CsvTable t;
    std::string line;
    bool have_header = false;
    while (std::getline(is, line)) {
        if (!have_header && line.rfind("# ", 0) == 0) {
            const std::string body = line.substr(2);
            const auto colon = body.find(": ");
            if (colon == std::string::npos) {
                throw std::runtime_error("malformed metadata line: " + line);
            }
            t.metadata.emplace_back(body.substr(0, colon), body.substr(colon + 2));
            continue;
        }
        if (!have_header) {
            t.header = split(line, ',');
            have_header = true;
            continue;
        }
        auto row = split(line, ',');
        if (row.size() != t.header.size()) {
            throw std::runtime_error("ragged CSV row: " + line);
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::vector<std::pair<std::string, std::string>> metadata_block(const std::string& command,
                                                                const std::string& canonical,
                                                                const std::string& seed) {
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a(canonical)));
    return {{"tool", std::string(kToolName) + " " + kToolVersion},
            {"command", command},
            {"config", canonical},
            {"config_hash", hash},
            {"seed", seed}};
}

std::vector<TableRow> reference_table_rows(int which) {
    std::vector<TableRow> rows;
    if (which == 1) {
        for (int k = 2; k <= 8; ++k) {
            rows.push_back({20, 8, 1, k});
        }
        for (int k = 2; k <= 10; ++k) {
            rows.push_back({50, 10, 1, k});
        }
    } else if (which == 2) {
        for (auto [N, m] : {std::pair{12, 6}, std::pair{24, 8}, std::pair{40, 12}}) {
            for (int k = 2; k <= 4; ++k) {
                rows.push_back({N, m, 2, k});
            }
        }
    } else {
        throw std::invalid_argument("reference table must be 1 or 2");
    }
    return rows;
}

CsvTable make_reference_table(int which) {
    CsvTable t;
    const std::string canonical = "table=" + std::to_string(which) + ";xi_sq=0.5";
    t.metadata = metadata_block("tables", canonical, "none");
    if (which == 1) {
        t.header = {"N", "m", "t", "k", "q_h", "q_v", "q_hv", "delta_0", "delta_1", "delta_2",
                    "q_h_inf", "q_v_inf", "q_hv_inf", "rounded_3dp"};
    } else {
        t.header = {"N", "m", "t", "k", "q_h", "q_v", "q_hv", "q_H", "rounded_3dp"};
    }
    for (const TableRow& r : reference_table_rows(which)) {
        const QParameterSet fin = q_params_at_xi_sq(r.N, r.m, r.t, r.k, 0.5, QMode::finite_n);
        std::vector<double> values{fin.q_h, fin.q_v, fin.q_hv};
        if (which == 1) {
            const SystemParams p{r.N, r.m, r.t, r.k, lambda_for_xi_sq(r.N, r.m, r.t, r.k, 0.5, QMode::finite_n)};
            for (double e : {0.0, 1.0, 2.0}) {
                values.push_back(strength_moment_prediction(e, p, fin).delta);
            }
            const QParameterSet inf = q_params_at_xi_sq(r.N, r.m, r.t, r.k, 0.5, QMode::infinite_n);
            values.insert(values.end(), {inf.q_h, inf.q_v, inf.q_hv});
        } else {
            values.push_back(fin.q_H);
        }
        std::vector<std::string> row{std::to_string(r.N), std::to_string(r.m), std::to_string(r.t),
                                     std::to_string(r.k)};
        std::vector<std::string> rounded;
        for (double v : values) {
            row.push_back(format_number(v));
            rounded.push_back(format_fixed3(v));
        }
        row.push_back(join(rounded, " "));
        t.rows.push_back(std::move(row));
    }
    return t;
}

namespace {

std::string params_canonical(const SystemParams& p) {
    std::ostringstream ss;
    ss << std::setprecision(17) << "N=" << p.N << ";m=" << p.m << ";t=" << p.t << ";k=" << p.k
       << ";lambda=" << p.lambda;
    return ss.str();
}

} // namespace

CsvTable make_params_table(const SystemParams& p, const std::vector<double>& e_hat_kappa) {
    p.validate();
    CsvTable t;
    std::string canonical = params_canonical(p) + ";e_hat=";
    for (double e : e_hat_kappa) {
        canonical += format_number(e, 17) + " ";
    }
    t.metadata = metadata_block("params", canonical, "none");
    t.header = {"key", "value"};
    const auto add = [&](const std::string& key, double v) {
        t.rows.push_back({key, format_number(v)});
    };
    add("N", p.N);
    add("m", p.m);
    add("t", p.t);
    add("k", p.k);
    add("lambda", p.lambda);
    add("bold_lambda_sq", bold_lambda_sq(p));
    add("dimension", binom_real(p.N, p.m));
    for (QMode mode : {QMode::infinite_n, QMode::finite_n}) {
        const QParameterSet qp = q_params(p, mode);
        const std::string suffix = mode == QMode::finite_n ? "_finite" : "_infinite";
        add("xi" + suffix, qp.xi);
        add("xi_sq" + suffix, qp.xi * qp.xi);
        add("q_h" + suffix, qp.q_h);
        add("q_v" + suffix, qp.q_v);
        add("q_hv" + suffix, qp.q_hv);
        add("q_H" + suffix, qp.q_H);
        const BivariateMomentSet b = bivariate_moments(qp);
        add("mu40" + suffix, b.mu40);
        add("mu04" + suffix, b.mu04);
        add("mu31" + suffix, b.mu31);
        add("mu13" + suffix, b.mu13);
        add("mu22" + suffix, b.mu22);
    }
    const QParameterSet fin = q_params_finite(p);
    const bool enabled = fin.xi < 1.0;
    add("prediction_enabled", enabled ? 1.0 : 0.0);
    if (enabled) {
        for (double e : e_hat_kappa) {
            const StrengthMomentPrediction s = strength_moment_prediction(e, p, fin);
            const std::string pre = "e_hat=" + format_number(e) + ".";
            add(pre + "centroid", s.centroid);
            add(pre + "variance", s.variance);
            add(pre + "gamma1", s.gamma1);
            add(pre + "gamma2_zeroth", s.gamma2_zeroth());
            add(pre + "delta", s.delta);
            add(pre + "gamma2", s.gamma2());
        }
    }
    return t;
}

std::vector<double> bin_averaged_cqn(const Grid& grid, double y, double xi, double q) {
    constexpr int kPoints = 32;
    const QValue qv(q);
    const double edge = support(qv).upper;
    const double yc = std::max(-edge, std::min(edge, y));
    std::vector<double> out(static_cast<std::size_t>(grid.bins));
    const double w = grid.bin_width();
    for (int b = 0; b < grid.bins; ++b) {
        double s = 0.0;
        for (int i = 0; i < kPoints; ++i) {
            s += f_cqn(grid.edge(b) + (i + 0.5) * w / kPoints, yc, xi, qv);
        }
        out[static_cast<std::size_t>(b)] = s / kPoints;
    }
    return out;
}

double l1_distance(const std::vector<double>& a, const std::vector<double>& b, double width) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("l1_distance: size mismatch");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += std::abs(a[i] - b[i]);
    }
    return s * width;
}

std::string canonical_config(const SimulationConfig& cfg) {
    std::ostringstream ss;
    ss << std::setprecision(17) << params_canonical(cfg.system) << ";members=" << cfg.members << ";first_member=" << cfg.first_member
       << ";seed=" << cfg.seed << ";windows=";
    for (double c : cfg.windows.centers) {
        ss << c << ' ';
    }
    ss << ";window_width=" << cfg.windows.width << ";grid=" << cfg.grid.lo << ':' << cfg.grid.hi << ':'
       << cfg.grid.bins << ";convention="
       << (cfg.convention == Standardization::per_member ? "per-member" : "ensemble")
       << ";spectra=" << cfg.spectra << ";verify=" << cfg.verify;
    return ss.str();
}

namespace {

struct WindowPrediction {
    bool enabled = false;
    StrengthMomentPrediction s;
    double l1 = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> cqn;
};

std::vector<WindowPrediction> window_predictions(const SimulationConfig& cfg, const QParameterSet& qp,
                                                 const std::vector<WindowStats>& stats) {
    std::vector<WindowPrediction> out(stats.size());
    if (!(qp.xi < 1.0)) {
        return out;
    }
    for (std::size_t w = 0; w < stats.size(); ++w) {
        if (stats[w].empty) {
            continue;
        }
        WindowPrediction& wp = out[w];
        wp.enabled = true;
        wp.s = strength_moment_prediction(stats[w].e_hat_kappa_mean, cfg.system, qp);
        wp.cqn = bin_averaged_cqn(cfg.grid, stats[w].e_hat_kappa_mean, qp.xi, qp.q_hv);
        wp.l1 = l1_distance(stats[w].density, wp.cqn, cfg.grid.bin_width());
    }
    return out;
}

double nan_or(bool enabled, double v) {
    return enabled ? v : std::numeric_limits<double>::quiet_NaN();
}

} // namespace

SimulationTables make_simulation_tables(const SimulationConfig& cfg, const SimulationResult& result) {
    const std::string canonical = canonical_config(cfg);
    const auto meta = metadata_block("simulate", canonical, std::to_string(cfg.seed));
    const QParameterSet qp = q_params_finite(cfg.system);
    SimulationTables out;

    out.params = make_params_table(cfg.system, cfg.windows.centers);
    out.params.metadata = meta;
    out.params.rows.push_back({"members_used", std::to_string(result.moments.size())});
    out.params.rows.push_back({"members_failed", std::to_string(result.failures.size())});

    out.bivariate.metadata = meta;
    out.bivariate.header = {"P", "Q", "empirical", "spread", "standard_error", "predicted"};
    const BivariateMomentSet b = bivariate_moments(qp);
    const std::vector<std::tuple<int, int, double>> pq{
        {1, 0, 0.0},    {0, 1, 0.0},    {1, 1, b.mu11}, {4, 0, b.mu40}, {0, 4, b.mu04},
        {3, 1, b.mu31}, {1, 3, b.mu13}, {2, 2, b.mu22}};
    for (const auto& [P, Q, predicted] : pq) {
        MomentSummary s;
        if (P + Q == 1) {
            std::vector<double> v;
            for (const auto& m : result.moments) {
                v.push_back(P == 1 ? m.centroid_h0 : m.centroid_h);
            }
            s = summarize(v);
        } else {
            s = empirical_bivariate_moment(result.moments, P, Q);
        }
        out.bivariate.rows.push_back({std::to_string(P), std::to_string(Q), format_number(s.mean),
                                      format_number(s.spread), format_number(s.standard_error),
                                      format_number(predicted)});
    }

    std::ostringstream summary;
    summary << kToolName << ' ' << kToolVersion << " simulate\n"
            << "config: " << canonical << '\n'
            << "dimension: " << result.dimension << '\n'
            << "members used: " << result.moments.size() << ", failed: " << result.failures.size() << '\n'
            << "finite-N xi: " << format_number(qp.xi) << ", q_h " << format_number(qp.q_h) << ", q_v "
            << format_number(qp.q_v) << ", q_hv " << format_number(qp.q_hv) << ", q_H "
            << format_number(qp.q_H) << '\n';
    if (!result.moments.empty()) {
        summary << "empirical mu11: " << format_number(empirical_bivariate_moment(result.moments, 1, 1).mean)
                << '\n';
    }

    out.strength.metadata = meta;
    out.moments.metadata = meta;
    out.npc.metadata = meta;
    out.strength.header = {"window_center", "e_hat_kappa", "e_lo", "e_hi", "e_mid", "density", "f_cqn"};
    out.moments.header = {"window_center", "e_hat_kappa", "kappa_count", "centroid", "variance",
                          "gamma1", "gamma2", "pred_centroid", "pred_variance", "pred_gamma1",
                          "pred_gamma2_zeroth", "pred_delta", "pred_gamma2", "l1_cqn"};
    out.npc.header = {"e_lo", "e_hi", "e_mid", "count", "npc", "s_info", "npc_integral"};

    if (!cfg.spectra) {
        out.summary = summary.str();
        return out;
    }

    const std::vector<WindowStats> stats = result.strength.window_stats();
    const std::vector<WindowPrediction> preds = window_predictions(cfg, qp, stats);
    summary << "centroid slope: " << format_number(result.strength.centroid_slope()) << " (xi "
            << format_number(qp.xi) << ")\n"
            << "window  E_kappa  centroid(pred)  variance(pred)  gamma1(pred)  gamma2(pred)  L1\n";
    for (std::size_t w = 0; w < stats.size(); ++w) {
        const WindowStats& st = stats[w];
        const WindowPrediction& wp = preds[w];
        if (st.empty) {
            summary << format_number(st.center) << "  empty\n";
            continue;
        }
        out.moments.rows.push_back(
            {format_number(st.center), format_number(st.e_hat_kappa_mean), std::to_string(st.kappa_count),
             format_number(st.mean), format_number(st.variance), format_number(st.gamma1),
             format_number(st.gamma2), format_number(nan_or(wp.enabled, wp.s.centroid)),
             format_number(nan_or(wp.enabled, wp.s.variance)), format_number(nan_or(wp.enabled, wp.s.gamma1)),
             format_number(nan_or(wp.enabled, wp.s.gamma2_zeroth())),
             format_number(nan_or(wp.enabled, wp.s.delta)), format_number(nan_or(wp.enabled, wp.s.gamma2())),
             format_number(wp.l1)});
        for (int bi = 0; bi < cfg.grid.bins; ++bi) {
            const auto i = static_cast<std::size_t>(bi);
            out.strength.rows.push_back({format_number(st.center), format_number(st.e_hat_kappa_mean),
                                         format_number(cfg.grid.edge(bi)), format_number(cfg.grid.edge(bi + 1)),
                                         format_number(cfg.grid.center(bi)), format_number(st.density[i]),
                                         format_number(nan_or(wp.enabled, wp.enabled ? wp.cqn[i] : 0.0))});
        }
        summary << format_number(st.center) << "  " << format_number(st.e_hat_kappa_mean) << "  "
                << format_number(st.mean) << '(' << format_number(nan_or(wp.enabled, wp.s.centroid)) << ")  "
                << format_number(st.variance) << '(' << format_number(nan_or(wp.enabled, wp.s.variance)) << ")  "
                << format_number(st.gamma1) << '(' << format_number(nan_or(wp.enabled, wp.s.gamma1)) << ")  "
                << format_number(st.gamma2) << '(' << format_number(nan_or(wp.enabled, wp.s.gamma2())) << ")  "
                << format_number(wp.l1) << '\n';
    }

    const bool npc_enabled = qp.xi < 1.0;
    const double d = static_cast<double>(result.dimension);
    for (const ChaosBin& cb : result.chaos.bins()) {
        if (cb.empty) {
            continue;
        }
        double integral = std::numeric_limits<double>::quiet_NaN();
        if (npc_enabled) {
            try {
                const NpcIntegral ni = npc_integral(0.5 * (cb.lo + cb.hi), qp, d);
                integral = ni.guarded ? std::numeric_limits<double>::quiet_NaN() : ni.value;
            } catch (const QuadratureError&) {
            }
        }
        out.npc.rows.push_back({format_number(cb.lo), format_number(cb.hi), format_number(0.5 * (cb.lo + cb.hi)),
                                std::to_string(cb.count), format_number(cb.npc), format_number(cb.s_info),
                                format_number(integral)});
    }
    const ChaosBin centre = result.chaos.pooled(-0.1, 0.1);
    if (!centre.empty) {
        summary << "NPC at centre: " << format_number(centre.npc);
        if (npc_enabled) {
            summary << " (integral " << format_number(npc_integral(0.0, qp, d).value) << ")";
        }
        summary << ", S_info " << format_number(centre.s_info) << '\n';
    }
    out.summary = summary.str();
    return out;
}

std::vector<CheckResult> evaluate_checks(const SimulationConfig& cfg, const SimulationResult& result) {
    std::vector<CheckResult> out;
    const QParameterSet qp = q_params_finite(cfg.system);
    if (!cfg.spectra || !(qp.xi < 1.0)) {
        out.push_back({"prediction", false, "checks need spectra and lambda > 0"});
        return out;
    }
    const std::vector<WindowStats> stats = result.strength.window_stats();
    const std::vector<WindowPrediction> preds = window_predictions(cfg, qp, stats);

    const double slope = result.strength.centroid_slope();
    const double slope_dev = std::abs(slope / qp.xi - 1.0);
    out.push_back({"centroid slope", slope_dev <= 0.03,
                   "slope " + format_number(slope) + " vs xi " + format_number(qp.xi)});

    double worst_var = 0.0;
    double worst_g1 = 0.0;
    double worst_g2 = 0.0;
    double at_var = 0.0;
    double at_g1 = 0.0;
    double at_g2 = 0.0;
    bool g1_ok = true;
    bool g2_ok = true;
    bool overlay_ok = true;
    bool overlay_seen = false;
    std::string overlay;
    for (std::size_t w = 0; w < stats.size(); ++w) {
        const WindowStats& st = stats[w];
        if (st.empty) {
            continue;
        }
        const StrengthMomentPrediction& s = preds[w].s;
        const double var_dev = std::abs(st.variance / s.variance - 1.0);
        if (var_dev > worst_var) {
            worst_var = var_dev;
            at_var = st.center;
        }
        if (std::abs(st.center) <= 1.5 + 1e-12) {
            if (st.center == 0.0) {
                g1_ok = g1_ok && std::abs(st.gamma1) <= 0.05;
            } else {
                const double rel = std::abs(st.gamma1 / s.gamma1 - 1.0);
                if (rel > worst_g1) {
                    worst_g1 = rel;
                    at_g1 = st.center;
                }
                g1_ok = g1_ok && rel <= 0.1 && (st.gamma1 > 0) == (s.gamma1 > 0);
            }
        }
        if (std::abs(st.center) <= 2.0 + 1e-12) {
            const double diff = std::abs(st.gamma2 - s.gamma2());
            if (diff > worst_g2) {
                worst_g2 = diff;
                at_g2 = st.center;
            }
            g2_ok = g2_ok && diff <= 0.15;
        }
        if (st.center == -1.0 || st.center == 0.0 || st.center == 1.0) {
            overlay_seen = true;
            overlay_ok = overlay_ok && preds[w].l1 < 0.1;
            overlay += format_number(st.center) + ":" + format_number(preds[w].l1) + " ";
        }
    }
    const auto at = [](double c) { return " at E_kappa " + format_number(c); };
    out.push_back({"variance flat", worst_var <= 0.05,
                   "max relative deviation " + format_number(worst_var) + at(at_var)});
    out.push_back({"gamma1", g1_ok, "max relative deviation " + format_number(worst_g1) + at(at_g1)});
    out.push_back({"gamma2", g2_ok, "max absolute deviation " + format_number(worst_g2) + at(at_g2)});
    if (overlay_seen) {
        out.push_back({"f_CqN overlay", overlay_ok, "L1 " + overlay});
    }
    const ChaosBin centre = result.chaos.pooled(-0.1, 0.1);
    if (!centre.empty) {
        const double predicted = npc_integral(0.0, qp, static_cast<double>(result.dimension)).value;
        const double rel = std::abs(centre.npc / predicted - 1.0);
        out.push_back({"NPC centre", rel <= 0.15,
                       "empirical " + format_number(centre.npc) + " vs integral " + format_number(predicted)});
    }
    return out;
}

} // namespace qsf
