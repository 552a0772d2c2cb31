// Copyright 2026 The qsf Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file report.hpp
 * @brief CSV emission, reference tables and tolerance checks for the CLI.
 */

#pragma once

#include "qsf/bca.hpp"
#include "qsf/ensemble.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qsf {

inline constexpr const char* kToolName = "qsf";
inline constexpr const char* kToolVersion = "0.1.0";

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view text);

/// Shortest "%.{digits}g" rendering; negative zero prints as 0.
std::string format_number(double v, int digits = 6);

/// Fixed "%.3f" rendering used for the three-decimal table column.
std::string format_fixed3(double v);

struct CsvTable {
    /// '#'-prefixed "key: value" lines written before the header.
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column index by name; throws std::out_of_range if absent.
    std::size_t column(const std::string& name) const;
    double number(std::size_t row, const std::string& name) const;
};

void write_csv(std::ostream& os, const CsvTable& table);
void write_csv_file(const std::string& path, const CsvTable& table);
/// Inverse of write_csv. Throws std::runtime_error on ragged rows.
CsvTable read_csv(std::istream& is);

/// Metadata block shared by every file: tool, command, config hash, seed.
std::vector<std::pair<std::string, std::string>> metadata_block(const std::string& command,
                                                                const std::string& canonical_config,
                                                                const std::string& seed);

struct TableRow {
    int N;
    int m;
    int t;
    int k;
};

/// Rows of the two reference tables (xi^2 = 1/2).
std::vector<TableRow> reference_table_rows(int which);

/// Table 1: finite-N q^h, q^v, q^hv, Delta(0..2) and infinite-N q's.
/// Table 2: finite-N q^h, q^v, q^hv, q^H. Throws for other values of which.
CsvTable make_reference_table(int which);

/// xi, bold lambda^2, both q modes and predictions at the given E_kappa values.
CsvTable make_params_table(const SystemParams& p, const std::vector<double>& e_hat_kappa);

/// Cell average of f_CqN(.|y; xi, q) over each grid bin (midpoint rule, 32 points per bin).
std::vector<double> bin_averaged_cqn(const Grid& grid, double y, double xi, double q);

/// sum_b |a_b - b_b| * width.
double l1_distance(const std::vector<double>& a, const std::vector<double>& b, double width);

struct SimulationTables {
    CsvTable strength;
    CsvTable moments;
    CsvTable npc;
    CsvTable bivariate;
    CsvTable params;
    std::string summary;
};

/// Canonical text of a run configuration; excludes worker count and paths.
std::string canonical_config(const SimulationConfig& cfg);

SimulationTables make_simulation_tables(const SimulationConfig& cfg, const SimulationResult& result);

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Tolerance checks for a simulate run: centroid slope (3%), flat variance
/// (5%), skewness (10% for |E_kappa| <= 1.5 with sign flip), excess (0.15 for
/// |E_kappa| <= 2), f_CqN overlay L1 < 0.1 for windows at -1, 0, 1, and the
/// central NPC within 15% of the integral.
std::vector<CheckResult> evaluate_checks(const SimulationConfig& cfg, const SimulationResult& result);

} // namespace qsf
