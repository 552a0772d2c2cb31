// Copyright 2026 The qsf Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file spectral.hpp
 * @brief Per-member spectral analysis and mergeable ensemble statistics:
 *        strength functions, bivariate trace moments, NPC and S^info.
 *
 * Overlap matrices are indexed (kappa, E): row kappa is an H0 eigenstate,
 * column E an H eigenstate, entry |<kappa|E>|^2.
 */

#pragma once

#include "qsf/bca.hpp"
#include "qsf/quadrature.hpp"
#include "qsf/summation.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace qsf {

struct EigenSystem {
    Eigen::VectorXd values;  ///< ascending
    Eigen::MatrixXd vectors; ///< columns are eigenvectors
};

class DiagonalizationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dense symmetric eigendecomposition. Throws std::invalid_argument when the
/// input is not symmetric to 1e-12 relative, DiagonalizationError when the
/// solver fails or (with verify) the reconstruction residual exceeds
/// 1e-9 ||A|| or orthonormality is off by more than 1e-10.
EigenSystem diagonalize(const Eigen::MatrixXd& a, bool verify = false);

/// |<kappa|E>|^2 for every pair of columns.
Eigen::MatrixXd overlaps(const Eigen::MatrixXd& h0_vectors, const Eigen::MatrixXd& h_vectors);

struct SpectralResult {
    Eigen::VectorXd eigvals_h0;
    Eigen::VectorXd eigvals_h;
    Eigen::MatrixXd overlap_sq;
    std::size_t member = 0;
};

SpectralResult analyze_member(const Eigen::MatrixXd& h0, const Eigen::MatrixXd& h, std::size_t member,
                              bool verify = false);

enum class Standardization { per_member, ensemble };

struct Standardized {
    Eigen::VectorXd values;
    double centroid = 0.0;
    double width = 0.0;
};

/// (x - mean) / sd with the population variance. Throws std::domain_error
/// for an empty or constant spectrum.
Standardized standardize(const Eigen::VectorXd& spectrum);

/// (x - centroid) / width with externally supplied scale.
Eigen::VectorXd standardize_with(const Eigen::VectorXd& spectrum, double centroid, double width);

struct StandardizedSpectra {
    Standardized h0;
    Standardized h;
};

struct SpectralScale {
    double centroid_h0 = 0.0;
    double width_h0 = 1.0;
    double centroid_h = 0.0;
    double width_h = 1.0;
};

/// Per-member convention ignores `ensemble`; the ensemble convention uses it.
StandardizedSpectra standardize_spectra(const SpectralResult& r, Standardization convention,
                                        const SpectralScale& ensemble = {});

/// Ensemble-averaged reduced bivariate moments need the per-member trace
/// moments; mu[P][Q] is meaningful for P + Q <= 4.
struct MemberMoments {
    double centroid_h0 = 0.0;
    double centroid_h = 0.0;
    double sigma_h0 = 0.0;
    double sigma_h = 0.0;
    std::array<std::array<double, 5>, 5> mu{};
};

/// (1/d) tr(H0^P H^Q) of the centred matrices, reduced by sigma_H0^P sigma_H^Q.
/// Uses the three products H0^2, H^2 and H0 H.
MemberMoments member_bivariate_moments(const Eigen::MatrixXd& h0, const Eigen::MatrixXd& h);

/// Reduced fourth moment of a single operator's spectrum, from traces.
double reduced_fourth_moment(const Eigen::MatrixXd& a);

struct MomentSummary {
    double mean = 0.0;
    double spread = 0.0; ///< member-to-member standard deviation
    double standard_error = 0.0;
    std::size_t count = 0;
};

MomentSummary summarize(const std::vector<double>& values);

/// Ensemble summary of mu[P][Q] over members; P + Q must be <= 4.
MomentSummary empirical_bivariate_moment(const std::vector<MemberMoments>& members, int P, int Q);

struct Grid {
    double lo = -3.2;
    double hi = 3.2;
    int bins = 64;

    double bin_width() const noexcept { return (hi - lo) / bins; }
    double edge(int i) const noexcept { return lo + (hi - lo) * i / bins; }
    double center(int i) const noexcept { return 0.5 * (edge(i) + edge(i + 1)); }
    /// Bin containing x (half-open), -1 when outside.
    int bin_of(double x) const noexcept;
    void validate() const;
    bool operator==(const Grid& o) const noexcept {
        return lo == o.lo && hi == o.hi && bins == o.bins;
    }
};

struct Windows {
    std::vector<double> centers{-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0};
    double width = 0.1;

    /// First window whose half-open range [c - w/2, c + w/2) contains x, or -1.
    int find(double x) const noexcept;
    bool operator==(const Windows& o) const noexcept {
        return centers == o.centers && width == o.width;
    }
};

struct WindowStats {
    double center = 0.0;
    std::size_t kappa_count = 0;
    double e_hat_kappa_mean = 0.0;
    double mean = 0.0;
    double variance = 0.0;
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    bool empty = true;
    /// Histogram of the pooled strength over the grid, unit integral.
    std::vector<double> density;
};

/// Pooled strength functions per kappa window plus a centroid regression over
/// every kappa. Merging is a fixed-order compensated sum.
class StrengthAccumulator {
public:
    StrengthAccumulator() = default;
    StrengthAccumulator(Windows windows, Grid grid);

    void add_member(const Eigen::VectorXd& e_hat_kappa, const Eigen::VectorXd& e_hat,
                    const Eigen::MatrixXd& overlap_sq);
    /// Throws std::invalid_argument when windows or grids differ.
    void merge(const StrengthAccumulator& other);

    std::size_t members() const noexcept { return members_; }
    const Windows& windows() const noexcept { return windows_; }
    const Grid& grid() const noexcept { return grid_; }

    std::vector<WindowStats> window_stats() const;

    /// Least-squares slope of the strength centroid against E_kappa over all kappa.
    double centroid_slope() const;

private:
    struct WindowSums {
        std::size_t kappa_count = 0;
        CompensatedSum e_kappa;
        std::array<CompensatedSum, 5> power{};
        std::vector<CompensatedSum> hist;
    };

    Windows windows_;
    Grid grid_;
    std::size_t members_ = 0;
    std::vector<WindowSums> sums_;
    CompensatedSum n_, sx_, sy_, sxx_, sxy_;
};

struct ChaosBin {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t count = 0;
    double npc = 0.0;
    double s_info = 0.0;
    bool empty = true;
};

/// NPC (inverse of the bin-averaged inverse participation ratio) and
/// S^info binned on the standardized H energy.
class ChaosAccumulator {
public:
    ChaosAccumulator() = default;
    explicit ChaosAccumulator(Grid grid);

    void add_member(const Eigen::VectorXd& e_hat, const Eigen::MatrixXd& overlap_sq);
    void merge(const ChaosAccumulator& other);

    std::size_t members() const noexcept { return members_; }
    const Grid& grid() const noexcept { return grid_; }

    std::vector<ChaosBin> bins() const;
    /// All bins whose centre lies in [lo, hi] pooled into one.
    ChaosBin pooled(double lo, double hi) const;

private:
    Grid grid_;
    std::size_t members_ = 0;
    std::vector<std::size_t> count_;
    std::vector<CompensatedSum> ipr_;
    std::vector<CompensatedSum> entropy_;
};

struct NpcIntegral {
    double value = 0.0;
    double error = 0.0;
    /// Set when f_qN(x|q^H) vanishes and the limiting value 0 is returned.
    bool guarded = false;
};

/// (d/3) / int f_qN(y|q^h) f_CqN(x|y; xi, q^hv)^2 / f_qN(x|q^H)^2 dy over
/// |y| < 2/sqrt(1 - q0), q0 = min(q^h, q^H, q^hv).
NpcIntegral npc_integral(double x, const QParameterSet& qp, double d, const QuadratureOptions& opts = {});

} // namespace qsf
