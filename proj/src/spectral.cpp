// Copyright 2026 The qsf Authors
// SPDX-License-Identifier: Apache-2.0

#include "qsf/spectral.hpp"

#include "qsf/qnormal.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace qsf {

EigenSystem diagonalize(const Eigen::MatrixXd& a, bool verify) {
    if (a.rows() != a.cols() || a.rows() == 0) {
        throw std::invalid_argument("diagonalize: square non-empty matrix required");
    }
    const double scale = a.cwiseAbs().maxCoeff();
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(scale, 1e-300)) {
        throw std::invalid_argument("diagonalize: matrix is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        throw DiagonalizationError("eigensolver did not converge");
    }
    EigenSystem es{solver.eigenvalues(), solver.eigenvectors()};
    if (verify) {
        const double norm = std::max(a.norm(), 1e-300);
        const Eigen::MatrixXd recon = es.vectors * es.values.asDiagonal() * es.vectors.transpose();
        const double residual = (a - recon).norm();
        if (residual > 1e-9 * norm) {
            throw DiagonalizationError("reconstruction residual " + std::to_string(residual / norm) +
                                       " exceeds 1e-9");
        }
        const Eigen::MatrixXd gram = es.vectors.transpose() * es.vectors;
        const double orth = (gram - Eigen::MatrixXd::Identity(a.rows(), a.cols())).cwiseAbs().maxCoeff();
        if (orth > 1e-10) {
            throw DiagonalizationError("eigenvectors not orthonormal (" + std::to_string(orth) + ")");
        }
    }
    return es;
}

Eigen::MatrixXd overlaps(const Eigen::MatrixXd& h0_vectors, const Eigen::MatrixXd& h_vectors) {
    if (h0_vectors.rows() != h_vectors.rows() || h0_vectors.cols() != h_vectors.cols()) {
        throw std::invalid_argument("overlaps: dimension mismatch");
    }
    Eigen::MatrixXd c = h0_vectors.transpose() * h_vectors;
    return c.array().square().matrix();
}

SpectralResult analyze_member(const Eigen::MatrixXd& h0, const Eigen::MatrixXd& h, std::size_t member,
                              bool verify) {
    const EigenSystem e0 = diagonalize(h0, verify);
    const EigenSystem e1 = diagonalize(h, verify);
    SpectralResult r;
    r.eigvals_h0 = e0.values;
    r.eigvals_h = e1.values;
    r.overlap_sq = overlaps(e0.vectors, e1.vectors);
    r.member = member;
    return r;
}

Standardized standardize(const Eigen::VectorXd& spectrum) {
    if (spectrum.size() == 0) {
        throw std::domain_error("standardize: empty spectrum");
    }
    const double mean = spectrum.mean();
    const double var = (spectrum.array() - mean).square().mean();
    if (!(var > 0.0)) {
        throw std::domain_error("standardize: spectrum has zero width");
    }
    Standardized s;
    s.centroid = mean;
    s.width = std::sqrt(var);
    s.values = standardize_with(spectrum, s.centroid, s.width);
    return s;
}

Eigen::VectorXd standardize_with(const Eigen::VectorXd& spectrum, double centroid, double width) {
    if (!(width > 0.0)) {
        throw std::domain_error("standardize: width must be positive");
    }
    return ((spectrum.array() - centroid) / width).matrix();
}

StandardizedSpectra standardize_spectra(const SpectralResult& r, Standardization convention,
                                        const SpectralScale& ensemble) {
    if (convention == Standardization::per_member) {
        return {standardize(r.eigvals_h0), standardize(r.eigvals_h)};
    }
    StandardizedSpectra s;
    s.h0 = {standardize_with(r.eigvals_h0, ensemble.centroid_h0, ensemble.width_h0), ensemble.centroid_h0,
            ensemble.width_h0};
    s.h = {standardize_with(r.eigvals_h, ensemble.centroid_h, ensemble.width_h), ensemble.centroid_h,
           ensemble.width_h};
    return s;
}

namespace {

// tr(X Y) for symmetric X.
double trace_product(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
    return x.cwiseProduct(y).sum();
}

Eigen::MatrixXd centred(const Eigen::MatrixXd& a, double centroid) {
    Eigen::MatrixXd c = a;
    c.diagonal().array() -= centroid;
    return c;
}

} // namespace

MemberMoments member_bivariate_moments(const Eigen::MatrixXd& h0, const Eigen::MatrixXd& h) {
    if (h0.rows() != h.rows() || h0.cols() != h.cols() || h0.rows() == 0) {
        throw std::invalid_argument("member_bivariate_moments: dimension mismatch");
    }
    const double d = static_cast<double>(h0.rows());
    MemberMoments mm;
    mm.centroid_h0 = h0.trace() / d;
    mm.centroid_h = h.trace() / d;
    const Eigen::MatrixXd a = centred(h0, mm.centroid_h0);
    const Eigen::MatrixXd b = centred(h, mm.centroid_h);

    Eigen::MatrixXd a2(a.rows(), a.cols());
    Eigen::MatrixXd b2(a.rows(), a.cols());
    Eigen::MatrixXd ab(a.rows(), a.cols());
    a2.noalias() = a * a;
    b2.noalias() = b * b;
    ab.noalias() = a * b;

    std::array<std::array<double, 5>, 5> raw{};
    raw[0][0] = 1.0;
    raw[1][0] = 0.0;
    raw[0][1] = 0.0;
    raw[2][0] = a2.trace() / d;
    raw[0][2] = b2.trace() / d;
    raw[1][1] = trace_product(a, b) / d;
    raw[3][0] = trace_product(a2, a) / d;
    raw[0][3] = trace_product(b2, b) / d;
    raw[2][1] = trace_product(a2, b) / d;
    raw[1][2] = trace_product(a, b2) / d;
    raw[4][0] = a2.squaredNorm() / d;
    raw[0][4] = b2.squaredNorm() / d;
    raw[3][1] = trace_product(a2, ab) / d;
    raw[1][3] = trace_product(b2, ab) / d;
    raw[2][2] = trace_product(a2, b2) / d;

    mm.sigma_h0 = std::sqrt(raw[2][0]);
    mm.sigma_h = std::sqrt(raw[0][2]);
    for (int p = 0; p <= 4; ++p) {
        for (int q = 0; p + q <= 4; ++q) {
            mm.mu[p][q] = raw[p][q] / (std::pow(mm.sigma_h0, p) * std::pow(mm.sigma_h, q));
        }
    }
    return mm;
}

double reduced_fourth_moment(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols() || a.rows() == 0) {
        throw std::invalid_argument("reduced_fourth_moment: square non-empty matrix required");
    }
    const double d = static_cast<double>(a.rows());
    const Eigen::MatrixXd c = centred(a, a.trace() / d);
    Eigen::MatrixXd c2(c.rows(), c.cols());
    c2.noalias() = c * c;
    const double m2 = c2.trace() / d;
    return c2.squaredNorm() / d / (m2 * m2);
}

MomentSummary summarize(const std::vector<double>& values) {
    MomentSummary s;
    s.count = values.size();
    if (values.empty()) {
        return s;
    }
    CompensatedSum sum;
    for (double v : values) {
        sum.add(v);
    }
    s.mean = sum.value() / static_cast<double>(s.count);
    if (s.count > 1) {
        CompensatedSum dev;
        for (double v : values) {
            dev.add((v - s.mean) * (v - s.mean));
        }
        s.spread = std::sqrt(dev.value() / static_cast<double>(s.count - 1));
        s.standard_error = s.spread / std::sqrt(static_cast<double>(s.count));
    }
    return s;
}

MomentSummary empirical_bivariate_moment(const std::vector<MemberMoments>& members, int P, int Q) {
    if (P < 0 || Q < 0 || P + Q > 4) {
        throw std::invalid_argument("empirical_bivariate_moment: P + Q <= 4 required");
    }
    std::vector<double> v;
    v.reserve(members.size());
    for (const auto& m : members) {
        v.push_back(m.mu[P][Q]);
    }
    return summarize(v);
}

int Grid::bin_of(double x) const noexcept {
    if (!(x >= lo && x < hi)) {
        return -1;
    }
    const int b = static_cast<int>((x - lo) / bin_width());
    return std::min(b, bins - 1);
}

void Grid::validate() const {
    if (!(hi > lo) || bins < 1) {
        throw std::invalid_argument("grid needs hi > lo and at least one bin");
    }
}

int Windows::find(double x) const noexcept {
    const double half = 0.5 * width;
    for (std::size_t i = 0; i < centers.size(); ++i) {
        if (x >= centers[i] - half && x < centers[i] + half) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

StrengthAccumulator::StrengthAccumulator(Windows windows, Grid grid)
    : windows_(std::move(windows)), grid_(grid), sums_(windows_.centers.size()) {
    grid_.validate();
    if (!(windows_.width > 0.0)) {
        throw std::invalid_argument("kappa window width must be positive");
    }
    for (auto& w : sums_) {
        w.hist.resize(static_cast<std::size_t>(grid_.bins));
    }
}

void StrengthAccumulator::add_member(const Eigen::VectorXd& e_hat_kappa, const Eigen::VectorXd& e_hat,
                                     const Eigen::MatrixXd& overlap_sq) {
    const Eigen::Index d = overlap_sq.rows();
    if (overlap_sq.cols() != d || e_hat_kappa.size() != d || e_hat.size() != d) {
        throw std::invalid_argument("StrengthAccumulator: dimension mismatch");
    }
    // Row power sums sum_E O(kappa,E) x_E^p for p = 0..4.
    Eigen::MatrixXd xp(d, 5);
    xp.col(0).setOnes();
    for (int p = 1; p < 5; ++p) {
        xp.col(p) = xp.col(p - 1).cwiseProduct(e_hat);
    }
    Eigen::MatrixXd row_sums(d, 5);
    row_sums.noalias() = overlap_sq * xp;

    std::vector<int> bin(static_cast<std::size_t>(d));
    for (Eigen::Index e = 0; e < d; ++e) {
        bin[static_cast<std::size_t>(e)] = grid_.bin_of(e_hat(e));
    }

    std::vector<double> hist(static_cast<std::size_t>(grid_.bins));
    for (Eigen::Index kappa = 0; kappa < d; ++kappa) {
        const double x = e_hat_kappa(kappa);
        const double y = row_sums(kappa, 1) / row_sums(kappa, 0);
        n_.add(1.0);
        sx_.add(x);
        sy_.add(y);
        sxx_.add(x * x);
        sxy_.add(x * y);

        const int w = windows_.find(x);
        if (w < 0) {
            continue;
        }
        WindowSums& ws = sums_[static_cast<std::size_t>(w)];
        ++ws.kappa_count;
        ws.e_kappa.add(x);
        for (int p = 0; p < 5; ++p) {
            ws.power[p].add(row_sums(kappa, p));
        }
        std::fill(hist.begin(), hist.end(), 0.0);
        for (Eigen::Index e = 0; e < d; ++e) {
            const int b = bin[static_cast<std::size_t>(e)];
            if (b >= 0) {
                hist[static_cast<std::size_t>(b)] += overlap_sq(kappa, e);
            }
        }
        for (std::size_t b = 0; b < hist.size(); ++b) {
            ws.hist[b].add(hist[b]);
        }
    }
    ++members_;
}

void StrengthAccumulator::merge(const StrengthAccumulator& other) {
    if (!(windows_ == other.windows_) || !(grid_ == other.grid_)) {
        throw std::invalid_argument("StrengthAccumulator::merge: windows or grid differ");
    }
    for (std::size_t w = 0; w < sums_.size(); ++w) {
        WindowSums& a = sums_[w];
        const WindowSums& b = other.sums_[w];
        a.kappa_count += b.kappa_count;
        a.e_kappa.merge(b.e_kappa);
        for (int p = 0; p < 5; ++p) {
            a.power[p].merge(b.power[p]);
        }
        for (std::size_t i = 0; i < a.hist.size(); ++i) {
            a.hist[i].merge(b.hist[i]);
        }
    }
    n_.merge(other.n_);
    sx_.merge(other.sx_);
    sy_.merge(other.sy_);
    sxx_.merge(other.sxx_);
    sxy_.merge(other.sxy_);
    members_ += other.members_;
}

std::vector<WindowStats> StrengthAccumulator::window_stats() const {
    std::vector<WindowStats> out;
    out.reserve(sums_.size());
    for (std::size_t w = 0; w < sums_.size(); ++w) {
        const WindowSums& ws = sums_[w];
        WindowStats st;
        st.center = windows_.centers[w];
        st.kappa_count = ws.kappa_count;
        st.empty = ws.kappa_count == 0;
        if (!st.empty) {
            st.e_hat_kappa_mean = ws.e_kappa.value() / static_cast<double>(ws.kappa_count);
            const double s0 = ws.power[0].value();
            const double m1 = ws.power[1].value() / s0;
            const double r2 = ws.power[2].value() / s0;
            const double r3 = ws.power[3].value() / s0;
            const double r4 = ws.power[4].value() / s0;
            const double c2 = r2 - m1 * m1;
            const double c3 = r3 - 3.0 * m1 * r2 + 2.0 * m1 * m1 * m1;
            const double c4 = r4 - 4.0 * m1 * r3 + 6.0 * m1 * m1 * r2 - 3.0 * m1 * m1 * m1 * m1;
            st.mean = m1;
            st.variance = c2;
            st.gamma1 = c3 / std::pow(c2, 1.5);
            st.gamma2 = c4 / (c2 * c2) - 3.0;

            double total = 0.0;
            for (const auto& h : ws.hist) {
                total += h.value();
            }
            st.density.resize(ws.hist.size());
            for (std::size_t i = 0; i < ws.hist.size(); ++i) {
                st.density[i] = total > 0.0 ? ws.hist[i].value() / (total * grid_.bin_width()) : 0.0;
            }
        }
        out.push_back(std::move(st));
    }
    return out;
}

double StrengthAccumulator::centroid_slope() const {
    const double n = n_.value();
    const double den = n * sxx_.value() - sx_.value() * sx_.value();
    if (!(den > 0.0)) {
        throw std::domain_error("centroid_slope: no spread in E_kappa");
    }
    return (n * sxy_.value() - sx_.value() * sy_.value()) / den;
}

ChaosAccumulator::ChaosAccumulator(Grid grid)
    : grid_(grid), count_(static_cast<std::size_t>(grid.bins), 0),
      ipr_(static_cast<std::size_t>(grid.bins)), entropy_(static_cast<std::size_t>(grid.bins)) {
    grid_.validate();
}

void ChaosAccumulator::add_member(const Eigen::VectorXd& e_hat, const Eigen::MatrixXd& overlap_sq) {
    const Eigen::Index d = overlap_sq.cols();
    if (overlap_sq.rows() != d || e_hat.size() != d) {
        throw std::invalid_argument("ChaosAccumulator: dimension mismatch");
    }
    for (Eigen::Index e = 0; e < d; ++e) {
        const int b = grid_.bin_of(e_hat(e));
        if (b < 0) {
            continue;
        }
        double ipr = 0.0;
        double s = 0.0;
        for (Eigen::Index kappa = 0; kappa < d; ++kappa) {
            const double w = overlap_sq(kappa, e);
            ipr += w * w;
            if (w > 0.0) {
                s -= w * std::log(w);
            }
        }
        const auto i = static_cast<std::size_t>(b);
        ++count_[i];
        ipr_[i].add(ipr);
        entropy_[i].add(s);
    }
    ++members_;
}

void ChaosAccumulator::merge(const ChaosAccumulator& other) {
    if (!(grid_ == other.grid_)) {
        throw std::invalid_argument("ChaosAccumulator::merge: grids differ");
    }
    for (std::size_t i = 0; i < count_.size(); ++i) {
        count_[i] += other.count_[i];
        ipr_[i].merge(other.ipr_[i]);
        entropy_[i].merge(other.entropy_[i]);
    }
    members_ += other.members_;
}

std::vector<ChaosBin> ChaosAccumulator::bins() const {
    std::vector<ChaosBin> out;
    out.reserve(count_.size());
    for (std::size_t i = 0; i < count_.size(); ++i) {
        ChaosBin b;
        b.lo = grid_.edge(static_cast<int>(i));
        b.hi = grid_.edge(static_cast<int>(i) + 1);
        b.count = count_[i];
        b.empty = count_[i] == 0;
        if (!b.empty) {
            const double n = static_cast<double>(count_[i]);
            b.npc = n / ipr_[i].value();
            b.s_info = entropy_[i].value() / n;
        }
        out.push_back(b);
    }
    return out;
}

ChaosBin ChaosAccumulator::pooled(double lo, double hi) const {
    ChaosBin b;
    b.lo = lo;
    b.hi = hi;
    CompensatedSum ipr;
    CompensatedSum s;
    for (std::size_t i = 0; i < count_.size(); ++i) {
        const double c = grid_.center(static_cast<int>(i));
        if (c >= lo && c <= hi) {
            b.count += count_[i];
            ipr.merge(ipr_[i]);
            s.merge(entropy_[i]);
        }
    }
    b.empty = b.count == 0;
    if (!b.empty) {
        const double n = static_cast<double>(b.count);
        b.npc = n / ipr.value();
        b.s_info = s.value() / n;
    }
    return b;
}

NpcIntegral npc_integral(double x, const QParameterSet& qp, double d, const QuadratureOptions& opts) {
    const QValue qh(qp.q_h);
    const QValue qH(qp.q_H);
    const QValue qhv(qp.q_hv);
    const QValue q0(std::min({qp.q_h, qp.q_H, qp.q_hv}));

    NpcIntegral out;
    const double denom = f_qn(x, qH);
    if (!support(qhv).contains(x) || !(denom > std::numeric_limits<double>::min())) {
        out.guarded = true;
        return out;
    }
    const double inv_denom_sq = 1.0 / (denom * denom);
    const double edge = support(q0).upper;
    const auto g = [&](double y) {
        if (std::abs(y) >= edge) {
            return 0.0;
        }
        const double c = f_cqn(x, y, qp.xi, qhv);
        return f_qn(y, qh) * c * c * inv_denom_sq;
    };
    const QuadratureResult r = integrate_over_support(g, q0, opts);
    out.value = d / 3.0 / r.value;
    out.error = out.value * r.error / std::abs(r.value);
    return out;
}

} // namespace qsf
