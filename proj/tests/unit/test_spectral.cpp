// Copyright 2026 The qsf Authors
// SPDX-License-Identifier: Apache-2.0

#include "qsf/fock.hpp"
#include "qsf/qnormal.hpp"
#include "qsf/spectral.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

using namespace qsf;

namespace {

Eigen::MatrixXd random_symmetric(int d, std::uint64_t seed) {
    return sample_goe(d, {seed, 0, OperatorTag::v}).matrix;
}

// Weighted central moments of a discrete distribution.
struct Moments {
    double mean, var, g1, g2;
};

Moments discrete_moments(const std::vector<double>& x, const std::vector<double>& w) {
    double s0 = 0, s1 = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        s0 += w[i];
        s1 += w[i] * x[i];
    }
    const double mean = s1 / s0;
    double c2 = 0, c3 = 0, c4 = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double u = x[i] - mean;
        c2 += w[i] * u * u;
        c3 += w[i] * u * u * u;
        c4 += w[i] * u * u * u * u;
    }
    c2 /= s0;
    c3 /= s0;
    c4 /= s0;
    return {mean, c2, c3 / std::pow(c2, 1.5), c4 / (c2 * c2) - 3.0};
}

Eigen::MatrixXd power(const Eigen::MatrixXd& a, int p) {
    Eigen::MatrixXd r = Eigen::MatrixXd::Identity(a.rows(), a.cols());
    for (int i = 0; i < p; ++i) {
        r = r * a;
    }
    return r;
}

struct Member {
    Eigen::VectorXd e_kappa, e;
    Eigen::MatrixXd o;
};

Member random_member(int d, std::uint64_t seed, double lambda) {
    const Eigen::MatrixXd h0 = random_symmetric(d, seed);
    const Eigen::MatrixXd h = h0 + lambda * sample_goe(d, {seed, 1, OperatorTag::v}).matrix;
    const SpectralResult r = analyze_member(h0, h, 0);
    const StandardizedSpectra s = standardize_spectra(r, Standardization::per_member);
    return {s.h0.values, s.h.values, r.overlap_sq};
}

} // namespace

TEST_CASE("diagonalize small examples") {
    Eigen::MatrixXd a(2, 2);
    a << 2.0, 1.0, 1.0, 2.0;
    const EigenSystem es = diagonalize(a, true);
    CHECK(es.values(0) == doctest::Approx(1.0));
    CHECK(es.values(1) == doctest::Approx(3.0));
    CHECK(std::abs(es.vectors(0, 1)) == doctest::Approx(1.0 / std::sqrt(2.0)));

    const Eigen::MatrixXd diag = Eigen::Vector3d(3.0, 1.0, 2.0).asDiagonal();
    const EigenSystem ed = diagonalize(diag);
    CHECK(ed.values(0) == 1.0);
    CHECK(ed.values(1) == 2.0);
    CHECK(ed.values(2) == 3.0);

    Eigen::MatrixXd bad(2, 2);
    bad << 1.0, 2.0, 0.0, 1.0;
    CHECK_THROWS_AS(diagonalize(bad), std::invalid_argument);
}

TEST_CASE("diagonalize reconstructs random matrices") {
    const Eigen::MatrixXd a = random_symmetric(60, 3);
    const EigenSystem es = diagonalize(a, true);
    const Eigen::MatrixXd back = es.vectors * es.values.asDiagonal() * es.vectors.transpose();
    CHECK((back - a).norm() < 1e-10 * a.norm());
    for (Eigen::Index i = 1; i < es.values.size(); ++i) {
        CHECK(es.values(i) >= es.values(i - 1));
    }
}

TEST_CASE("overlaps are doubly stochastic") {
    const Eigen::MatrixXd h0 = random_symmetric(40, 4);
    const Eigen::MatrixXd h = h0 + 0.7 * random_symmetric(40, 5);
    const SpectralResult r = analyze_member(h0, h, 7, true);
    CHECK(r.member == 7);
    CHECK((r.overlap_sq.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
    CHECK((r.overlap_sq.colwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
    CHECK(r.overlap_sq.minCoeff() >= 0.0);
}

TEST_CASE("zero coupling gives identity overlaps") {
    const Eigen::MatrixXd h0 = random_symmetric(30, 6);
    const SpectralResult r = analyze_member(h0, h0, 0);
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(30, 30);
    CHECK((r.overlap_sq - id).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(r.eigvals_h0 == r.eigvals_h);
}

TEST_CASE("standardize") {
    const Standardized s = standardize(Eigen::Vector4d(1.0, 2.0, 3.0, 4.0));
    CHECK(s.centroid == 2.5);
    CHECK(s.width == doctest::Approx(std::sqrt(1.25)));
    CHECK(s.values(0) == doctest::Approx(-1.5 / std::sqrt(1.25)));
    CHECK(s.values.mean() == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(s.values.squaredNorm() / 4.0 == doctest::Approx(1.0));
    CHECK_THROWS_AS(standardize(Eigen::Vector3d(2.0, 2.0, 2.0)), std::domain_error);
    CHECK_THROWS_AS(standardize(Eigen::VectorXd()), std::domain_error);
    CHECK_THROWS_AS(standardize_with(Eigen::Vector2d(1.0, 2.0), 0.0, 0.0), std::domain_error);
    const Eigen::VectorXd w = standardize_with(Eigen::Vector2d(1.0, 3.0), 1.0, 2.0);
    CHECK(w(0) == 0.0);
    CHECK(w(1) == 1.0);
}

TEST_CASE("ensemble convention uses the supplied scale") {
    SpectralResult r;
    r.eigvals_h0 = Eigen::Vector3d(1.0, 2.0, 3.0);
    r.eigvals_h = Eigen::Vector3d(0.0, 4.0, 8.0);
    const SpectralScale scale{2.0, 0.5, 4.0, 2.0};
    const StandardizedSpectra s = standardize_spectra(r, Standardization::ensemble, scale);
    CHECK(s.h0.values(0) == -2.0);
    CHECK(s.h.values(2) == 2.0);
    const StandardizedSpectra p = standardize_spectra(r, Standardization::per_member);
    CHECK(p.h.values(2) == doctest::Approx(std::sqrt(1.5)));
}

TEST_CASE("bivariate trace moments match explicit powers") {
    const int d = 14;
    const Eigen::MatrixXd h0 = random_symmetric(d, 8) + 0.3 * Eigen::MatrixXd::Identity(d, d);
    const Eigen::MatrixXd h = h0 + 0.8 * random_symmetric(d, 9) - 1.1 * Eigen::MatrixXd::Identity(d, d);
    const MemberMoments mm = member_bivariate_moments(h0, h);
    const Eigen::MatrixXd a = h0 - (h0.trace() / d) * Eigen::MatrixXd::Identity(d, d);
    const Eigen::MatrixXd b = h - (h.trace() / d) * Eigen::MatrixXd::Identity(d, d);
    const double sa = std::sqrt((a * a).trace() / d);
    const double sb = std::sqrt((b * b).trace() / d);
    CHECK(mm.sigma_h0 == doctest::Approx(sa));
    CHECK(mm.sigma_h == doctest::Approx(sb));
    CHECK(mm.centroid_h == doctest::Approx(h.trace() / d));
    for (int p = 0; p <= 4; ++p) {
        for (int q = 0; p + q <= 4; ++q) {
            // tr(A^P B^Q) is the canonical ordering for P, Q <= 2; tr(A^3 B) and
            // tr(A B^3) are cyclic-invariant.
            const double oracle = (power(a, p) * power(b, q)).trace() / d / (std::pow(sa, p) * std::pow(sb, q));
            CAPTURE(p);
            CAPTURE(q);
            CHECK(mm.mu[p][q] == doctest::Approx(oracle).epsilon(1e-11));
        }
    }
    CHECK(mm.mu[0][0] == 1.0);
    CHECK(mm.mu[2][0] == doctest::Approx(1.0));
    CHECK(mm.mu[0][2] == doctest::Approx(1.0));
    CHECK_THROWS_AS(member_bivariate_moments(h0, Eigen::MatrixXd::Zero(3, 3)), std::invalid_argument);
}

TEST_CASE("reduced fourth moment from traces equals the spectral value") {
    const Eigen::MatrixXd a = random_symmetric(25, 10);
    const Eigen::VectorXd ev = diagonalize(a).values;
    const Eigen::ArrayXd c = ev.array() - ev.mean();
    const double m2 = c.square().mean();
    CHECK(reduced_fourth_moment(a) == doctest::Approx(c.pow(4).mean() / (m2 * m2)).epsilon(1e-12));
    const Eigen::MatrixXd two = Eigen::Vector4d(-2.0, 0.0, 0.0, 2.0).asDiagonal();
    CHECK(reduced_fourth_moment(two) == doctest::Approx(2.0));
}

TEST_CASE("summaries") {
    const MomentSummary s = summarize({1.0, 2.0, 3.0, 4.0});
    CHECK(s.mean == 2.5);
    CHECK(s.spread == doctest::Approx(std::sqrt(5.0 / 3.0)));
    CHECK(s.standard_error == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
    CHECK(s.count == 4);
    CHECK(summarize({}).count == 0);
    CHECK(summarize({3.0}).spread == 0.0);
    CHECK_THROWS_AS(empirical_bivariate_moment({}, 3, 2), std::invalid_argument);
}

TEST_CASE("grid and windows") {
    const Grid g;
    CHECK(g.bin_width() == doctest::Approx(0.1));
    CHECK(g.bin_of(-3.2) == 0);
    CHECK(g.bin_of(3.2) == -1);
    CHECK(g.bin_of(-3.3) == -1);
    CHECK(g.bin_of(0.05) == 32);
    CHECK(g.center(31) == doctest::Approx(-0.05));
    CHECK_THROWS_AS((Grid{1.0, 0.0, 4}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((Grid{0.0, 1.0, 0}.validate()), std::invalid_argument);

    const Windows w;
    CHECK(w.find(-2.05) == 0);
    CHECK(w.find(-1.951) == 0);
    CHECK(w.find(2.05) == -1);
    CHECK(w.find(0.0) == 4);
    CHECK(w.find(0.25) == -1);
}

TEST_CASE("strength accumulator two-state example") {
    const Windows w{{-1.0, 1.0}, 0.1};
    StrengthAccumulator acc(w, Grid{-2.0, 2.0, 4});
    Eigen::MatrixXd o(2, 2);
    o << 0.75, 0.25, 0.25, 0.75;
    acc.add_member(Eigen::Vector2d(-1.0, 1.0), Eigen::Vector2d(-1.0, 1.0), o);
    const std::vector<WindowStats> st = acc.window_stats();
    REQUIRE(st.size() == 2);
    const Moments lo = discrete_moments({-1.0, 1.0}, {0.75, 0.25});
    CHECK(st[0].mean == doctest::Approx(lo.mean));
    CHECK(st[0].variance == doctest::Approx(lo.var));
    CHECK(st[0].gamma1 == doctest::Approx(lo.g1));
    CHECK(st[0].gamma2 == doctest::Approx(lo.g2));
    CHECK(st[1].gamma1 == doctest::Approx(-lo.g1));
    CHECK(st[0].kappa_count == 1);
    // Mass 0.75 in bin [-1, 0), 0.25 in [1, 2); bin width 1.
    CHECK(st[0].density == std::vector<double>{0.0, 0.75, 0.0, 0.25});
    CHECK(acc.centroid_slope() == doctest::Approx(0.5));
    CHECK(acc.members() == 1);
    CHECK_THROWS_AS(acc.add_member(Eigen::Vector3d::Zero(), Eigen::Vector2d::Zero(), o), std::invalid_argument);
}

TEST_CASE("strength window moments agree with a pooled discrete oracle") {
    const Windows w{{-1.0, 0.0, 1.0}, 0.3};
    StrengthAccumulator acc(w, Grid{});
    std::vector<std::vector<double>> xs(3), ws(3);
    for (std::uint64_t s = 0; s < 3; ++s) {
        const Member m = random_member(60, 20 + s, 0.6);
        acc.add_member(m.e_kappa, m.e, m.o);
        for (Eigen::Index k = 0; k < m.o.rows(); ++k) {
            const int win = w.find(m.e_kappa(k));
            if (win < 0) {
                continue;
            }
            for (Eigen::Index e = 0; e < m.o.cols(); ++e) {
                xs[win].push_back(m.e(e));
                ws[win].push_back(m.o(k, e));
            }
        }
    }
    const std::vector<WindowStats> st = acc.window_stats();
    for (int i = 0; i < 3; ++i) {
        REQUIRE_FALSE(st[i].empty);
        const Moments mo = discrete_moments(xs[i], ws[i]);
        CHECK(st[i].mean == doctest::Approx(mo.mean).epsilon(1e-10));
        CHECK(st[i].variance == doctest::Approx(mo.var).epsilon(1e-10));
        CHECK(st[i].gamma1 == doctest::Approx(mo.g1).epsilon(1e-8));
        CHECK(st[i].gamma2 == doctest::Approx(mo.g2).epsilon(1e-8));
        double integral = 0.0;
        for (double v : st[i].density) {
            integral += v * acc.grid().bin_width();
        }
        CHECK(integral == doctest::Approx(1.0));
    }
}

TEST_CASE("strength accumulator merge") {
    const Windows w;
    const Grid g;
    std::vector<Member> members;
    for (std::uint64_t s = 0; s < 4; ++s) {
        members.push_back(random_member(50, 40 + s, 0.5));
    }
    StrengthAccumulator all(w, g), first(w, g), second(w, g);
    for (std::size_t i = 0; i < members.size(); ++i) {
        all.add_member(members[i].e_kappa, members[i].e, members[i].o);
        (i < 2 ? first : second).add_member(members[i].e_kappa, members[i].e, members[i].o);
    }
    StrengthAccumulator ab = first;
    ab.merge(second);
    StrengthAccumulator ba = second;
    ba.merge(first);
    CHECK(ab.members() == 4);
    CHECK(ab.centroid_slope() == doctest::Approx(all.centroid_slope()).epsilon(1e-13));
    CHECK(ba.centroid_slope() == doctest::Approx(all.centroid_slope()).epsilon(1e-13));
    const auto sa = all.window_stats();
    const auto sb = ab.window_stats();
    const auto sc = ba.window_stats();
    for (std::size_t i = 0; i < sa.size(); ++i) {
        CHECK(sa[i].kappa_count == sb[i].kappa_count);
        if (sa[i].empty) {
            continue;
        }
        CHECK(sb[i].variance == doctest::Approx(sa[i].variance).epsilon(1e-12));
        CHECK(sc[i].gamma2 == doctest::Approx(sa[i].gamma2).epsilon(1e-10));
    }
    StrengthAccumulator other(Windows{{0.0}, 0.1}, g);
    CHECK_THROWS_AS(ab.merge(other), std::invalid_argument);

    StrengthAccumulator empty(w, g);
    StrengthAccumulator with_empty = all;
    with_empty.merge(empty);
    CHECK(with_empty.centroid_slope() == all.centroid_slope());
}

TEST_CASE("chaos measures at the extremes") {
    const int d = 16;
    Eigen::VectorXd e = Eigen::VectorXd::LinSpaced(d, -1.5, 1.5);
    ChaosAccumulator local(Grid{});
    local.add_member(e, Eigen::MatrixXd::Identity(d, d));
    for (const ChaosBin& b : local.bins()) {
        if (!b.empty) {
            CHECK(b.npc == 1.0);
            CHECK(b.s_info == 0.0);
        }
    }
    ChaosAccumulator spread(Grid{});
    spread.add_member(e, Eigen::MatrixXd::Constant(d, d, 1.0 / d));
    const ChaosBin c = spread.pooled(-3.2, 3.2);
    CHECK(c.count == static_cast<std::size_t>(d));
    CHECK(c.npc == doctest::Approx(d));
    CHECK(c.s_info == doctest::Approx(std::log(d)));
    CHECK(spread.pooled(2.0, 3.0).empty);
}

TEST_CASE("chaos accumulator merge matches sequential accumulation") {
    ChaosAccumulator all(Grid{}), a(Grid{}), b(Grid{});
    for (std::uint64_t s = 0; s < 3; ++s) {
        const Member m = random_member(40, 60 + s, 0.5);
        all.add_member(m.e, m.o);
        (s == 0 ? a : b).add_member(m.e, m.o);
    }
    a.merge(b);
    const ChaosBin x = all.pooled(-0.1, 0.1);
    const ChaosBin y = a.pooled(-0.1, 0.1);
    CHECK(x.count == y.count);
    CHECK(y.npc == doctest::Approx(x.npc).epsilon(1e-13));
    CHECK(y.s_info == doctest::Approx(x.s_info).epsilon(1e-13));
    CHECK(a.members() == 3);
}

TEST_CASE("NPC integral limits") {
    // xi = 0 with equal q's: the integrand reduces to f_qN(y) and NPC = d/3.
    for (double q : {0.0, 0.4, 0.8}) {
        const QParameterSet qp{0.0, q, q, q, q, QMode::finite_n};
        for (double x : {-1.0, 0.0, 0.7}) {
            const NpcIntegral v = npc_integral(x, qp, 924.0);
            CHECK_FALSE(v.guarded);
            CHECK(v.value == doctest::Approx(308.0).epsilon(1e-7));
        }
    }
    const QParameterSet qp{0.7, 0.55, 0.62, 0.3, 0.45, QMode::finite_n};
    CHECK(npc_integral(0.8, qp, 500.0).value == doctest::Approx(npc_integral(-0.8, qp, 500.0).value));
    // Outside the support of f_qN(x|q^hv) the limiting value 0 is returned with a flag.
    const NpcIntegral out = npc_integral(3.0, qp, 500.0);
    CHECK(out.guarded);
    CHECK(out.value == 0.0);
}

TEST_CASE("NPC integral against a midpoint-rule oracle") {
    const QParameterSet qp{0.7, 0.55, 0.62, 0.3, 0.45, QMode::finite_n};
    const double d = 924.0;
    const double q0 = 0.3;
    const double edge = 2.0 / std::sqrt(1.0 - q0);
    const int n = 400000;
    const double h = 2.0 * edge / n;
    for (double x : {0.0, 1.0}) {
        const double den = f_qn(x, QValue(qp.q_H));
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            const double y = -edge + (i + 0.5) * h;
            const double c = f_cqn(x, y, qp.xi, QValue(qp.q_hv));
            sum += f_qn(y, QValue(qp.q_h)) * c * c / (den * den) * h;
        }
        CHECK(npc_integral(x, qp, d).value == doctest::Approx(d / 3.0 / sum).epsilon(1e-5));
    }
}

TEST_CASE("per-member and ensemble conventions differ for an atypical width") {
    // Two members with widths 1 and 3 about a common centroid.
    SpectralResult narrow, wide;
    narrow.eigvals_h0 = narrow.eigvals_h = Eigen::Vector2d(-1.0, 1.0);
    wide.eigvals_h0 = wide.eigvals_h = Eigen::Vector2d(-3.0, 3.0);
    // Pooled scale: mean of member variances plus centroid scatter.
    const double pooled = std::sqrt((1.0 + 9.0) / 2.0);
    const SpectralScale scale{0.0, pooled, 0.0, pooled};
    const StandardizedSpectra pn = standardize_spectra(narrow, Standardization::per_member);
    const StandardizedSpectra pw = standardize_spectra(wide, Standardization::per_member);
    CHECK(pn.h.values == pw.h.values);
    const StandardizedSpectra en = standardize_spectra(narrow, Standardization::ensemble, scale);
    const StandardizedSpectra ew = standardize_spectra(wide, Standardization::ensemble, scale);
    CHECK(en.h.values(1) == doctest::Approx(1.0 / pooled));
    CHECK(ew.h.values(1) == doctest::Approx(3.0 / pooled));
    CHECK(en.h.values != pn.h.values);
}
