// Copyright 2026 The qsf Authors
// SPDX-License-Identifier: Apache-2.0

#include "qsf/bca.hpp"
#include "qsf/qnormal.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <string>

using namespace qsf;

namespace {

// Independent double-precision evaluation of the finite-N sums with
// binomials from lgamma, as a cross-check of the exact path.
double lbinom(int a, int b) {
    if (a < 0 || b < 0 || a < b) {
        return -INFINITY;
    }
    return std::lgamma(a + 1.0) - std::lgamma(b + 1.0) - std::lgamma(a - b + 1.0);
}

double lcap(int nu, int N, int m, int r) {
    return lbinom(m - nu, r) + lbinom(N - m + r - nu, r);
}

double d_real(int N, int nu) {
    const double a = std::exp(lbinom(N, nu));
    const double b = nu >= 1 ? std::exp(lbinom(N, nu - 1)) : 0.0;
    return a * a - b * b;
}

double q_v_oracle(int N, int m, int k) {
    double s = 0.0;
    for (int nu = 0; nu <= std::min(k, m - k); ++nu) {
        s += std::exp(lcap(nu, N, m, k) + lcap(nu, N, m, m - k) - lbinom(N, m) - 2 * lcap(0, N, m, k)) *
             d_real(N, nu);
    }
    return s;
}

double q_hv_oracle(int N, int m, int t, int k) {
    double s = 0.0;
    for (int nu = 0; nu <= std::min(t, m - k); ++nu) {
        s += std::exp(lcap(nu, N, m, k) + lcap(nu, N, m, m - t) - lbinom(N, m) - lcap(0, N, m, t) -
                      lcap(0, N, m, k)) *
             d_real(N, nu);
    }
    return s;
}

} // namespace

TEST_CASE("SystemParams validation names the constraint") {
    CHECK_NOTHROW(SystemParams{12, 6, 1, 2, 0.5}.validate());
    try {
        SystemParams{12, 6, 2, 2, 0.5}.validate();
        FAIL("t = k accepted");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("t < k") != std::string::npos);
    }
    try {
        SystemParams{12, 3, 1, 4, 0.5}.validate();
        FAIL("k > m accepted");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("k <= m") != std::string::npos);
    }
    try {
        SystemParams{5, 6, 1, 2, 0.5}.validate();
        FAIL("m > N accepted");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("m <= N") != std::string::npos);
    }
    CHECK_THROWS_AS(SystemParams({12, 6, 1, 2, -0.1}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(SystemParams({0, 6, 1, 2, 0.1}).validate(), std::invalid_argument);
}

TEST_CASE("bold lambda and infinite-N xi") {
    CHECK(bold_lambda_sq({12, 6, 1, 2, 0.5}) == doctest::Approx(1.375).epsilon(1e-15));
    CHECK(bold_lambda_sq({12, 6, 1, 2, 0.0}) == 0.0);
    CHECK(bold_lambda_sq({20, 8, 1, 1, 1.0}) == doctest::Approx(1.0));
    CHECK(xi_infinite({12, 6, 1, 2, 0.0}) == 1.0);
    CHECK(xi_infinite({12, 6, 1, 2, 0.5}) == doctest::Approx(std::sqrt(6.0 / (6.0 + 1.375 * 15.0))).epsilon(1e-14));
    CHECK(xi_infinite({12, 6, 1, 2, 0.5}) == doctest::Approx(0.4747).epsilon(1e-3));
}

TEST_CASE("thermodynamic lambda") {
    CHECK(lambda_thermo(6, 2) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(lambda_thermo(7, 7) == doctest::Approx(7.0));
    // Round trip through xi_infinite: choose lambda so that bold lambda^2 = m / binom(m,k).
    const int N = 12, m = 6, k = 2;
    const double lambda = std::sqrt(lambda_thermo(m, k) * 12.0 / 66.0);
    CHECK(std::abs(xi_infinite({N, m, 1, k, lambda}) - std::sqrt(0.5)) < 1e-14);
    CHECK(bold_lambda_sq_for_xi_sq(6, 1, 2, 0.5) == doctest::Approx(0.4));
}

TEST_CASE("lambda for a target xi^2 in both modes") {
    for (QMode mode : {QMode::finite_n, QMode::infinite_n}) {
        for (double x2 : {0.2, 0.5, 0.9}) {
            const double lambda = lambda_for_xi_sq(12, 6, 1, 3, x2, mode);
            const SystemParams p{12, 6, 1, 3, lambda};
            CHECK(xi_for_mode(p, mode) == doctest::Approx(std::sqrt(x2)).epsilon(1e-13));
        }
    }
    CHECK(lambda_for_xi_sq(12, 6, 1, 2, 1.0, QMode::finite_n) == 0.0);
    CHECK_THROWS_AS(lambda_for_xi_sq(12, 6, 1, 2, 0.0, QMode::finite_n), std::invalid_argument);
    // finite-N: lambda^2 = Lambda0(t) / Lambda0(k) at xi^2 = 1/2; 42 / 420 for (12,6,1,2).
    CHECK(lambda_for_xi_sq(12, 6, 1, 2, 0.5, QMode::finite_n) == doctest::Approx(std::sqrt(0.1)).epsilon(1e-14));
}

TEST_CASE("infinite-N q parameters") {
    const QParameterSet a = q_params_at_xi_sq(20, 8, 1, 2, 0.5, QMode::infinite_n);
    CHECK(a.q_h == doctest::Approx(0.875).epsilon(1e-15));
    CHECK(std::abs(a.q_v - 0.536) < 1e-3);
    CHECK(a.q_hv == doctest::Approx(0.75).epsilon(1e-15));
    const QParameterSet b = q_params_at_xi_sq(50, 10, 1, 10, 0.5, QMode::infinite_n);
    CHECK(b.q_v == 0.0);
    CHECK(b.q_hv == 0.0);
    CHECK(q_params_infinite({9, 5, 1, 5, 0.3}).q_v == 0.0);
    const QParameterSet c = q_params_infinite({12, 6, 1, 2, 0.5});
    CHECK(c.q_H == doctest::Approx(compose_q_H(c.xi, c.q_h, c.q_v, c.q_hv)));
}

TEST_CASE("Lambda and d weights") {
    CHECK(lambda_capital(0, 12, 6, 2) == 420);
    CHECK(lambda_capital(5, 12, 6, 2) == 0);
    CHECK(lambda_capital(0, 30, 9, 0) == 1);
    CHECK(d_weight(12, 0) == 1);
    CHECK(d_weight(12, 1) == 143);
    CHECK(d_weight(20, 2) == 35700);
}

TEST_CASE("finite-N q parameters against a floating-point oracle") {
    for (auto [N, m] : {std::pair{12, 6}, std::pair{20, 8}, std::pair{50, 10}, std::pair{40, 12}}) {
        for (int k = 1; k <= m; ++k) {
            CAPTURE(N);
            CAPTURE(k);
            CHECK(q_operator_finite(N, m, k) == doctest::Approx(q_v_oracle(N, m, k)).epsilon(1e-9));
            if (k >= 2) {
                CHECK(q_cross_finite(N, m, 1, k) == doctest::Approx(q_hv_oracle(N, m, 1, k)).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("finite-N q parameters at reference rows") {
    const QParameterSet a = q_params_at_xi_sq(20, 8, 1, 2, 0.5, QMode::finite_n);
    CHECK(std::abs(a.q_h - 0.814) < 5e-4);
    CHECK(std::abs(a.q_v - 0.417) < 5e-4);
    CHECK(std::abs(a.q_hv - 0.654) < 5e-4);
    const QParameterSet b = q_params_at_xi_sq(50, 10, 1, 5, 0.5, QMode::finite_n);
    CHECK(std::abs(b.q_v - 0.003) < 5e-4);
    CHECK(std::abs(b.q_hv - 0.447) < 5e-4);
    const QParameterSet c = q_params_at_xi_sq(12, 6, 2, 2, 0.5, QMode::finite_n);
    for (double v : {c.q_h, c.q_v, c.q_hv, c.q_H}) {
        CHECK(std::abs(v - 0.287) < 5e-4);
    }
    const QParameterSet d = q_params_at_xi_sq(24, 8, 2, 4, 0.5, QMode::finite_n);
    CHECK(std::abs(d.q_v - 0.013) < 5e-4);
    CHECK(std::abs(d.q_hv - 0.154) < 5e-4);
    CHECK(std::abs(d.q_H - 0.19) < 5e-3);
    CHECK_THROWS_AS(q_params_at_xi_sq(12, 6, 3, 2, 0.5, QMode::finite_n), std::invalid_argument);
}

TEST_CASE("q parameters lie in [0,1] and are ordered by rank") {
    for (int N : {12, 20, 40}) {
        for (int m = 3; m <= N / 2; m += 3) {
            for (int k = 2; k <= m; ++k) {
                for (QMode mode : {QMode::finite_n, QMode::infinite_n}) {
                    const QParameterSet qp = q_params_at_xi_sq(N, m, 1, k, 0.5, mode);
                    CAPTURE(N);
                    CAPTURE(m);
                    CAPTURE(k);
                    for (double q : {qp.q_h, qp.q_v, qp.q_hv, qp.q_H}) {
                        CHECK(q >= 0.0);
                        CHECK(q <= 1.0);
                    }
                    CHECK(qp.q_v <= qp.q_hv + 1e-15);
                    CHECK(qp.q_hv <= qp.q_h + 1e-15);
                }
            }
        }
    }
}

TEST_CASE("finite-N parameters converge to the infinite-N limit") {
    const QParameterSet f = q_params_at_xi_sq(500, 10, 1, 2, 0.5, QMode::finite_n);
    const QParameterSet i = q_params_at_xi_sq(500, 10, 1, 2, 0.5, QMode::infinite_n);
    CHECK(std::abs(f.q_h / i.q_h - 1) < 0.02);
    CHECK(std::abs(f.q_v / i.q_v - 1) < 0.02);
    CHECK(std::abs(f.q_hv / i.q_hv - 1) < 0.02);
    const SystemParams p{500, 10, 1, 2, 0.05};
    CHECK(std::abs(xi_finite(p) / xi_infinite(p) - 1) < 0.02);
}

TEST_CASE("bivariate moments") {
    const QParameterSet qp = q_params_at_xi_sq(20, 8, 1, 2, 0.5, QMode::infinite_n);
    const BivariateMomentSet b = bivariate_moments(qp);
    CHECK(b.mu11 == qp.xi);
    CHECK(b.mu31 == qp.xi * b.mu40);
    const double qH = 0.25 * 0.875 + 0.25 * (15.0 / 28.0) + 0.5 * 0.75;
    CHECK(b.mu04 == doctest::Approx(2 + qH).epsilon(1e-14));
    CHECK(b.mu22 == doctest::Approx(0.5 * 2.875 + 0.5).epsilon(1e-14));
    for (double v : {b.mu40, b.mu04, b.mu31 / b.mu11, b.mu13 / b.mu11}) {
        CHECK(v >= 2.0);
        CHECK(v <= 3.0);
    }
    // mu22 mixes a fourth moment with 1 - xi^2 and can drop below 2.
    CHECK(b.mu22 >= 1.0);
    CHECK(b.mu22 <= 3.0);

    const int m = 1000, k = 2;
    const BivariateMomentSet big = bivariate_moments(q_params_at_xi_sq(4000, m, 1, k, 0.5, QMode::infinite_n));
    CHECK(big.mu40 == doctest::Approx(3.0 - 1.0 / m).epsilon(1e-12));
    CHECK(std::abs(big.mu04 - (3.0 - (1.0 + k) * (1.0 + k) / (4.0 * m))) < 1e-5);

    const BivariateMomentSet eq = bivariate_moments(q_params_at_xi_sq(12, 6, 2, 2, 0.5, QMode::finite_n));
    CHECK(eq.mu04 == doctest::Approx(eq.mu40).epsilon(1e-14));
}

TEST_CASE("strength-function moment prediction") {
    const double lambda = lambda_for_xi_sq(20, 8, 1, 2, 0.5, QMode::finite_n);
    const SystemParams p{20, 8, 1, 2, lambda};
    const QParameterSet qp = q_params_finite(p);
    CHECK(std::abs(strength_moment_prediction(0.0, p, qp).delta - (-0.043)) < 5e-4);
    CHECK(strength_moment_prediction(0.0, p, qp).gamma1 == 0.0);

    const SystemParams p4{50, 10, 1, 4, lambda_for_xi_sq(50, 10, 1, 4, 0.5, QMode::finite_n)};
    CHECK(std::abs(strength_moment_prediction(2.0, p4, q_params_finite(p4)).delta - (-0.228)) < 5e-4);

    for (double e : {0.3, 1.0, 2.2}) {
        const StrengthMomentPrediction a = strength_moment_prediction(e, p, qp);
        const StrengthMomentPrediction b = strength_moment_prediction(-e, p, qp);
        CHECK(a.gamma1 == -b.gamma1);
        CHECK(a.variance == doctest::Approx(1.0 - qp.xi * qp.xi).epsilon(1e-14));
        CHECK(a.mu4 == doctest::Approx(a.mu4_zeroth * (1 + a.delta)).epsilon(1e-15));
        // With the correction removed the prediction is the conditional q-normal at q^hv.
        const ConditionalMoments c = cqn_conditional_moments(e, qp.xi, QValue(qp.q_hv));
        CHECK(a.centroid == doctest::Approx(c.mean).epsilon(1e-14));
        CHECK(a.variance == doctest::Approx(c.variance).epsilon(1e-14));
        CHECK(a.gamma1 == doctest::Approx(c.gamma1).epsilon(1e-14));
        CHECK(a.gamma2_zeroth() == doctest::Approx(c.gamma2).epsilon(1e-12));
    }

    CHECK_THROWS_AS(strength_moment_prediction(1.0, SystemParams{20, 8, 1, 2, 0.0},
                                               q_params_finite({20, 8, 1, 2, 0.0})),
                    std::domain_error);
}
