// Copyright 2026 The qsf Authors
// SPDX-License-Identifier: Apache-2.0

#include "qsf/bca.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qsf {

namespace {

void require_xi_sq(double xi_sq) {
    if (!(xi_sq > 0.0 && xi_sq <= 1.0)) {
        throw std::invalid_argument("xi^2 target must lie in (0, 1]");
    }
}

BigInt lambda0(int N, int m, int r) { return lambda_capital(0, N, m, r); }

} // namespace

void SystemParams::validate() const {
    if (N <= 0 || m <= 0 || t <= 0 || k <= 0) {
        throw std::invalid_argument("N, m, t and k must be positive integers");
    }
    if (!(t < k)) {
        throw std::invalid_argument("t < k required (got t=" + std::to_string(t) +
                                    ", k=" + std::to_string(k) + ")");
    }
    if (!(k <= m)) {
        throw std::invalid_argument("k <= m required (got k=" + std::to_string(k) +
                                    ", m=" + std::to_string(m) + ")");
    }
    if (!(m <= N)) {
        throw std::invalid_argument("m <= N required (got m=" + std::to_string(m) +
                                    ", N=" + std::to_string(N) + ")");
    }
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument("lambda must be finite and non-negative");
    }
}

std::string to_string(QMode mode) {
    return mode == QMode::finite_n ? "finite-N" : "infinite-N";
}

double bold_lambda_sq(const SystemParams& p) {
    return ratio_to_double(binom(p.N, p.k), binom(p.N, p.t)) * p.lambda * p.lambda;
}

double xi_infinite(const SystemParams& p) {
    const double bt = binom_real(p.m, p.t);
    const double bk = binom_real(p.m, p.k);
    return std::sqrt(bt / (bt + bold_lambda_sq(p) * bk));
}

double xi_finite(const SystemParams& p) {
    const double vt = lambda0(p.N, p.m, p.t).convert_to<double>();
    const double vk = lambda0(p.N, p.m, p.k).convert_to<double>();
    return std::sqrt(vt / (vt + p.lambda * p.lambda * vk));
}

double xi_for_mode(const SystemParams& p, QMode mode) {
    return mode == QMode::finite_n ? xi_finite(p) : xi_infinite(p);
}

double lambda_thermo(int m, int k) {
    return ratio_to_double(BigInt(m), binom(m, k));
}

double bold_lambda_sq_for_xi_sq(int m, int t, int k, double xi_sq) {
    require_xi_sq(xi_sq);
    return ratio_to_double(binom(m, t), binom(m, k)) * (1.0 - xi_sq) / xi_sq;
}

double lambda_for_xi_sq(int N, int m, int t, int k, double xi_sq, QMode mode) {
    require_xi_sq(xi_sq);
    double lambda_sq = 0.0;
    if (mode == QMode::finite_n) {
        lambda_sq = ratio_to_double(lambda0(N, m, t), lambda0(N, m, k)) * (1.0 - xi_sq) / xi_sq;
    } else {
        lambda_sq = bold_lambda_sq_for_xi_sq(m, t, k, xi_sq) * ratio_to_double(binom(N, t), binom(N, k));
    }
    return std::sqrt(lambda_sq);
}

double compose_q_H(double xi, double q_h, double q_v, double q_hv) {
    const double x2 = xi * xi;
    return x2 * x2 * q_h + (1.0 - x2) * (1.0 - x2) * q_v + 2.0 * x2 * (1.0 - x2) * q_hv;
}

QParameterSet q_params_infinite(const SystemParams& p) {
    p.validate();
    const double xi = xi_infinite(p);
    return q_params_at_xi_sq(p.N, p.m, p.t, p.k, xi * xi, QMode::infinite_n);
}

BigInt lambda_capital(int nu, int N_p, int m_p, int r) {
    return binom(m_p - nu, r) * binom(N_p - m_p + r - nu, r);
}

BigInt d_weight(int N, int nu) {
    const BigInt a = binom(N, nu);
    const BigInt b = binom(N, nu - 1);
    return a * a - b * b;
}

double q_operator_finite(int N, int m, int r) {
    BigInt num = 0;
    for (int nu = 0; nu <= std::min(r, m - r); ++nu) {
        num += lambda_capital(nu, N, m, r) * lambda_capital(nu, N, m, m - r) * d_weight(N, nu);
    }
    const BigInt l0 = lambda0(N, m, r);
    return ratio_to_double(num, binom(N, m) * l0 * l0);
}

double q_cross_finite(int N, int m, int t, int k) {
    BigInt num = 0;
    for (int nu = 0; nu <= std::min(t, m - k); ++nu) {
        num += lambda_capital(nu, N, m, k) * lambda_capital(nu, N, m, m - t) * d_weight(N, nu);
    }
    return ratio_to_double(num, binom(N, m) * lambda0(N, m, t) * lambda0(N, m, k));
}

QParameterSet q_params_finite(const SystemParams& p) {
    p.validate();
    const double xi = xi_finite(p);
    return q_params_at_xi_sq(p.N, p.m, p.t, p.k, xi * xi, QMode::finite_n);
}

QParameterSet q_params(const SystemParams& p, QMode mode) {
    return mode == QMode::finite_n ? q_params_finite(p) : q_params_infinite(p);
}

QParameterSet q_params_at_xi_sq(int N, int m, int t, int k, double xi_sq, QMode mode) {
    require_xi_sq(xi_sq);
    if (t <= 0 || k < t || m < k || N < m) {
        throw std::invalid_argument("1 <= t <= k <= m <= N required");
    }
    QParameterSet qp;
    qp.mode = mode;
    qp.xi = std::sqrt(xi_sq);
    if (mode == QMode::finite_n) {
        qp.q_h = q_operator_finite(N, m, t);
        qp.q_v = q_operator_finite(N, m, k);
        qp.q_hv = q_cross_finite(N, m, t, k);
    } else {
        qp.q_h = ratio_to_double(binom(m - t, t), binom(m, t));
        qp.q_v = ratio_to_double(binom(m - k, k), binom(m, k));
        qp.q_hv = ratio_to_double(binom(m - t, k), binom(m, k));
    }
    qp.q_H = compose_q_H(qp.xi, qp.q_h, qp.q_v, qp.q_hv);
    return qp;
}

BivariateMomentSet bivariate_moments(const QParameterSet& qp) {
    const double xi = qp.xi;
    const double x2 = xi * xi;
    BivariateMomentSet b;
    b.mu11 = xi;
    b.mu40 = 2.0 + qp.q_h;
    b.mu04 = 2.0 + qp.q_H;
    b.mu31 = xi * b.mu40;
    b.mu13 = xi * (2.0 + x2 * qp.q_h + (1.0 - x2) * qp.q_hv);
    b.mu22 = x2 * (2.0 + qp.q_h) + (1.0 - x2);
    return b;
}

StrengthMomentPrediction strength_moment_prediction(double e_hat_kappa, const SystemParams& p,
                                                    const QParameterSet& qp) {
    if (!(qp.xi < 1.0)) {
        throw std::domain_error("strength-function prediction requires xi < 1 (lambda > 0)");
    }
    const double xi = qp.xi;
    const double x2 = xi * xi;
    const double one_minus = 1.0 - x2;
    const double q = qp.q_hv;
    const double e2 = e_hat_kappa * e_hat_kappa;

    StrengthMomentPrediction s;
    s.e_hat_kappa = e_hat_kappa;
    s.centroid = xi * e_hat_kappa;
    s.variance = one_minus;
    s.gamma1 = -xi * (1.0 - q) * e_hat_kappa / std::sqrt(one_minus);
    s.mu4_zeroth = (2.0 + q) + (x2 * e2 * (1.0 - q) * (1.0 - q) + x2 * (1.0 - q * q)) / one_minus;

    const double ratio = ratio_to_double(binom(p.m - p.k - p.t, p.k), binom(p.m, p.k));
    const double x_coeff = 0.5 * q * (ratio - q);
    const double delta0 = (qp.q_v - q) + x_coeff * x2 / one_minus * (e2 - 1.0);
    s.delta = delta0 / s.mu4_zeroth;
    s.mu4 = s.mu4_zeroth * (1.0 + s.delta);
    return s;
}

} // namespace qsf
