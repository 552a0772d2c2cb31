// Copyright 2026 The qsf Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file bca.hpp
 * @brief Analytic parameters of H = H0(t) + lambda V(k) with H0 and V drawn
 *        from independent embedded GOEs.
 *
 * Two parameter modes are provided: the strict N -> infinity binary
 * correlation limit, and exact finite-N combinatorial formulas built on
 * Lambda^nu(N, m, r) and d(N:nu). All combinatorics are exact big-integer
 * arithmetic, rounded once to double at the end.
 */

#pragma once

#include "qsf/binomial.hpp"

#include <string>

namespace qsf {

/// Model (N, m, t, k, lambda): m fermions in N single-particle states,
/// t-body H0, k-body V, interaction strength lambda.
struct SystemParams {
    int N = 0;
    int m = 0;
    int t = 0;
    int k = 0;
    double lambda = 0.0;

    /// Throws std::invalid_argument naming the violated constraint
    /// (positivity, t < k <= m <= N, lambda >= 0).
    void validate() const;
};

enum class QMode { infinite_n, finite_n };

std::string to_string(QMode mode);

struct QParameterSet {
    double xi = 1.0;
    double q_h = 0.0;
    double q_v = 0.0;
    double q_hv = 0.0;
    double q_H = 0.0;
    QMode mode = QMode::infinite_n;
};

/// Reduced bivariate moments mu_PQ of rho(E_kappa, E).
struct BivariateMomentSet {
    double mu11 = 0.0;
    double mu40 = 0.0;
    double mu04 = 0.0;
    double mu31 = 0.0;
    double mu13 = 0.0;
    double mu22 = 0.0;
};

/// Predicted first four moments of the strength function at standardized
/// basis energy e_hat_kappa, in units of the H width.
struct StrengthMomentPrediction {
    double e_hat_kappa = 0.0;
    double centroid = 0.0;
    double variance = 0.0;
    double gamma1 = 0.0;
    double mu4_zeroth = 0.0;
    double delta = 0.0;
    double mu4 = 0.0;

    double gamma2() const { return mu4 - 3.0; }
    double gamma2_zeroth() const { return mu4_zeroth - 3.0; }
};

/// binom(N,t)^-1 binom(N,k) lambda^2.
double bold_lambda_sq(const SystemParams& p);

/// Infinite-N correlation coefficient sigma_H0 / sigma_H.
double xi_infinite(const SystemParams& p);

/// Finite-N correlation coefficient with trace variances Lambda^0(N,m,t) and
/// lambda^2 Lambda^0(N,m,k).
double xi_finite(const SystemParams& p);

double xi_for_mode(const SystemParams& p, QMode mode);

/// Bold lambda^2 that gives xi^2 = 1/2 for t = 1: m / binom(m,k).
double lambda_thermo(int m, int k);

/// Bold lambda^2 giving the infinite-N xi^2 = xi_sq for any t.
double bold_lambda_sq_for_xi_sq(int m, int t, int k, double xi_sq);

/// Plain lambda that realizes xi^2 = xi_sq in the chosen mode.
double lambda_for_xi_sq(int N, int m, int t, int k, double xi_sq, QMode mode);

/// q^H = xi^4 q^h + (1-xi^2)^2 q^v + 2 xi^2 (1-xi^2) q^hv.
double compose_q_H(double xi, double q_h, double q_v, double q_hv);

QParameterSet q_params_infinite(const SystemParams& p);
QParameterSet q_params_finite(const SystemParams& p);
QParameterSet q_params(const SystemParams& p, QMode mode);

/// Parameter set at a fixed xi^2 instead of lambda, as used for the
/// reference tables. Accepts t <= k (t = k included) with 1 <= t, k <= m <= N.
QParameterSet q_params_at_xi_sq(int N, int m, int t, int k, double xi_sq, QMode mode);

BivariateMomentSet bivariate_moments(const QParameterSet& qp);

/// Lambda^nu(N', m', r) = binom(m'-nu, r) binom(N'-m'+r-nu, r).
BigInt lambda_capital(int nu, int N_p, int m_p, int r);

/// d(N:nu) = binom(N,nu)^2 - binom(N,nu-1)^2.
BigInt d_weight(int N, int nu);

/// Finite-N fourth-moment parameter of an EGOE(r) operator (q^v for r = k,
/// q^h for r = t).
double q_operator_finite(int N, int m, int r);

/// Finite-N cross parameter q^hv.
double q_cross_finite(int N, int m, int t, int k);

/// Requires qp.xi < 1; throws std::domain_error otherwise.
StrengthMomentPrediction strength_moment_prediction(double e_hat_kappa, const SystemParams& p,
                                                    const QParameterSet& qp);

} // namespace qsf
