// Copyright 2026 The qsf Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file qnormal.hpp
 * @brief q-Hermite polynomials and the q-normal family of densities.
 *
 * All densities are in standardized variables (zero mean, unit variance
 * marginals). For q < 1 they live on the bounded support
 * S(q) = (-2/sqrt(1-q), 2/sqrt(1-q)); q = 1 is the Gaussian limit and is
 * evaluated through closed Gaussian forms instead of the product formulas.
 */

#pragma once

#include "qsf/quadrature.hpp"

namespace qsf {

/// Deformation parameter q in [0, 1].
class QValue {
public:
    /// Throws std::domain_error outside [0, 1] (NaN included).
    explicit QValue(double q);

    double value() const noexcept { return q_; }
    bool gaussian() const noexcept { return q_ == 1.0; }

private:
    double q_;
};

struct Support {
    double lower = 0.0;
    double upper = 0.0;
    bool unbounded = false;

    /// Open-interval membership; the boundary itself is excluded.
    bool contains(double x) const noexcept {
        return unbounded || (x > lower && x < upper);
    }
};

Support support(QValue q);

/// q-number [n]_q = (1 - q^n) / (1 - q), equal to n at q = 1.
double q_number(int n, QValue q);

/// H_n(x|q) via H_{n+1} = x H_n - [n]_q H_{n-1}, H_0 = 1, H_1 = x.
double q_hermite(int n, double x, QValue q);

/// q-normal density f_qN(x|q). Zero outside the open support.
double f_qn(double x, QValue q);

/// Coupling factor h(x, y | xi, q) of the bivariate q-normal.
/// Requires |xi| < 1 and x, y inside the closed support; throws std::domain_error otherwise.
double h_factor(double x, double y, double xi, QValue q);

/// Bivariate q-normal f_qN(x) f_qN(y) h(x, y).
double f_biv_qn(double x, double y, double xi, QValue q);

/// Conditional q-normal density of x given y: f_qN(x) h(x, y).
double f_cqn(double x, double y, double xi, QValue q);

/// Mean, variance, skewness and excess of f_cqn(.|y) in closed form.
struct ConditionalMoments {
    double mean = 0.0;
    double variance = 0.0;
    double gamma1 = 0.0;
    double gamma2 = 0.0;
};

ConditionalMoments cqn_conditional_moments(double y, double xi, QValue q);

/// Integral of g over the support of f_qN(.|q), with the square-root edge
/// substitution for q < 1 and the whole real line for q = 1.
QuadratureResult integrate_over_support(const Integrand& g, QValue q,
                                        const QuadratureOptions& opts = {});

/// Central moment of order r (1..4) of f_cqn(.|y) about xi*y, by quadrature.
QuadratureResult cqn_moment_quadrature(int r, double y, double xi, QValue q,
                                       const QuadratureOptions& opts = {});

/// |int H_n(x|q) f_cqn(x|y) dx - xi^n H_n(y|q)|.
double verify_cqn_reproducing(int n, double y, double xi, QValue q,
                              const QuadratureOptions& opts = {});

} // namespace qsf
