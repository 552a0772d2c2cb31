// Copyright 2026 The qsf Authors
// SPDX-License-Identifier: Apache-2.0

#include "qsf/qnormal.hpp"

#include "qsf/summation.hpp"

#include <boost/math/constants/constants.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace qsf {

namespace {

constexpr double kTwoPi = boost::math::constants::two_pi<double>();

// Remaining factors are dropped once the whole tail of the log-product is
// below this bound.
constexpr double kTailBound = 1e-17;

void require_xi(double xi) {
    if (!(std::abs(xi) < 1.0)) {
        throw std::domain_error("correlation xi must satisfy |xi| < 1, got " + std::to_string(xi));
    }
}

double gaussian_density(double x, double mean, double variance) {
    const double d = x - mean;
    return std::exp(-0.5 * d * d / variance) / std::sqrt(kTwoPi * variance);
}

} // namespace

QValue::QValue(double q) : q_(q) {
    if (!(q >= 0.0 && q <= 1.0)) {
        throw std::domain_error("q must lie in [0, 1], got " + std::to_string(q));
    }
}

Support support(QValue q) {
    if (q.gaussian()) {
        constexpr double inf = std::numeric_limits<double>::infinity();
        return {-inf, inf, true};
    }
    const double edge = 2.0 / std::sqrt(1.0 - q.value());
    return {-edge, edge, false};
}

double q_number(int n, QValue q) {
    if (q.gaussian()) {
        return n;
    }
    return (1.0 - std::pow(q.value(), n)) / (1.0 - q.value());
}

double q_hermite(int n, double x, QValue q) {
    if (n < 0) {
        throw std::invalid_argument("q_hermite: order must be non-negative");
    }
    if (n == 0) {
        return 1.0;
    }
    double prev = 1.0;
    double cur = x;
    for (int j = 1; j < n; ++j) {
        const double next = x * cur - q_number(j, q) * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

double f_qn(double x, QValue qv) {
    if (qv.gaussian()) {
        return gaussian_density(x, 0.0, 1.0);
    }
    const double q = qv.value();
    const double a = 1.0 - q;
    const double edge = 4.0 - a * x * x;
    if (!(edge > 0.0)) {
        return 0.0;
    }
    // The k'=0 factor of the x-dependent product cancels the 1/sqrt(edge)
    // prefactor down to sqrt(edge). The rest is summed in log space: for q
    // close to 1 the two infinite products separately under/overflow.
    CompensatedSum log_f;
    log_f.add(0.5 * std::log(a) - std::log(kTwoPi) + 0.5 * std::log(edge));
    const double c = 2.0 - a * x * x;
    const double log_q = q > 0.0 ? std::log(q) : 0.0;
    double qj = q;
    for (int j = 1; qj * 4.0 / a >= kTailBound; ++j) {
        const double one_minus_qj = qj > 0.5 ? -std::expm1(j * log_q) : 1.0 - qj;
        log_f.add(std::log(one_minus_qj) + std::log1p(qj * (c + qj)));
        qj *= q;
    }
    return std::exp(log_f.value());
}

double h_factor(double x, double y, double xi, QValue qv) {
    require_xi(xi);
    const Support s = support(qv);
    if (!s.unbounded && (std::abs(x) > s.upper || std::abs(y) > s.upper)) {
        throw std::domain_error("h_factor: argument outside the support of q");
    }
    const double xi2 = xi * xi;
    if (qv.gaussian()) {
        const double r = 1.0 - xi2;
        return std::exp(-(x * x - 2.0 * xi * x * y + y * y) / (2.0 * r) + 0.5 * (x * x + y * y)) /
               std::sqrt(r);
    }
    if (xi == 0.0) {
        return 1.0;
    }
    const double q = qv.value();
    const double a = 1.0 - q;
    double product = 1.0;
    double log_sum = 0.0;
    bool small_denominator = false;
    double qk = 1.0;
    while (true) {
        const double q2k = qk * qk;
        const double num = 1.0 - xi2 * qk;
        const double b = 1.0 - xi2 * q2k;
        const double den = b * b - a * xi * qk * (1.0 + xi2 * q2k) * x * y + a * xi2 * q2k * (x * x + y * y);
        small_denominator = small_denominator || den < 1e-12;
        product *= num / den;
        log_sum += std::log(num) - std::log(den);
        qk *= q;
        if (qk * 20.0 / a < kTailBound) {
            break;
        }
    }
    return small_denominator ? std::exp(log_sum) : product;
}

double f_biv_qn(double x, double y, double xi, QValue q) {
    require_xi(xi);
    const double fx = f_qn(x, q);
    const double fy = f_qn(y, q);
    if (fx == 0.0 || fy == 0.0) {
        return 0.0;
    }
    return fx * fy * h_factor(x, y, xi, q);
}

double f_cqn(double x, double y, double xi, QValue q) {
    require_xi(xi);
    if (q.gaussian()) {
        return gaussian_density(x, xi * y, 1.0 - xi * xi);
    }
    const Support s = support(q);
    if (std::abs(y) > s.upper) {
        throw std::domain_error("f_cqn: conditioning value outside the support of q");
    }
    const double fx = f_qn(x, q);
    if (fx == 0.0) {
        return 0.0;
    }
    return fx * h_factor(x, y, xi, q);
}

ConditionalMoments cqn_conditional_moments(double y, double xi, QValue qv) {
    require_xi(xi);
    const double q = qv.value();
    const double xi2 = xi * xi;
    const double one_minus = 1.0 - xi2;
    ConditionalMoments m;
    m.mean = xi * y;
    m.variance = one_minus;
    m.gamma1 = -xi * (1.0 - q) * y / std::sqrt(one_minus);
    m.gamma2 = (q - 1.0) + ((1.0 - q) * (1.0 - q) * xi2 * y * y + xi2 * (1.0 - q * q)) / one_minus;
    return m;
}

QuadratureResult integrate_over_support(const Integrand& g, QValue q, const QuadratureOptions& opts) {
    if (q.gaussian()) {
        constexpr double inf = std::numeric_limits<double>::infinity();
        return integrate(g, -inf, inf, opts);
    }
    return integrate_sqrt_edges(g, support(q).upper, opts);
}

QuadratureResult cqn_moment_quadrature(int r, double y, double xi, QValue q, const QuadratureOptions& opts) {
    if (r < 1 || r > 4) {
        throw std::invalid_argument("cqn_moment_quadrature: order must be in 1..4");
    }
    require_xi(xi);
    const double centre = xi * y;
    return integrate_over_support(
        [&](double x) { return std::pow(x - centre, r) * f_cqn(x, y, xi, q); }, q, opts);
}

double verify_cqn_reproducing(int n, double y, double xi, QValue q, const QuadratureOptions& opts) {
    if (n < 0) {
        throw std::invalid_argument("verify_cqn_reproducing: order must be non-negative");
    }
    require_xi(xi);
    const QuadratureResult r = integrate_over_support(
        [&](double x) { return q_hermite(n, x, q) * f_cqn(x, y, xi, q); }, q, opts);
    return std::abs(r.value - std::pow(xi, n) * q_hermite(n, y, q));
}

} // namespace qsf
