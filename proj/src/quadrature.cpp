// Copyright 2026 The qsf Authors
// SPDX-License-Identifier: Apache-2.0

#include "qsf/quadrature.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace qsf {

namespace {

using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;

QuadratureResult checked(double value, double error, double l1, const QuadratureOptions& opts) {
    QuadratureResult r{value, error};
    if (!std::isfinite(value) || error > opts.tolerance * std::max(1.0, l1)) {
        throw QuadratureError("quadrature error estimate " + std::to_string(error) +
                                  " exceeds tolerance " + std::to_string(opts.tolerance),
                              r);
    }
    return r;
}

} // namespace

QuadratureResult integrate(const Integrand& f, double a, double b, const QuadratureOptions& opts) {
    double error = 0.0;
    double l1 = 0.0;
    const double value = Rule::integrate(f, a, b, opts.max_depth, opts.tolerance, &error, &l1);
    return checked(value, error, l1, opts);
}

QuadratureResult integrate_sqrt_edges(const Integrand& f, double half_width,
                                      const QuadratureOptions& opts) {
    const auto g = [&](double theta) {
        return f(half_width * std::cos(theta)) * half_width * std::sin(theta);
    };
    double error = 0.0;
    double l1 = 0.0;
    const double value = Rule::integrate(g, 0.0, boost::math::constants::pi<double>(),
                                         opts.max_depth, opts.tolerance, &error, &l1);
    return checked(value, error, l1, opts);
}

} // namespace qsf
