// Copyright 2026 The qsf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace qsf {

struct QuadratureOptions {
    /// Target error relative to max(1, integral of |f|).
    double tolerance = 1e-10;
    unsigned max_depth = 30;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
};

class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, QuadratureResult partial)
        : std::runtime_error(what), partial_(partial) {}
    const QuadratureResult& partial() const noexcept { return partial_; }

private:
    QuadratureResult partial_;
};

using Integrand = std::function<double(double)>;

/// Adaptive Gauss-Kronrod over [a, b]. Infinite bounds are allowed.
/// Throws QuadratureError when the error estimate misses the tolerance.
QuadratureResult integrate(const Integrand& f, double a, double b,
                           const QuadratureOptions& opts = {});

/// Integral over a bounded symmetric interval (-half_width, half_width) of a
/// density with square-root edges. Integrates in x = half_width * cos(theta)
/// so the transformed integrand is smooth at both ends.
QuadratureResult integrate_sqrt_edges(const Integrand& f, double half_width,
                                      const QuadratureOptions& opts = {});

} // namespace qsf
