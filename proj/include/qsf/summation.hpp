// Copyright 2026 The qsf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>

namespace qsf {

/// Neumaier compensated sum.
struct CompensatedSum {
    double sum = 0.0;
    double compensation = 0.0;

    void add(double v) noexcept {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            compensation += (sum - t) + v;
        } else {
            compensation += (v - t) + sum;
        }
        sum = t;
    }

    void merge(const CompensatedSum& other) noexcept {
        add(other.sum);
        add(other.compensation);
    }

    double value() const noexcept { return sum + compensation; }
};

} // namespace qsf
