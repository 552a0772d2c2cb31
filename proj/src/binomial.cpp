// Copyright 2026 The qsf Authors
// SPDX-License-Identifier: Apache-2.0

#include "qsf/binomial.hpp"

#include <limits>
#include <stdexcept>

namespace qsf {

BigInt binom(long a, long b) {
    if (a < 0 || b < 0 || a < b) {
        return 0;
    }
    if (b > a - b) {
        b = a - b;
    }
    BigInt result = 1;
    for (long i = 1; i <= b; ++i) {
        result *= a - b + i;
        result /= i;
    }
    return result;
}

std::uint64_t binom_u64(long a, long b) {
    BigInt v = binom(a, b);
    if (v > BigInt(std::numeric_limits<std::uint64_t>::max())) {
        throw std::overflow_error("binomial coefficient exceeds 64 bits");
    }
    return v.convert_to<std::uint64_t>();
}

double binom_real(long a, long b) {
    return binom(a, b).convert_to<double>();
}

double ratio_to_double(const BigInt& num, const BigInt& den) {
    if (den == 0) {
        throw std::domain_error("ratio_to_double: zero denominator");
    }
    return BigRational(num, den).convert_to<double>();
}

} // namespace qsf
