// Copyright 2026 The qsf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>

namespace qsf {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/// Exact binomial coefficient. Zero when b < 0, a < 0 or a < b.
BigInt binom(long a, long b);

/// Binomial coefficient in 64-bit arithmetic; throws std::overflow_error on overflow.
std::uint64_t binom_u64(long a, long b);

/// binom(a, b) as a double (exact value rounded once).
double binom_real(long a, long b);

/// Exact ratio num/den rounded to double.
double ratio_to_double(const BigInt& num, const BigInt& den);

} // namespace qsf
