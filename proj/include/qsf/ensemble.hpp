// Copyright 2026 The qsf Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file ensemble.hpp
 * @brief Parallel EGOE(t + k) member pipeline with a deterministic reduction.
 *
 * Member j draws its H0 and V matrices from streams keyed by
 * (seed, j, tag). Per-member partial statistics are reduced in member order
 * after all workers finish, so results do not depend on the worker count.
 */

#pragma once

#include "qsf/bca.hpp"
#include "qsf/fock.hpp"
#include "qsf/spectral.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace qsf {

struct SimulationConfig {
    SystemParams system;
    std::size_t members = 100;
    /// Index of the first member; lets a run be split into mergeable parts.
    std::size_t first_member = 0;
    std::uint64_t seed = 1;
    unsigned workers = 1;
    Windows windows;
    Grid grid;
    Standardization convention = Standardization::per_member;
    /// Diagonalize and collect strength / chaos statistics. Off means
    /// bivariate trace moments only.
    bool spectra = true;
    bool verify = false;
    double max_failure_fraction = 0.01;
    std::size_t dimension_cap = FockBasis::kDefaultCap;
};

struct MemberFailure {
    std::size_t member = 0;
    std::uint64_t seed = 0;
    std::string reason;
};

struct SimulationResult {
    StrengthAccumulator strength;
    ChaosAccumulator chaos;
    std::vector<MemberMoments> moments;
    std::vector<MemberFailure> failures;
    SpectralScale ensemble_scale;
    std::size_t dimension = 0;
};

/// Embedded H0(t) and V(k) matrices of one member.
struct MemberOperators {
    EmbeddedOperator h0;
    EmbeddedOperator v;
};

class MemberFactory {
public:
    explicit MemberFactory(const SystemParams& p, std::size_t cap = FockBasis::kDefaultCap);

    MemberOperators build(std::uint64_t seed, std::size_t member) const;
    std::size_t dimension() const noexcept { return basis_m_.size(); }
    const FockBasis& basis() const noexcept { return basis_m_; }

private:
    SystemParams p_;
    FockBasis basis_t_;
    FockBasis basis_k_;
    FockBasis basis_m_;
};

/// Throws std::runtime_error when more than max_failure_fraction of the
/// members fail to diagonalize; failures below that are logged to `log` and
/// listed in the result.
SimulationResult run_simulation(const SimulationConfig& cfg, std::ostream* log = nullptr);

/// Merge of two runs over disjoint member ranges of the same configuration.
SimulationResult merge(const SimulationResult& a, const SimulationResult& b);

/// Reduced fourth moment of the embedded rank-r GOE operator for each member,
/// from traces. Used for the spectral-shape endpoints k = 1 and k = m.
std::vector<double> operator_fourth_moments(int N, int m, int r, std::size_t members, std::uint64_t seed,
                                            unsigned workers = 1);

/// Runs fn(i) for i in [0, count) on `workers` threads. Exceptions are
/// rethrown on the calling thread after all workers stop.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn);

} // namespace qsf
