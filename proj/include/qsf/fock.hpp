// Copyright 2026 The qsf Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file fock.hpp
 * @brief Fermionic determinant basis, GOE sampling and r-body embedding.
 *
 * Determinants are 64-bit occupation masks; bit i set means orbital i is
 * occupied. A determinant is c+_{i1} ... c+_{ip} |0> with i1 < ... < ip.
 */

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace qsf {

using Mask = std::uint64_t;

class FockBasis {
public:
    static constexpr std::size_t kDefaultCap = 200000;

    /// All p-subsets of N orbitals in ascending mask order.
    /// Throws std::invalid_argument unless 0 <= p <= N <= 64 and
    /// std::length_error when binom(N, p) exceeds cap.
    FockBasis(int N, int p, std::size_t cap = kDefaultCap);

    int orbitals() const noexcept { return N_; }
    int particles() const noexcept { return p_; }
    std::size_t size() const noexcept { return states_.size(); }

    Mask state(std::size_t i) const { return states_[i]; }
    const std::vector<Mask>& states() const noexcept { return states_; }

    bool contains(Mask s) const noexcept;

    /// Position of s in states(). s must be a member; use contains() first
    /// if unsure.
    std::size_t index(Mask s) const noexcept {
        std::size_t rank = 0;
        int i = 0;
        while (s != 0) {
            const int pos = __builtin_ctzll(s);
            rank += pascal_[static_cast<std::size_t>(pos) * static_cast<std::size_t>(p_ + 1) + i + 1];
            s &= s - 1;
            ++i;
        }
        return rank;
    }

private:
    int N_;
    int p_;
    std::vector<Mask> states_;
    // binom(a, b) for a < 64, b <= p; colex rank table.
    std::vector<std::uint64_t> pascal_;
};

enum class OperatorTag : std::uint32_t { h0 = 0, v = 1 };

struct SeedTag {
    std::uint64_t master_seed = 0;
    std::uint64_t member = 0;
    OperatorTag tag = OperatorTag::h0;
};

struct GoeSample {
    Eigen::MatrixXd matrix;
    SeedTag seed;

    Eigen::Index dim() const noexcept { return matrix.rows(); }
};

/// Real symmetric GOE matrix, off-diagonal variance 1 and diagonal
/// variance 2. The stream is a pure function of the seed tag.
GoeSample sample_goe(int dim, const SeedTag& seed);

struct EmbeddedOperator {
    int rank = 0;
    Eigen::MatrixXd matrix;
    SeedTag seed;
};

/// Embeds an r-particle operator g (over basis_r) into the m-particle space
/// basis_m: V = sum_{ab} g_{ab} B+(a) B(b). Throws std::invalid_argument on
/// basis mismatch.
EmbeddedOperator embed_k_body(const GoeSample& g, const FockBasis& basis_r, const FockBasis& basis_m);

/// H = h0 + lambda v. Throws std::invalid_argument on dimension mismatch.
Eigen::MatrixXd compose_hamiltonian(const EmbeddedOperator& h0, const EmbeddedOperator& v, double lambda);

/// Number of orbitals in which two determinants differ (half the symmetric
/// difference).
inline int excitation_rank(Mask a, Mask b) noexcept {
    return __builtin_popcountll(a & ~b);
}

/// Row-major text dump with a '#' header carrying N, m, rank and seed tag.
void write_operator_text(std::ostream& os, const EmbeddedOperator& op, const FockBasis& basis_m);

/// Dimension binom(N+m-1, m) of m bosons in N orbitals.
std::uint64_t boson_dimension(int N, int m);

} // namespace qsf
