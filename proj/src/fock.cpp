// Copyright 2026 The qsf Authors
// SPDX-License-Identifier: Apache-2.0

#include "qsf/fock.hpp"

#include "qsf/binomial.hpp"

#include <array>
#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

namespace qsf {

namespace {

Mask low_mask(int n) {
    return n >= 64 ? ~Mask{0} : (Mask{1} << n) - 1;
}

// Next mask with the same popcount (Gosper).
Mask next_combination(Mask x) {
    const Mask c = x & (~x + 1);
    const Mask r = x + c;
    return (((r ^ x) >> 2) / c) | r;
}

// Sign of B+(a)|g> relative to the ascending determinant of a|g: one
// transposition for every spectator orbital below each orbital of a.
int phase_parity(Mask a, Mask g) {
    int count = 0;
    while (a != 0) {
        const int pos = __builtin_ctzll(a);
        count += __builtin_popcountll(g & low_mask(pos));
        a &= a - 1;
    }
    return count & 1;
}

} // namespace

FockBasis::FockBasis(int N, int p, std::size_t cap) : N_(N), p_(p) {
    if (N < 0 || N > 64 || p < 0 || p > N) {
        throw std::invalid_argument("FockBasis: 0 <= p <= N <= 64 required");
    }
    const BigInt dim = binom(N, p);
    if (dim > BigInt(cap)) {
        throw std::length_error("FockBasis: dimension binom(" + std::to_string(N) + "," +
                                std::to_string(p) + ") exceeds cap " + std::to_string(cap));
    }
    const auto d = dim.convert_to<std::size_t>();

    pascal_.assign(static_cast<std::size_t>(64) * static_cast<std::size_t>(p + 1), 0);
    for (int a = 0; a < 64; ++a) {
        for (int b = 0; b <= p; ++b) {
            pascal_[static_cast<std::size_t>(a) * static_cast<std::size_t>(p + 1) + b] = binom_u64(a, b);
        }
    }

    states_.reserve(d);
    Mask s = low_mask(p);
    for (std::size_t i = 0; i < d; ++i) {
        states_.push_back(s);
        if (i + 1 < d) {
            s = next_combination(s);
        }
    }
}

bool FockBasis::contains(Mask s) const noexcept {
    return __builtin_popcountll(s) == p_ && (s & ~low_mask(N_)) == 0;
}

GoeSample sample_goe(int dim, const SeedTag& seed) {
    if (dim < 1) {
        throw std::invalid_argument("sample_goe: dim must be positive");
    }
    std::seed_seq seq{static_cast<std::uint32_t>(seed.master_seed),
                      static_cast<std::uint32_t>(seed.master_seed >> 32),
                      static_cast<std::uint32_t>(seed.member),
                      static_cast<std::uint32_t>(seed.member >> 32),
                      static_cast<std::uint32_t>(seed.tag),
                      0x71736675u};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double sqrt2 = std::sqrt(2.0);

    GoeSample g;
    g.seed = seed;
    g.matrix.resize(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < i; ++j) {
            const double v = normal(rng);
            g.matrix(i, j) = v;
            g.matrix(j, i) = v;
        }
        g.matrix(i, i) = sqrt2 * normal(rng);
    }
    return g;
}

EmbeddedOperator embed_k_body(const GoeSample& g, const FockBasis& basis_r, const FockBasis& basis_m) {
    if (basis_r.orbitals() != basis_m.orbitals()) {
        throw std::invalid_argument("embed_k_body: bases have different orbital counts");
    }
    if (basis_r.particles() > basis_m.particles()) {
        throw std::invalid_argument("embed_k_body: operator rank exceeds particle number");
    }
    if (static_cast<std::size_t>(g.dim()) != basis_r.size() || g.matrix.cols() != g.matrix.rows()) {
        throw std::invalid_argument("embed_k_body: GOE dimension does not match the r-particle basis");
    }

    const int N = basis_m.orbitals();
    const int spectators = basis_m.particles() - basis_r.particles();
    const Mask full = low_mask(N);
    const auto d = static_cast<Eigen::Index>(basis_m.size());

    EmbeddedOperator op;
    op.rank = basis_r.particles();
    op.seed = g.seed;
    op.matrix = Eigen::MatrixXd::Zero(d, d);

    std::array<int, 64> free_pos{};
    const auto dr = static_cast<Eigen::Index>(basis_r.size());
    for (Eigen::Index a = 0; a < dr; ++a) {
        const Mask A = basis_r.state(static_cast<std::size_t>(a));
        for (Eigen::Index b = 0; b <= a; ++b) {
            const double v = g.matrix(a, b);
            if (v == 0.0) {
                continue;
            }
            const Mask B = basis_r.state(static_cast<std::size_t>(b));
            Mask free = full & ~(A | B);
            const int n_free = __builtin_popcountll(free);
            if (n_free < spectators) {
                continue;
            }
            for (int i = 0; free != 0; ++i) {
                free_pos[i] = __builtin_ctzll(free);
                free &= free - 1;
            }
            // Gosper over the compact index space of free orbitals.
            const Mask last = spectators == 0 ? 0 : low_mask(spectators) << (n_free - spectators);
            Mask c = low_mask(spectators);
            while (true) {
                Mask gamma = 0;
                for (Mask x = c; x != 0; x &= x - 1) {
                    gamma |= Mask{1} << free_pos[__builtin_ctzll(x)];
                }
                const auto i = static_cast<Eigen::Index>(basis_m.index(A | gamma));
                const auto j = static_cast<Eigen::Index>(basis_m.index(B | gamma));
                const double term = ((phase_parity(A, gamma) ^ phase_parity(B, gamma)) != 0) ? -v : v;
                if (i >= j) {
                    op.matrix(i, j) += term;
                } else {
                    op.matrix(j, i) += term;
                }
                if (c == last) {
                    break;
                }
                c = next_combination(c);
            }
        }
    }
    for (Eigen::Index j = 1; j < d; ++j) {
        for (Eigen::Index i = 0; i < j; ++i) {
            op.matrix(i, j) = op.matrix(j, i);
        }
    }
    return op;
}

Eigen::MatrixXd compose_hamiltonian(const EmbeddedOperator& h0, const EmbeddedOperator& v, double lambda) {
    if (h0.matrix.rows() != v.matrix.rows() || h0.matrix.cols() != v.matrix.cols()) {
        throw std::invalid_argument("compose_hamiltonian: dimension mismatch");
    }
    return h0.matrix + lambda * v.matrix;
}

void write_operator_text(std::ostream& os, const EmbeddedOperator& op, const FockBasis& basis_m) {
    os << "# N " << basis_m.orbitals() << " m " << basis_m.particles() << " rank " << op.rank
       << " seed " << op.seed.master_seed << " member " << op.seed.member << " tag "
       << static_cast<std::uint32_t>(op.seed.tag) << '\n';
    const auto old_precision = os.precision(17);
    for (Eigen::Index i = 0; i < op.matrix.rows(); ++i) {
        for (Eigen::Index j = 0; j < op.matrix.cols(); ++j) {
            if (j > 0) {
                os << ' ';
            }
            os << op.matrix(i, j);
        }
        os << '\n';
    }
    os.precision(old_precision);
}

std::uint64_t boson_dimension(int N, int m) {
    if (N < 1 || m < 0) {
        throw std::invalid_argument("boson_dimension: N >= 1 and m >= 0 required");
    }
    return binom_u64(N + m - 1, m);
}

} // namespace qsf
