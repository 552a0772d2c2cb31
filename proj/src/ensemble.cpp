// Copyright 2026 The qsf Authors
// SPDX-License-Identifier: Apache-2.0

#include "qsf/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace qsf {

void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn) {
    const unsigned n = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    if (n == 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> threads;
    threads.reserve(n);
    for (unsigned w = 0; w < n; ++w) {
        threads.emplace_back([&] {
            while (!stop.load()) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) {
                    break;
                }
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) {
                        error = std::current_exception();
                    }
                    stop.store(true);
                }
            }
        });
    }
    for (auto& t : threads) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

MemberFactory::MemberFactory(const SystemParams& p, std::size_t cap)
    : p_(p), basis_t_((p.validate(), p.N), p.t, cap), basis_k_(p.N, p.k, cap), basis_m_(p.N, p.m, cap) {}

MemberOperators MemberFactory::build(std::uint64_t seed, std::size_t member) const {
    const GoeSample g0 = sample_goe(static_cast<int>(basis_t_.size()), {seed, member, OperatorTag::h0});
    const GoeSample gv = sample_goe(static_cast<int>(basis_k_.size()), {seed, member, OperatorTag::v});
    return {embed_k_body(g0, basis_t_, basis_m_), embed_k_body(gv, basis_k_, basis_m_)};
}

namespace {

struct MemberPartial {
    std::optional<MemberMoments> moments;
    std::optional<StrengthAccumulator> strength;
    std::optional<ChaosAccumulator> chaos;
    std::optional<MemberFailure> failure;
};

SpectralScale ensemble_scale(const MemberFactory& factory, const SimulationConfig& cfg) {
    std::vector<std::array<double, 4>> stats(cfg.members);
    parallel_for(cfg.members, cfg.workers, [&](std::size_t i) {
        const std::size_t member = cfg.first_member + i;
        const MemberOperators ops = factory.build(cfg.seed, member);
        const Eigen::MatrixXd h = compose_hamiltonian(ops.h0, ops.v, cfg.system.lambda);
        const double d = static_cast<double>(h.rows());
        const double c0 = ops.h0.matrix.trace() / d;
        const double c1 = h.trace() / d;
        stats[i] = {c0, ops.h0.matrix.squaredNorm() / d - c0 * c0, c1, h.squaredNorm() / d - c1 * c1};
    });
    CompensatedSum c0;
    CompensatedSum c1;
    for (const auto& s : stats) {
        c0.add(s[0]);
        c1.add(s[2]);
    }
    const double n = static_cast<double>(stats.size());
    SpectralScale scale;
    scale.centroid_h0 = c0.value() / n;
    scale.centroid_h = c1.value() / n;
    CompensatedSum v0;
    CompensatedSum v1;
    for (const auto& s : stats) {
        v0.add(s[1] + (s[0] - scale.centroid_h0) * (s[0] - scale.centroid_h0));
        v1.add(s[3] + (s[2] - scale.centroid_h) * (s[2] - scale.centroid_h));
    }
    scale.width_h0 = std::sqrt(v0.value() / n);
    scale.width_h = std::sqrt(v1.value() / n);
    return scale;
}

} // namespace

SimulationResult run_simulation(const SimulationConfig& cfg, std::ostream* log) {
    cfg.system.validate();
    if (cfg.members < 1) {
        throw std::invalid_argument("members must be at least 1");
    }
    const MemberFactory factory(cfg.system, cfg.dimension_cap);

    SimulationResult result;
    result.dimension = factory.dimension();
    result.strength = StrengthAccumulator(cfg.windows, cfg.grid);
    result.chaos = ChaosAccumulator(cfg.grid);
    if (cfg.spectra && cfg.convention == Standardization::ensemble) {
        result.ensemble_scale = ensemble_scale(factory, cfg);
    }

    std::vector<MemberPartial> partials(cfg.members);
    parallel_for(cfg.members, cfg.workers, [&](std::size_t i) {
        const std::size_t member = cfg.first_member + i;
        MemberOperators ops = factory.build(cfg.seed, member);
        const Eigen::MatrixXd h = compose_hamiltonian(ops.h0, ops.v, cfg.system.lambda);
        MemberPartial& part = partials[i];
        if (!cfg.spectra) {
            part.moments = member_bivariate_moments(ops.h0.matrix, h);
            return;
        }
        try {
            const SpectralResult sr = analyze_member(ops.h0.matrix, h, member, cfg.verify);
            const StandardizedSpectra st = standardize_spectra(sr, cfg.convention, result.ensemble_scale);
            part.moments = member_bivariate_moments(ops.h0.matrix, h);
            part.strength.emplace(cfg.windows, cfg.grid);
            part.strength->add_member(st.h0.values, st.h.values, sr.overlap_sq);
            part.chaos.emplace(cfg.grid);
            part.chaos->add_member(st.h.values, sr.overlap_sq);
        } catch (const DiagonalizationError& e) {
            part.failure = MemberFailure{member, cfg.seed, e.what()};
        }
    });

    for (auto& part : partials) {
        if (part.failure) {
            if (log != nullptr) {
                *log << "member " << part.failure->member << " (seed " << part.failure->seed
                     << ") skipped: " << part.failure->reason << '\n';
            }
            result.failures.push_back(*part.failure);
            continue;
        }
        result.moments.push_back(*part.moments);
        if (part.strength) {
            result.strength.merge(*part.strength);
            result.chaos.merge(*part.chaos);
        }
    }
    const double limit = cfg.max_failure_fraction * static_cast<double>(cfg.members);
    if (static_cast<double>(result.failures.size()) > limit) {
        throw std::runtime_error(std::to_string(result.failures.size()) + " of " +
                                 std::to_string(cfg.members) + " members failed to diagonalize");
    }
    return result;
}

SimulationResult merge(const SimulationResult& a, const SimulationResult& b) {
    if (a.dimension != b.dimension) {
        throw std::invalid_argument("merge: runs have different dimensions");
    }
    SimulationResult out = a;
    out.strength.merge(b.strength);
    out.chaos.merge(b.chaos);
    out.moments.insert(out.moments.end(), b.moments.begin(), b.moments.end());
    out.failures.insert(out.failures.end(), b.failures.begin(), b.failures.end());
    return out;
}

std::vector<double> operator_fourth_moments(int N, int m, int r, std::size_t members, std::uint64_t seed,
                                            unsigned workers) {
    const FockBasis basis_r(N, r);
    const FockBasis basis_m(N, m);
    std::vector<double> out(members);
    parallel_for(members, workers, [&](std::size_t i) {
        const GoeSample g = sample_goe(static_cast<int>(basis_r.size()), {seed, i, OperatorTag::v});
        out[i] = reduced_fourth_moment(embed_k_body(g, basis_r, basis_m).matrix);
    });
    return out;
}

} // namespace qsf
