// Copyright 2026 The rhobar authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "rhobar/complex_matrix.hpp"
#include "rhobar/density_matrix.hpp"
#include "rhobar/evolve.hpp"
#include "rhobar/gaussian_process.hpp"
#include "rhobar/hamiltonian_model.hpp"
#include "rhobar/hermitian_eig.hpp"
#include "rhobar/matrix_exp.hpp"
#include "rhobar/rng.hpp"

namespace rhobar {

namespace detail {

// Eigen-decomposition with a fast path for operators that are already
// diagonal, where the basis change would only shuffle rows for nothing.
struct CommutingFrame {
    std::vector<double> energies;
    bool identity_basis = true;
    ComplexMatrix basis;
    ComplexMatrix basis_dag;

    static CommutingFrame of(const ComplexMatrix& h) {
        h.require_square("CommutingFrame");
        const double scale = std::max(1.0, h.max_abs());
        if (h.hermiticity_error() > 1e-10 * scale)
            throw std::invalid_argument("propagate_commuting: operator is not Hermitian");
        CommutingFrame f;
        const std::size_t d = h.rows();
        bool diagonal = true;
        for (std::size_t i = 0; i < d && diagonal; ++i)
            for (std::size_t j = 0; j < d; ++j)
                if (i != j && h(i, j) != cplx(0.0, 0.0)) {
                    diagonal = false;
                    break;
                }
        if (diagonal) {
            f.energies.resize(d);
            for (std::size_t i = 0; i < d; ++i) f.energies[i] = h(i, i).real();
        } else {
            HermitianEig eig = hermitian_eigensystem(h);
            f.identity_basis = false;
            f.energies = std::move(eig.values);
            f.basis = eig.vectors;
            f.basis_dag = f.basis.adjoint();
        }
        return f;
    }

    ComplexMatrix to_frame(const ComplexMatrix& rho) const {
        return identity_basis ? rho : basis_dag * rho * basis;
    }

    // Applies the exact phase map for accumulated phase v to a state
    // already expressed in the eigenbasis, then maps back.
    ComplexMatrix propagate(const ComplexMatrix& rho_frame, double v,
                            std::vector<cplx>& phase_scratch) const {
        const std::size_t d = energies.size();
        phase_scratch.resize(d);
        for (std::size_t i = 0; i < d; ++i)
            phase_scratch[i] = std::exp(cplx(0.0, -energies[i] * v));
        ComplexMatrix out(d, d);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                out(i, j) = phase_scratch[i] * std::conj(phase_scratch[j]) * rho_frame(i, j);
        return identity_basis ? out : basis * out * basis_dag;
    }
};

}  // namespace detail

// One realization of a model whose Hamiltonian commutes with itself at all
// times: the propagator is a pure phase map driven by the accumulated
// integral v(t) of the scalar amplitude, so the only discretization error
// is whatever went into v itself.
inline std::vector<ComplexMatrix> propagate_commuting(const ComplexMatrix& h,
                                                      const ProcessPath& path,
                                                      const ComplexMatrix& rho0) {
    const detail::CommutingFrame frame = detail::CommutingFrame::of(h);
    rho0.require_square("propagate_commuting");
    if (rho0.rows() != h.rows())
        throw std::invalid_argument("propagate_commuting: state/operator dimension mismatch");
    if (path.times.size() != path.running_integral.size() || path.times.empty())
        throw std::invalid_argument("propagate_commuting: malformed path");

    const ComplexMatrix rho_frame = frame.to_frame(rho0);
    std::vector<cplx> scratch;
    std::vector<ComplexMatrix> out;
    out.reserve(path.times.size());
    for (double v : path.running_integral) out.push_back(frame.propagate(rho_frame, v, scratch));
    return out;
}

// One realization propagated step by step with midpoint exponentials,
// U <- exp(-i H_mid dt) U. The midpoint amplitude is the average of the
// endpoint samples, which makes the accumulated phase of a commuting model
// exactly the trapezoid running integral of the path: matched paths give
// matched answers between this route and propagate_commuting.
inline std::vector<ComplexMatrix> propagate_general(const SingleRealModel& model,
                                                    const ProcessPath& path,
                                                    const ComplexMatrix& rho0) {
    validate_model(model);
    if (!path.pointwise_defined)
        throw std::invalid_argument(
            "propagate_general: path has no pointwise samples (white noise routes through "
            "propagate_commuting)");
    if (path.times.size() != path.values.size() || path.times.size() < 2)
        throw std::invalid_argument("propagate_general: malformed path");
    rho0.require_square("propagate_general");
    if (rho0.rows() != model.op.rows())
        throw std::invalid_argument("propagate_general: state/operator dimension mismatch");

    const HermitianEig eig = hermitian_eigensystem(model.op);
    const ComplexMatrix vdag = eig.vectors.adjoint();
    const std::size_t d = model.op.rows();

    ComplexMatrix u = ComplexMatrix::identity(d);
    std::vector<ComplexMatrix> out;
    out.reserve(path.times.size());
    out.push_back(rho0);
    for (std::size_t j = 0; j + 1 < path.times.size(); ++j) {
        const double dt = path.times[j + 1] - path.times[j];
        const double theta = 0.5 * (path.values[j] + path.values[j + 1]) * dt;
        ComplexMatrix step(d, d);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t k = 0; k < d; ++k) {
                cplx acc(0.0, 0.0);
                for (std::size_t m = 0; m < d; ++m)
                    acc += eig.vectors(i, m) * std::exp(cplx(0.0, -eig.values[m] * theta)) *
                           vdag(m, k);
                step(i, k) = acc;
            }
        u = step * u;
        out.push_back(u * rho0 * u.adjoint());
    }
    const double drift = max_abs_diff(u.adjoint() * u, ComplexMatrix::identity(d));
    if (drift > 1e-10)
        throw std::runtime_error("propagate_general: unitarity drift " + std::to_string(drift) +
                                 " exceeds 1e-10 (grid too coarse)");
    return out;
}

// Ion realization: the sampled complex drive u(t) enters as
// H(t) = i u(t) a_dag - i u(t)* a on the truncated oscillator.
inline std::vector<ComplexMatrix> propagate_general(const IonModel& model,
                                                    const ComplexProcessPath& drive,
                                                    const ComplexMatrix& rho0) {
    validate_model(model);
    if (drive.times.size() != drive.values.size() || drive.times.size() < 2)
        throw std::invalid_argument("propagate_general: malformed drive path");
    rho0.require_square("propagate_general");
    if (rho0.rows() != model.n_fock)
        throw std::invalid_argument("propagate_general: state dimension != n_fock");

    const auto [a, adag] = fock_ladder(model.n_fock);
    const std::size_t d = model.n_fock;

    ComplexMatrix u = ComplexMatrix::identity(d);
    std::vector<ComplexMatrix> out;
    out.reserve(drive.times.size());
    out.push_back(rho0);
    for (std::size_t j = 0; j + 1 < drive.times.size(); ++j) {
        const double dt = drive.times[j + 1] - drive.times[j];
        const cplx um = 0.5 * (drive.values[j] + drive.values[j + 1]);
        ComplexMatrix h_mid = adag * (cplx(0.0, 1.0) * um);
        h_mid += a * (cplx(0.0, -1.0) * std::conj(um));
        u = matrix_exp(h_mid * cplx(0.0, -dt)) * u;
        out.push_back(u * rho0 * u.adjoint());
    }
    const double drift = max_abs_diff(u.adjoint() * u, ComplexMatrix::identity(d));
    if (drift > 1e-10)
        throw std::runtime_error("propagate_general: unitarity drift " + std::to_string(drift) +
                                 " exceeds 1e-10 (grid too coarse)");
    return out;
}

enum class McRoute { automatic, commuting, general };

struct EnsembleOptions {
    std::size_t n_trajectories = 10000;
    std::uint64_t seed = 1;
    std::size_t workers = 1;        // 0 picks hardware concurrency
    std::size_t path_substeps = 16; // per output interval, for sampled-path integrals
    std::size_t unitary_substeps = 0;  // per output interval on the general route; 0 = auto
    McRoute route = McRoute::automatic;
};

// Ensemble mean and, per matrix element, the standard errors of the real
// and imaginary parts (packed as the real/imag components of std_error's
// entries). Means of unitarily conjugated states stay exact density
// matrices up to rounding, so validation only leaves slack on positivity
// for statistical noise.
struct EnsembleResult {
    TimeGrid grid;
    std::vector<double> times;
    std::vector<DensityMatrix> mean_rho;
    std::vector<ComplexMatrix> std_error;
    std::size_t n_trajectories = 0;
    std::uint64_t seed = 0;
};

namespace detail {

struct BlockSums {
    std::vector<double> sum_re, sum_im, sq_re, sq_im;

    void init(std::size_t n) {
        sum_re.assign(n, 0.0);
        sum_im.assign(n, 0.0);
        sq_re.assign(n, 0.0);
        sq_im.assign(n, 0.0);
    }

    void accumulate(const std::vector<ComplexMatrix>& states) {
        std::size_t idx = 0;
        for (const auto& s : states)
            for (std::size_t i = 0; i < s.rows(); ++i)
                for (std::size_t j = 0; j < s.cols(); ++j, ++idx) {
                    const double re = s(i, j).real();
                    const double im = s(i, j).imag();
                    sum_re[idx] += re;
                    sum_im[idx] += im;
                    sq_re[idx] += re * re;
                    sq_im[idx] += im * im;
                }
    }

    void add(const BlockSums& o) {
        for (std::size_t i = 0; i < sum_re.size(); ++i) {
            sum_re[i] += o.sum_re[i];
            sum_im[i] += o.sum_im[i];
            sq_re[i] += o.sq_re[i];
            sq_im[i] += o.sq_im[i];
        }
    }
};

// Pairwise tree over the fixed-size trajectory blocks; the reduction order
// depends only on the block index, never on which worker produced a block.
inline BlockSums pairwise_reduce(std::vector<BlockSums>& blocks, std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) return std::move(blocks[lo]);
    const std::size_t mid = lo + (hi - lo) / 2;
    BlockSums left = pairwise_reduce(blocks, lo, mid);
    left.add(pairwise_reduce(blocks, mid, hi));
    return left;
}

inline std::vector<double> refine_times(const std::vector<double>& coarse, std::size_t substeps) {
    if (substeps <= 1) return coarse;
    std::vector<double> fine;
    fine.reserve((coarse.size() - 1) * substeps + 1);
    for (std::size_t k = 0; k + 1 < coarse.size(); ++k) {
        const double h = (coarse[k + 1] - coarse[k]) / static_cast<double>(substeps);
        for (std::size_t j = 0; j < substeps; ++j)
            fine.push_back(coarse[k] + h * static_cast<double>(j));
    }
    fine.push_back(coarse.back());
    return fine;
}

inline std::size_t general_substeps(double interval, double timescale, std::size_t requested) {
    if (requested > 0) return requested;
    const double h_max = timescale / 100.0;
    if (!(h_max > 0.0) || !std::isfinite(h_max)) return 1;
    return static_cast<std::size_t>(
        std::min(std::max(1.0, std::ceil(interval / h_max)), 100000.0));
}

}  // namespace detail

// Averages n_trajectories realizations on the output grid. Trajectory i is
// driven by its own counter-based stream (seed, i), i = 1..n, so the result
// is a pure function of (model, rho0, grid, options) no matter how many
// worker threads carve up the blocks.
inline EnsembleResult ensemble_average(const StochasticHamiltonianModel& model,
                                       const ComplexMatrix& rho0, const TimeGrid& grid,
                                       const EnsembleOptions& options) {
    validate_model(model);
    rho0.require_square("ensemble_average");
    if (rho0.rows() != model_dimension(model))
        throw std::invalid_argument("ensemble_average: state dimension does not match model");
    if (options.n_trajectories < 100)
        throw std::invalid_argument("ensemble_average: need at least 100 trajectories, got " +
                                    std::to_string(options.n_trajectories));

    const std::vector<double> out_times = grid.times();
    const std::size_t n_points = out_times.size();
    const std::size_t d = rho0.rows();

    // Per-trajectory generator of the state series on the output grid.
    std::function<void(std::uint64_t, std::vector<ComplexMatrix>&)> run_trajectory;

    McRoute route = options.route;
    if (route == McRoute::automatic)
        route = std::holds_alternative<SingleRealModel>(model) ? McRoute::commuting
                                                               : McRoute::general;

    if (route == McRoute::commuting) {
        const auto* single = std::get_if<SingleRealModel>(&model);
        if (!single)
            throw std::invalid_argument("ensemble_average: commuting route needs a single-process model");
        const SingleRealModel m = *single;
        const detail::CommutingFrame frame = detail::CommutingFrame::of(m.op);
        const ComplexMatrix rho_frame = frame.to_frame(rho0);
        const bool white = m.process.kernel.kind() == CorrelationKernel::Kind::white;
        const std::size_t sub = white ? 1 : std::max<std::size_t>(1, options.path_substeps);
        const std::vector<double> fine = detail::refine_times(out_times, sub);

        run_trajectory = [m, frame, rho_frame, fine, sub, n_points,
                          seed = options.seed](std::uint64_t index,
                                               std::vector<ComplexMatrix>& states) {
            CounterRng rng(seed, index);
            const ProcessPath path = sample_path(m.process, fine, rng);
            std::vector<cplx> scratch;
            states.clear();
            for (std::size_t k = 0; k < n_points; ++k)
                states.push_back(
                    frame.propagate(rho_frame, path.running_integral[k * sub], scratch));
        };
    } else {
        if (const auto* single = std::get_if<SingleRealModel>(&model)) {
            const SingleRealModel m = *single;
            if (m.process.kernel.kind() != CorrelationKernel::Kind::exponential)
                throw std::invalid_argument(
                    "ensemble_average: general route needs pointwise field samples");
            const double interval = (grid.t_end - grid.t0) / static_cast<double>(grid.n_steps);
            const std::size_t sub = detail::general_substeps(
                interval, m.process.kernel.corr_time(), options.unitary_substeps);
            const std::vector<double> fine = detail::refine_times(out_times, sub);

            run_trajectory = [m, rho0, fine, sub, n_points,
                              seed = options.seed](std::uint64_t index,
                                                   std::vector<ComplexMatrix>& states) {
                CounterRng rng(seed, index);
                const ProcessPath path = sample_path(m.process, fine, rng);
                const std::vector<ComplexMatrix> all = propagate_general(m, path, rho0);
                states.clear();
                for (std::size_t k = 0; k < n_points; ++k) states.push_back(all[k * sub]);
            };
        } else if (const auto* ion = std::get_if<IonModel>(&model)) {
            const IonModel m = *ion;
            const double timescale =
                std::min(detail::kernel_timescale(m.field_kernel), 1.0 / m.omega0);
            const double interval = (grid.t_end - grid.t0) / static_cast<double>(grid.n_steps);
            const std::size_t sub =
                detail::general_substeps(interval, timescale, options.unitary_substeps);
            const std::vector<double> fine = detail::refine_times(out_times, sub);
            const GaussianProcessSpec field =
                GaussianProcessSpec::real_process(m.field_kernel);
            const cplx amp = cplx(0.0, 1.0) * std::sqrt(m.coupling);

            // Same stepping as propagate_general, inlined so only the
            // output-grid snapshots are ever materialized.
            const auto ladder = fock_ladder(m.n_fock);
            run_trajectory = [m, field, amp, ladder, rho0, fine, sub, n_points,
                              seed = options.seed](std::uint64_t index,
                                                   std::vector<ComplexMatrix>& states) {
                CounterRng rng(seed, index);
                const ComplexProcessPath drive =
                    sample_modulated_real_path(field, amp, m.omega0, fine, rng);
                ComplexMatrix u = ComplexMatrix::identity(m.n_fock);
                states.clear();
                states.push_back(rho0);
                for (std::size_t j = 0; j + 1 < fine.size(); ++j) {
                    const double dt = fine[j + 1] - fine[j];
                    const cplx um = 0.5 * (drive.values[j] + drive.values[j + 1]);
                    ComplexMatrix h_mid = ladder.a_dag * (cplx(0.0, 1.0) * um);
                    h_mid += ladder.a * (cplx(0.0, -1.0) * std::conj(um));
                    u = matrix_exp(h_mid * cplx(0.0, -dt)) * u;
                    if ((j + 1) % sub == 0) states.push_back(u * rho0 * u.adjoint());
                }
                const double drift =
                    max_abs_diff(u.adjoint() * u, ComplexMatrix::identity(m.n_fock));
                if (drift > 1e-10)
                    throw std::runtime_error("ensemble_average: unitarity drift " +
                                             std::to_string(drift) + " exceeds 1e-10");
                if (states.size() != n_points)
                    throw std::logic_error("ensemble_average: snapshot bookkeeping error");
            };
        } else {
            throw std::invalid_argument(
                "ensemble_average: trajectory sampling is defined for single-process and ion "
                "models only");
        }
    }

    constexpr std::size_t kBlock = 64;
    const std::size_t n_traj = options.n_trajectories;
    const std::size_t n_blocks = (n_traj + kBlock - 1) / kBlock;
    std::vector<detail::BlockSums> blocks(n_blocks);

    std::size_t workers = options.workers;
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, n_blocks);

    auto run_block_range = [&](std::size_t first_block, std::size_t stride) {
        std::vector<ComplexMatrix> states;
        for (std::size_t b = first_block; b < n_blocks; b += stride) {
            blocks[b].init(n_points * d * d);
            const std::size_t lo = b * kBlock;
            const std::size_t hi = std::min(n_traj, lo + kBlock);
            for (std::size_t i = lo; i < hi; ++i) {
                run_trajectory(static_cast<std::uint64_t>(i + 1), states);
                blocks[b].accumulate(states);
            }
        }
    };

    if (workers <= 1) {
        run_block_range(0, 1);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> failures(workers);
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&, w]() {
                try {
                    run_block_range(w, workers);
                } catch (...) {
                    failures[w] = std::current_exception();
                }
            });
        for (auto& t : pool) t.join();
        for (const auto& f : failures)
            if (f) std::rethrow_exception(f);
    }

    const detail::BlockSums total = detail::pairwise_reduce(blocks, 0, n_blocks);

    EnsembleResult result;
    result.grid = grid;
    result.times = out_times;
    result.n_trajectories = n_traj;
    result.seed = options.seed;
    result.mean_rho.reserve(n_points);
    result.std_error.reserve(n_points);

    const double n = static_cast<double>(n_traj);
    std::size_t idx = 0;
    for (std::size_t k = 0; k < n_points; ++k) {
        ComplexMatrix mean(d, d);
        ComplexMatrix se(d, d);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j, ++idx) {
                const double mre = total.sum_re[idx] / n;
                const double mim = total.sum_im[idx] / n;
                mean(i, j) = cplx(mre, mim);
                const double var_re =
                    std::max(0.0, (total.sq_re[idx] - n * mre * mre) / (n - 1.0));
                const double var_im =
                    std::max(0.0, (total.sq_im[idx] - n * mim * mim) / (n - 1.0));
                se(i, j) = cplx(std::sqrt(var_re / n), std::sqrt(var_im / n));
            }
        result.mean_rho.emplace_back(std::move(mean), DensityTolerances::ensemble_mean());
        result.std_error.push_back(std::move(se));
    }
    return result;
}

// Element-by-element comparison of an ensemble mean against a reference
// solution on the same grid. Deviations are standardized by the statistical
// error plus a small absolute floor that covers components the sampler
// reproduces exactly (their standard error is zero).
struct DeviationSummary {
    double max_z = 0.0;
    double max_abs_deviation = 0.0;
    double se_at_max_deviation = 0.0;
    double frac_within_3 = 1.0;
    std::size_t n_parts = 0;

    bool all_within(double k) const { return max_z <= k; }
};

inline DeviationSummary compare_to_reference(const EnsembleResult& ensemble,
                                             const std::vector<ComplexMatrix>& reference,
                                             double se_floor = 1e-9) {
    if (reference.size() != ensemble.mean_rho.size())
        throw std::invalid_argument("compare_to_reference: grid size mismatch");
    DeviationSummary s;
    std::size_t within3 = 0;
    for (std::size_t k = 0; k < reference.size(); ++k) {
        const ComplexMatrix& mean = ensemble.mean_rho[k].matrix();
        const ComplexMatrix& se = ensemble.std_error[k];
        mean.require_same_shape(reference[k], "compare_to_reference");
        for (std::size_t i = 0; i < mean.rows(); ++i)
            for (std::size_t j = 0; j < mean.cols(); ++j) {
                const cplx delta = mean(i, j) - reference[k](i, j);
                const double z_re = std::abs(delta.real()) / (se(i, j).real() + se_floor);
                const double z_im = std::abs(delta.imag()) / (se(i, j).imag() + se_floor);
                s.max_z = std::max({s.max_z, z_re, z_im});
                if (std::abs(delta.real()) > s.max_abs_deviation) {
                    s.max_abs_deviation = std::abs(delta.real());
                    s.se_at_max_deviation = se(i, j).real();
                }
                if (std::abs(delta.imag()) > s.max_abs_deviation) {
                    s.max_abs_deviation = std::abs(delta.imag());
                    s.se_at_max_deviation = se(i, j).imag();
                }
                within3 += (z_re <= 3.0) + (z_im <= 3.0);
                s.n_parts += 2;
            }
    }
    s.frac_within_3 =
        s.n_parts == 0 ? 1.0 : static_cast<double>(within3) / static_cast<double>(s.n_parts);
    return s;
}

}  // namespace rhobar
