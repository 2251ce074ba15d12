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
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "rhobar/complex_matrix.hpp"
#include "rhobar/generators.hpp"
#include "rhobar/hamiltonian_model.hpp"
#include "rhobar/hermitian_eig.hpp"
#include "rhobar/matrix_exp.hpp"

namespace rhobar {

// Uniform output grid. The integrator may subdivide each interval further;
// these are the times at which states are recorded.
struct TimeGrid {
    double t0 = 0.0;
    double t_end = 1.0;
    std::size_t n_steps = 100;

    static TimeGrid of(double t0, double t_end, std::size_t n_steps) {
        if (!(t_end > t0))
            throw std::invalid_argument("TimeGrid: need t_end > t0, got [" +
                                        std::to_string(t0) + ", " + std::to_string(t_end) + "]");
        if (n_steps == 0) throw std::invalid_argument("TimeGrid: n_steps must be >= 1");
        return TimeGrid{t0, t_end, n_steps};
    }

    std::vector<double> times() const {
        std::vector<double> out(n_steps + 1);
        const double h = (t_end - t0) / static_cast<double>(n_steps);
        for (std::size_t k = 0; k <= n_steps; ++k) out[k] = t0 + h * static_cast<double>(k);
        out[n_steps] = t_end;
        return out;
    }
};

struct EvolveOptions {
    std::size_t substeps = 0;      // per grid interval; 0 selects automatically
    double trace_tol = 1e-9;       // allowed drift of tr(rho) from its initial value
    double hermiticity_tol = 1e-10;
    double abort_factor = 100.0;   // throw once drift exceeds abort_factor * tol
    bool check_invariants = true;
};

// Trace and Hermiticity are conserved by the flow, so their drift measures
// integration error and is checked hard. Positivity is not: the averaged
// equation is not guaranteed to be completely positive at finite coupling,
// and transient negative rates are part of the physics, so the lowest
// eigenvalue seen is reported but never triggers an abort.
struct EvolutionResult {
    std::vector<double> times;
    std::vector<ComplexMatrix> states;
    double max_trace_drift = 0.0;
    double max_hermiticity_error = 0.0;
    double min_eigenvalue = 0.0;
    std::size_t substeps_used = 1;
};

namespace detail {

inline double generator_scale(const GeneratorEvaluation& gen) {
    double s = one_norm(gen.h_eff);
    for (const auto& term : gen.dissipators) {
        const double c = std::abs(term.coefficient);
        if (c == 0.0) continue;
        s += c * (2.0 * one_norm(term.left) * one_norm(term.right) +
                  2.0 * one_norm(term.right_left));
    }
    return s;
}

inline double kernel_timescale(const CorrelationKernel& k) {
    switch (k.kind()) {
        case CorrelationKernel::Kind::exponential:
            return k.corr_time();
        case CorrelationKernel::Kind::white:
            return std::numeric_limits<double>::infinity();
        case CorrelationKernel::Kind::tabulated:
            return k.last_lag();
    }
    return std::numeric_limits<double>::infinity();
}

inline double modulated_timescale(const ModulatedKernel& mk) {
    if (mk.is_zero()) return std::numeric_limits<double>::infinity();
    double s = kernel_timescale(mk.base);
    if (mk.lag_freq != 0.0) s = std::min(s, 1.0 / std::abs(mk.lag_freq));
    if (mk.abs_freq != 0.0) s = std::min(s, 1.0 / std::abs(mk.abs_freq));
    return s;
}

// Shortest timescale over which the generator itself varies. Infinite for
// generators whose rates change smoothly on the scale of the whole run.
struct TimescaleVisitor {
    double operator()(const SingleRealModel& m) const { return kernel_timescale(m.process.kernel); }
    double operator()(const TimeIndependentModel&) const {
        return std::numeric_limits<double>::infinity();
    }
    double operator()(const MultiComplexModel& m) const {
        double s = std::numeric_limits<double>::infinity();
        for (const auto& row : m.cross)
            for (const auto& mk : row) s = std::min(s, modulated_timescale(mk));
        for (const auto& row : m.pseudo)
            for (const auto& mk : row) s = std::min(s, modulated_timescale(mk));
        return s;
    }
    double operator()(const IonModel& m) const {
        return std::min(kernel_timescale(m.field_kernel), 1.0 / m.omega0);
    }
};

inline std::size_t auto_substeps(const StochasticHamiltonianModel& model, const TimeGrid& grid) {
    const double H = (grid.t_end - grid.t0) / static_cast<double>(grid.n_steps);

    // Sample the generator magnitude away from t0 (where memory integrals
    // vanish) and at the end of the run, where they are largest for
    // monotone kernels.
    double scale = 0.0;
    for (double t : {grid.t0 + H, 0.5 * (grid.t0 + grid.t_end), grid.t_end}) {
        if (t <= grid.t0) continue;
        scale = std::max(scale, generator_scale(eval_generator(model, t, grid.t0)));
    }

    double h_max = std::numeric_limits<double>::infinity();
    if (scale > 0.0) h_max = 0.02 / scale;
    const double osc = std::visit(TimescaleVisitor{}, model);
    if (std::isfinite(osc)) h_max = std::min(h_max, osc / 50.0);

    if (!std::isfinite(h_max) || h_max >= H) return 1;
    const double n = std::ceil(H / h_max);
    return static_cast<std::size_t>(std::min(n, 200000.0));
}

}  // namespace detail

// Classic fourth-order Runge-Kutta on the output grid, each interval split
// into a fixed number of substeps. The generator at a substep endpoint is
// reused as the start generator of the next, so each substep costs two
// fresh generator evaluations. No renormalization of any kind is applied
// to the state between steps.
inline EvolutionResult evolve_master_equation(const StochasticHamiltonianModel& model,
                                              const ComplexMatrix& rho0, const TimeGrid& grid,
                                              const EvolveOptions& options = {}) {
    validate_model(model);
    rho0.require_square("evolve_master_equation");
    if (rho0.rows() != model_dimension(model))
        throw std::invalid_argument("evolve_master_equation: state dimension " +
                                    std::to_string(rho0.rows()) + " does not match model dimension " +
                                    std::to_string(model_dimension(model)));
    if (!rho0.all_finite())
        throw std::invalid_argument("evolve_master_equation: initial state has non-finite entries");

    const std::size_t substeps =
        options.substeps > 0 ? options.substeps : detail::auto_substeps(model, grid);

    EvolutionResult result;
    result.substeps_used = substeps;
    result.times = grid.times();
    result.states.reserve(grid.n_steps + 1);
    result.states.push_back(rho0);

    const double trace0 = rho0.trace().real();
    result.max_hermiticity_error = rho0.hermiticity_error();
    result.min_eigenvalue =
        options.check_invariants ? min_eigenvalue(0.5 * (rho0 + rho0.adjoint())) : 0.0;

    ComplexMatrix rho = rho0;
    GeneratorEvaluation gen_start = eval_generator(model, grid.t0, grid.t0);

    for (std::size_t k = 0; k < grid.n_steps; ++k) {
        const double ta = result.times[k];
        const double tb = result.times[k + 1];
        const double h = (tb - ta) / static_cast<double>(substeps);
        for (std::size_t j = 0; j < substeps; ++j) {
            const double s = ta + h * static_cast<double>(j);
            const double s_end = (j + 1 == substeps) ? tb : s + h;
            GeneratorEvaluation gen_mid = eval_generator(model, 0.5 * (s + s_end), grid.t0);
            GeneratorEvaluation gen_end = eval_generator(model, s_end, grid.t0);

            const ComplexMatrix k1 = gen_start.apply(rho);
            const ComplexMatrix k2 = gen_mid.apply(rho + (0.5 * h) * k1);
            const ComplexMatrix k3 = gen_mid.apply(rho + (0.5 * h) * k2);
            const ComplexMatrix k4 = gen_end.apply(rho + h * k3);

            ComplexMatrix incr = k1;
            incr += 2.0 * k2;
            incr += 2.0 * k3;
            incr += k4;
            rho += (h / 6.0) * incr;
            gen_start = std::move(gen_end);
        }

        if (!rho.all_finite())
            throw std::runtime_error("evolve_master_equation: state became non-finite at t = " +
                                     std::to_string(tb));
        if (options.check_invariants) {
            const double trace_drift = std::abs(rho.trace().real() - trace0) +
                                       std::abs(rho.trace().imag());
            const double herm = rho.hermiticity_error();
            result.max_trace_drift = std::max(result.max_trace_drift, trace_drift);
            result.max_hermiticity_error = std::max(result.max_hermiticity_error, herm);
            if (trace_drift > options.abort_factor * options.trace_tol)
                throw std::runtime_error("evolve_master_equation: trace drift " +
                                         std::to_string(trace_drift) + " at t = " +
                                         std::to_string(tb) + " exceeds abort threshold");
            if (herm > options.abort_factor * options.hermiticity_tol)
                throw std::runtime_error("evolve_master_equation: hermiticity error " +
                                         std::to_string(herm) + " at t = " + std::to_string(tb) +
                                         " exceeds abort threshold");
            result.min_eigenvalue = std::min(
                result.min_eigenvalue, min_eigenvalue(0.5 * (rho + rho.adjoint())));
        }
        result.states.push_back(rho);
    }
    return result;
}

}  // namespace rhobar
