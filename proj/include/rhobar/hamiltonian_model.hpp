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

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "rhobar/complex_matrix.hpp"
#include "rhobar/correlation_kernel.hpp"
#include "rhobar/gaussian_process.hpp"
#include "rhobar/hermitian_eig.hpp"

namespace rhobar {

// Complex correlation function of the factorized form
//   K(t, t') = amplitude * base(|t - t'|) * e^{i lag_freq (t - t')} * e^{i abs_freq t}
// lag_freq covers modulated stationary correlations (a carrier riding on a
// real kernel); abs_freq covers the explicitly non-stationary
// pseudo-correlations that appear when a complex coupling is built from a
// real field, as in the driven-ion model.
struct ModulatedKernel {
    cplx amplitude{0.0, 0.0};
    CorrelationKernel base = CorrelationKernel::exponential(0.0, 1.0);
    double lag_freq = 0.0;
    double abs_freq = 0.0;

    static ModulatedKernel zero() { return ModulatedKernel{}; }

    static ModulatedKernel of(cplx amplitude, CorrelationKernel base, double lag_freq = 0.0,
                              double abs_freq = 0.0) {
        return ModulatedKernel{amplitude, std::move(base), lag_freq, abs_freq};
    }

    bool is_zero() const { return amplitude == cplx(0.0, 0.0); }

    // int_{t0}^{t} K(t, t') dt', exact via the base kernel's closed forms
    cplx lag_integral(double t, double t0) const {
        if (is_zero()) return {0.0, 0.0};
        const auto [c, s] = base.modulated_integrals(lag_freq, t, t0);
        cplx value = amplitude * cplx(c, s);
        if (abs_freq != 0.0) value *= std::exp(cplx(0.0, abs_freq * t));
        return value;
    }
};

// H(t) = hbar a(t) h with a real scalar Gaussian process a(t) and fixed
// Hermitian h (stated in angular-frequency units throughout).
struct SingleRealModel {
    ComplexMatrix op;
    GaussianProcessSpec process;
};

// H constant in time but random: H = hbar sum_n (a_n h_n + a_n* h_n†) with
// circular complex Gaussian amplitudes of covariance gamma_kl = <a_k a_l*>.
struct TimeIndependentModel {
    std::vector<ComplexMatrix> ops;
    ComplexMatrix covariance;
};

// H(t) = hbar sum_n (a_n(t) h_n + a_n*(t) h_n†). cross[k][l] is
// <a_k(t) a_l*(t')>. pseudo[k][l], when present, is <a_k(t) a_l(t')>; it
// vanishes identically for circular processes but not for couplings
// derived from a common real field.
struct MultiComplexModel {
    std::vector<ComplexMatrix> ops;
    std::vector<std::vector<ModulatedKernel>> cross;
    std::vector<std::vector<ModulatedKernel>> pseudo;  // may be empty
};

// Harmonic mode driven by a fluctuating classical field in the rotating
// frame of the oscillator. coupling carries the squared field scale (it is
// the coefficient of the short-time t^2 depopulation law); field_kernel is
// the field autocorrelation shape it multiplies.
struct IonModel {
    double omega0 = 1.0;
    double coupling = 0.0;
    CorrelationKernel field_kernel = CorrelationKernel::exponential(1.0, 1.0);
    std::size_t n_fock = 5;
};

using StochasticHamiltonianModel =
    std::variant<SingleRealModel, TimeIndependentModel, MultiComplexModel, IonModel>;

namespace detail {

inline void require_hermitian_op(const ComplexMatrix& op, const char* who) {
    op.require_square(who);
    if (op.hermiticity_error() > 1e-10 * std::max(1.0, op.max_abs()))
        throw std::invalid_argument(std::string(who) + ": operator must be Hermitian");
}

inline void require_op_family(const std::vector<ComplexMatrix>& ops, const char* who) {
    if (ops.empty())
        throw std::invalid_argument(std::string(who) + ": needs at least one operator");
    const std::size_t d = ops.front().rows();
    for (const auto& op : ops) {
        op.require_square(who);
        if (op.rows() != d)
            throw std::invalid_argument(std::string(who) + ": operators have mixed dimensions");
    }
}

}  // namespace detail

inline void validate_model(const SingleRealModel& m) {
    detail::require_hermitian_op(m.op, "SingleRealModel");
    if (m.process.valence != GaussianProcessSpec::Valence::real)
        throw std::invalid_argument("SingleRealModel: process must be real valued");
}

inline void validate_model(const TimeIndependentModel& m) {
    detail::require_op_family(m.ops, "TimeIndependentModel");
    const std::size_t n = m.ops.size();
    if (m.covariance.rows() != n || m.covariance.cols() != n)
        throw std::invalid_argument("TimeIndependentModel: covariance must be "
            + std::to_string(n) + "x" + std::to_string(n));
    const double scale = std::max(1.0, m.covariance.max_abs());
    if (m.covariance.hermiticity_error() > 1e-10 * scale)
        throw std::invalid_argument("TimeIndependentModel: covariance must be Hermitian");
    if (min_eigenvalue(m.covariance) < -1e-10 * scale)
        throw std::invalid_argument("TimeIndependentModel: covariance must be positive semidefinite");
}

inline void validate_model(const MultiComplexModel& m) {
    detail::require_op_family(m.ops, "MultiComplexModel");
    const std::size_t n = m.ops.size();
    if (m.cross.size() != n)
        throw std::invalid_argument("MultiComplexModel: cross-kernel table must have one row per process");
    for (const auto& row : m.cross)
        if (row.size() != n)
            throw std::invalid_argument("MultiComplexModel: cross-kernel table must be square");
    if (!m.pseudo.empty()) {
        if (m.pseudo.size() != n)
            throw std::invalid_argument("MultiComplexModel: pseudo-kernel table must have one row per process");
        for (const auto& row : m.pseudo)
            if (row.size() != n)
                throw std::invalid_argument("MultiComplexModel: pseudo-kernel table must be square");
    }
}

inline void validate_model(const IonModel& m) {
    if (!(m.omega0 > 0.0))
        throw std::invalid_argument("IonModel: omega0 must be > 0");
    if (!(m.coupling >= 0.0))
        throw std::invalid_argument("IonModel: coupling must be >= 0");
    if (m.n_fock < 2)
        throw std::invalid_argument("IonModel: need at least 2 oscillator levels");
}

inline void validate_model(const StochasticHamiltonianModel& m) {
    std::visit([](const auto& inner) { validate_model(inner); }, m);
}

inline std::size_t model_dimension(const StochasticHamiltonianModel& m) {
    struct Visitor {
        std::size_t operator()(const SingleRealModel& s) const { return s.op.rows(); }
        std::size_t operator()(const TimeIndependentModel& s) const { return s.ops.front().rows(); }
        std::size_t operator()(const MultiComplexModel& s) const { return s.ops.front().rows(); }
        std::size_t operator()(const IonModel& s) const { return s.n_fock; }
    };
    return std::visit(Visitor{}, m);
}

}  // namespace rhobar
