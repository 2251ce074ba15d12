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

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rhobar/complex_matrix.hpp"
#include "rhobar/gaussian_process.hpp"
#include "rhobar/hamiltonian_model.hpp"
#include "rhobar/hermitian_eig.hpp"

namespace rhobar {

// Closed-form ensemble average for a coupling operator that commutes with
// itself at all times. In the operator's eigenbasis every matrix element
// evolves independently:
//
//   rho_kl(t) = rho_kl(t0) * exp(-i (E_k - E_l) E[v] - (E_k - E_l)^2 Var[v] / 2)
//
// where v(t) is the integral of the scalar process from t0 to t. For a
// Gaussian process this is exact to all orders, which is what makes it a
// trustworthy reference for the integrator.
struct DephasingSolution {
    std::vector<double> energies;
    double t0 = 0.0;
    std::function<double(double)> mean_v;
    std::function<double(double)> var_v;

    // Elementwise damping/phase factors. As a matrix this is a Gram matrix
    // of the random phases exp(-i E_k v), hence positive semidefinite.
    ComplexMatrix multiplier(double t) const {
        require_ready();
        const std::size_t d = energies.size();
        const double mv = mean_v(t);
        const double vv = std::max(0.0, var_v(t));
        ComplexMatrix m(d, d);
        for (std::size_t k = 0; k < d; ++k)
            for (std::size_t l = 0; l < d; ++l) {
                const double de = energies[k] - energies[l];
                m(k, l) = std::exp(cplx(-0.5 * de * de * vv, -de * mv));
            }
        return m;
    }

    ComplexMatrix evolve(const ComplexMatrix& rho0, double t) const {
        require_ready();
        rho0.require_square("DephasingSolution::evolve");
        if (rho0.rows() != energies.size())
            throw std::invalid_argument("DephasingSolution::evolve: state dimension " +
                                        std::to_string(rho0.rows()) + " != " +
                                        std::to_string(energies.size()));
        const ComplexMatrix m = multiplier(t);
        ComplexMatrix out = rho0;
        for (std::size_t k = 0; k < rho0.rows(); ++k)
            for (std::size_t l = 0; l < rho0.cols(); ++l) out(k, l) *= m(k, l);
        return out;
    }

private:
    void require_ready() const {
        if (energies.empty() || !mean_v || !var_v)
            throw std::logic_error("DephasingSolution: energies/mean_v/var_v not set");
    }
};

inline DephasingSolution dephasing_solution(std::vector<double> energies,
                                            const GaussianProcessSpec& process, double t0) {
    if (process.valence != GaussianProcessSpec::Valence::real)
        throw std::invalid_argument("dephasing_solution: needs a real scalar process");
    DephasingSolution sol;
    sol.energies = std::move(energies);
    sol.t0 = t0;
    const MeanFunction mean = process.mean;
    const CorrelationKernel kernel = process.kernel;
    sol.mean_v = [mean, t0](double t) { return mean.integral(t0, t); };
    sol.var_v = [kernel, t0](double t) { return kernel.integral_variance(t, t0); };
    return sol;
}

// Same solution for an arbitrary Hermitian coupling operator, obtained by
// sandwiching the dephasing core between the operator's eigenbasis.
struct SingleRealSolution {
    DephasingSolution core;
    ComplexMatrix basis;      // columns: eigenvectors of the coupling operator
    ComplexMatrix basis_dag;

    ComplexMatrix evolve(const ComplexMatrix& rho0, double t) const {
        const ComplexMatrix in_eigen = basis_dag * rho0 * basis;
        return basis * core.evolve(in_eigen, t) * basis_dag;
    }
};

inline SingleRealSolution exact_single_real(const SingleRealModel& model, double t0) {
    validate_model(model);
    const HermitianEig eig = hermitian_eigensystem(model.op);
    SingleRealSolution sol;
    sol.core = dephasing_solution(eig.values, model.process, t0);
    sol.basis = eig.vectors;
    sol.basis_dag = eig.vectors.adjoint();
    return sol;
}

// Two atoms dephased by one shared white-noise field coupled to the total
// inversion Z1 + Z2 (eigenvalues 2, 0, 0, -2 in the product basis). The
// strength gamma/8 makes the outer coherences of a Bell state decay as
// exp(-gamma dt), which fixes the unit of gamma used by the scenario files.
inline DephasingSolution two_atom_collective_solution(double gamma, double t0 = 0.0) {
    if (!(gamma >= 0.0))
        throw std::invalid_argument("two_atom_collective_solution: gamma must be >= 0");
    return dephasing_solution({2.0, 0.0, 0.0, -2.0},
                              GaussianProcessSpec::real_process(
                                  CorrelationKernel::white(gamma / 8.0)),
                              t0);
}

inline double bell_corner_magnitude(double gamma, double dt) {
    return 0.5 * std::exp(-gamma * dt);
}

inline double bell_concurrence(double gamma, double dt) { return std::exp(-gamma * dt); }

// Short-time depopulation of the oscillator ground state under the driven
// ion model: 1 - rho_00(t0 + dt) -> coupling * K(0) * dt^2 as dt -> 0.
inline double ion_short_time_depopulation(const IonModel& model, double dt) {
    return model.coupling * model.field_kernel.eval(0.0, 0.0) * dt * dt;
}

// Long-time ground-state heating rate 1/tau1 for an exponential field
// kernel: twice the stationary in-phase rate.
inline double ion_heating_rate(const IonModel& model) {
    if (model.field_kernel.kind() != CorrelationKernel::Kind::exponential)
        throw std::invalid_argument("ion_heating_rate: needs an exponential field kernel");
    const double T = model.field_kernel.corr_time();
    const double s2 = model.field_kernel.variance();
    const double wT = model.omega0 * T;
    return 2.0 * model.coupling * s2 * T / (1.0 + wT * wT);
}

inline double ion_heating_time(const IonModel& model) { return 1.0 / ion_heating_rate(model); }

}  // namespace rhobar
