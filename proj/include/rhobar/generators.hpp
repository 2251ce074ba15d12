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
#include <stdexcept>
#include <vector>

#include "rhobar/complex_matrix.hpp"
#include "rhobar/hamiltonian_model.hpp"

namespace rhobar {

// One dissipator contribution in normal form,
//   coefficient * (2 L rho R - (R L) rho - rho (R L)).
// Each term is traceless for any rho by construction; Hermiticity of the
// total generator comes from how the builders pair the terms up.
struct DissipatorTerm {
    cplx coefficient{0.0, 0.0};
    ComplexMatrix left;
    ComplexMatrix right;
    ComplexMatrix right_left;  // cached R*L

    static DissipatorTerm of(cplx coefficient, ComplexMatrix left, ComplexMatrix right) {
        DissipatorTerm t;
        t.coefficient = coefficient;
        t.right_left = right * left;
        t.left = std::move(left);
        t.right = std::move(right);
        return t;
    }
};

// The right-hand side of the averaged master equation at one instant:
//   drho/dt = -i [h_eff, rho] + sum_j terms_j(rho)
// h_eff is Hermitian and stated in angular-frequency units (hbar folded in).
struct GeneratorEvaluation {
    ComplexMatrix h_eff;
    std::vector<DissipatorTerm> dissipators;

    ComplexMatrix apply(const ComplexMatrix& rho) const {
        rho.require_square("GeneratorEvaluation::apply");
        if (rho.rows() != h_eff.rows())
            throw std::invalid_argument("GeneratorEvaluation::apply: state dimension mismatch");
        ComplexMatrix out = cplx(0.0, -1.0) * commutator(h_eff, rho);
        for (const auto& term : dissipators) {
            if (term.coefficient == cplx(0.0, 0.0)) continue;
            ComplexMatrix contrib = (term.left * rho) * term.right;
            contrib *= 2.0;
            contrib -= term.right_left * rho;
            contrib -= rho * term.right_left;
            contrib *= term.coefficient;
            out += contrib;
        }
        return out;
    }
};

// Single real process: drho/dt = -i abar(t) [h, rho] + D(t) [h, [h, rho]]
// with D(t) = -int_{t0}^t K(t,t') dt' for the centered kernel; the mean
// rides along as a deterministic Hamiltonian.
inline GeneratorEvaluation generator_single_real(const SingleRealModel& model, double t,
                                                 double t0) {
    if (t < t0) throw std::invalid_argument("generator_single_real: t < t0");
    GeneratorEvaluation gen;
    const double abar = model.process.mean.eval(t);
    gen.h_eff = model.op * cplx(abar, 0.0);
    const double rate = model.process.kernel.time_integral(t, t0);  // -D(t)
    gen.dissipators.push_back(DissipatorTerm::of(cplx(rate, 0.0), model.op, model.op));
    return gen;
}

// Random-in-time-but-constant Hamiltonian: dissipator grows linearly in
// elapsed time, with the covariance of the amplitudes setting the weights.
inline GeneratorEvaluation generator_time_independent(const TimeIndependentModel& model,
                                                      double t, double t0) {
    if (t < t0) throw std::invalid_argument("generator_time_independent: t < t0");
    if (model.ops.empty())
        throw std::invalid_argument("generator_time_independent: no operators");
    const std::size_t n = model.ops.size();
    const std::size_t d = model.ops.front().rows();
    const double dt = t - t0;

    GeneratorEvaluation gen;
    gen.h_eff = ComplexMatrix::zero(d, d);  // amplitudes have zero mean
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) {
            const cplx g = model.covariance(k, l) * dt;
            if (g == cplx(0.0, 0.0)) continue;
            gen.dissipators.push_back(
                DissipatorTerm::of(g, model.ops[l].adjoint(), model.ops[k]));
            gen.dissipators.push_back(
                DissipatorTerm::of(std::conj(g), model.ops[l], model.ops[k].adjoint()));
        }
    return gen;
}

// Multiple complex processes. With
//   g_kl(t) = int <a_k(t) a_l*(t')> dt'
// the antisymmetric part alpha_kl = (g_kl - g_lk*)/2 drives a coherent
// correction -i sum alpha_kl [[h_k, h_l†], .] folded into h_eff, and the
// symmetric part beta_kl = (g_kl + g_lk*)/2 weights the dissipator pairs.
// Pseudo-correlations p_kl(t) = int <a_k(t) a_l(t')> dt' add the analogous
// terms on the undaggered/doubly-daggered operator products; they are what
// distinguishes a genuinely circular drive from a modulated real one.
inline GeneratorEvaluation generator_multi_complex(const MultiComplexModel& model, double t,
                                                   double t0) {
    if (t < t0) throw std::invalid_argument("generator_multi_complex: t < t0");
    if (model.ops.empty())
        throw std::invalid_argument("generator_multi_complex: no operators");
    const std::size_t n = model.ops.size();
    const std::size_t d = model.ops.front().rows();

    std::vector<std::vector<cplx>> g(n, std::vector<cplx>(n));
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l)
            g[k][l] = model.cross[k][l].lag_integral(t, t0);

    GeneratorEvaluation gen;
    gen.h_eff = ComplexMatrix::zero(d, d);
    std::vector<ComplexMatrix> dag(n);
    for (std::size_t k = 0; k < n; ++k) dag[k] = model.ops[k].adjoint();

    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) {
            const cplx alpha = 0.5 * (g[k][l] - std::conj(g[l][k]));
            const cplx beta = 0.5 * (g[k][l] + std::conj(g[l][k]));
            if (alpha != cplx(0.0, 0.0))
                gen.h_eff += cplx(0.0, -1.0) * alpha * commutator(model.ops[k], dag[l]);
            if (beta != cplx(0.0, 0.0)) {
                gen.dissipators.push_back(DissipatorTerm::of(beta, model.ops[k], dag[l]));
                gen.dissipators.push_back(DissipatorTerm::of(beta, dag[l], model.ops[k]));
            }
        }

    if (!model.pseudo.empty()) {
        std::vector<std::vector<cplx>> p(n, std::vector<cplx>(n));
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t l = 0; l < n; ++l)
                p[k][l] = model.pseudo[k][l].lag_integral(t, t0);

        for (std::size_t k = 0; k < n; ++k) {
            if (p[k][k] != cplx(0.0, 0.0)) {
                gen.dissipators.push_back(
                    DissipatorTerm::of(p[k][k], model.ops[k], model.ops[k]));
                gen.dissipators.push_back(
                    DissipatorTerm::of(std::conj(p[k][k]), dag[k], dag[k]));
            }
            for (std::size_t l = k + 1; l < n; ++l) {
                const cplx s = 0.5 * (p[k][l] + p[l][k]);
                const cplx a = 0.5 * (p[k][l] - p[l][k]);
                if (s != cplx(0.0, 0.0)) {
                    gen.dissipators.push_back(DissipatorTerm::of(s, model.ops[k], model.ops[l]));
                    gen.dissipators.push_back(DissipatorTerm::of(s, model.ops[l], model.ops[k]));
                    gen.dissipators.push_back(
                        DissipatorTerm::of(std::conj(s), dag[k], dag[l]));
                    gen.dissipators.push_back(
                        DissipatorTerm::of(std::conj(s), dag[l], dag[k]));
                }
                if (a != cplx(0.0, 0.0)) {
                    const ComplexMatrix comm = commutator(model.ops[k], model.ops[l]);
                    const ComplexMatrix x = cplx(0.0, -1.0) * a * comm;
                    gen.h_eff += x;
                    gen.h_eff += x.adjoint();
                }
            }
        }
    }
    return gen;
}

// Scaled in-phase/quadrature kernel weights of the ion drive at the
// oscillator frequency. These are the two time-dependent rates the whole
// driven-ion generator is assembled from.
inline std::pair<double, double> ion_rates(const IonModel& model, double t, double t0) {
    const auto [c, s] = model.field_kernel.modulated_integrals(model.omega0, t, t0);
    return {model.coupling * c, model.coupling * s};
}

// Driven harmonic mode. The coherent part is proportional to the identity
// (kept so the Hermiticity/trace invariants see the full generator, though
// it cannot move the state); the dissipator carries a heating/cooling pair
// at rate C(t) plus two counter-rotating pieces at phase 2 omega0 t.
inline GeneratorEvaluation generator_ion(const IonModel& model, double t, double t0) {
    if (t < t0) throw std::invalid_argument("generator_ion: t < t0");
    const auto [C, S] = ion_rates(model, t, t0);
    const auto [a, adag] = fock_ladder(model.n_fock);

    GeneratorEvaluation gen;
    gen.h_eff = ComplexMatrix::identity(model.n_fock) * cplx(-S, 0.0);
    const cplx rot = std::exp(cplx(0.0, 2.0 * model.omega0 * t));
    gen.dissipators.push_back(DissipatorTerm::of(cplx(C, 0.0), a, adag));
    gen.dissipators.push_back(DissipatorTerm::of(cplx(C, 0.0), adag, a));
    gen.dissipators.push_back(DissipatorTerm::of(rot * cplx(C, -S), adag, adag));
    gen.dissipators.push_back(DissipatorTerm::of(std::conj(rot) * cplx(C, S), a, a));
    return gen;
}

inline GeneratorEvaluation eval_generator(const StochasticHamiltonianModel& model, double t,
                                          double t0) {
    struct Visitor {
        double t, t0;
        GeneratorEvaluation operator()(const SingleRealModel& m) const {
            return generator_single_real(m, t, t0);
        }
        GeneratorEvaluation operator()(const TimeIndependentModel& m) const {
            return generator_time_independent(m, t, t0);
        }
        GeneratorEvaluation operator()(const MultiComplexModel& m) const {
            return generator_multi_complex(m, t, t0);
        }
        GeneratorEvaluation operator()(const IonModel& m) const {
            return generator_ion(m, t, t0);
        }
    };
    return std::visit(Visitor{t, t0}, model);
}

}  // namespace rhobar
