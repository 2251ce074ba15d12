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
#include <stdexcept>
#include <string>

#include "rhobar/complex_matrix.hpp"
#include "rhobar/hermitian_eig.hpp"
#include "rhobar/hilbert.hpp"

namespace rhobar {

struct DensityTolerances {
    double hermiticity = 1e-10;     // max |rho - rho†| elementwise
    double trace = 1e-10;           // |Tr rho - 1|
    double min_eigenvalue = -1e-8;  // smallest eigenvalue may dip this far below zero

    // Monte-Carlo ensemble means carry statistical noise, so the positivity
    // floor is looser there.
    static DensityTolerances strict() { return {}; }
    static DensityTolerances ensemble_mean() { return {1e-10, 1e-10, -1e-6}; }
};

struct DensityValidation {
    bool ok = false;
    double hermiticity_error = 0.0;
    double trace_error = 0.0;
    double min_eig = 0.0;
    std::string failure;  // empty when ok

    void raise_if_failed(const char* context) const {
        if (!ok)
            throw std::invalid_argument(std::string(context) + ": " + failure);
    }
};

// Checks the three density-matrix invariants (Hermitian, unit trace, positive
// semidefinite) and reports which one failed first.
inline DensityValidation validate_density(const ComplexMatrix& rho,
                                          const DensityTolerances& tol = DensityTolerances::strict()) {
    DensityValidation v;
    if (!rho.is_square() || rho.rows() == 0) {
        v.failure = "matrix is not square";
        return v;
    }
    if (!rho.all_finite()) {
        v.failure = "matrix has non-finite entries";
        return v;
    }

    v.hermiticity_error = rho.hermiticity_error();
    if (v.hermiticity_error > tol.hermiticity) {
        v.failure = "hermiticity violated: max |rho - rho^dag| = "
            + std::to_string(v.hermiticity_error);
        return v;
    }

    v.trace_error = std::abs(rho.trace() - cplx(1.0, 0.0));
    if (v.trace_error > tol.trace) {
        v.failure = "trace violated: |Tr rho - 1| = " + std::to_string(v.trace_error);
        return v;
    }

    // positivity on the symmetrized part (hermiticity already passed above)
    const std::size_t n = rho.rows();
    ComplexMatrix herm(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            herm(i, j) = 0.5 * (rho(i, j) + std::conj(rho(j, i)));
    v.min_eig = min_eigenvalue(herm);
    if (v.min_eig < tol.min_eigenvalue) {
        v.failure = "positivity violated: min eigenvalue = " + std::to_string(v.min_eig);
        return v;
    }

    v.ok = true;
    return v;
}

// A state that has passed validation at construction time.
class DensityMatrix {
public:
    explicit DensityMatrix(ComplexMatrix rho,
                           const DensityTolerances& tol = DensityTolerances::strict())
        : rho_(std::move(rho)) {
        validate_density(rho_, tol).raise_if_failed("DensityMatrix");
    }

    static DensityMatrix pure(const std::vector<cplx>& psi) {
        return DensityMatrix(pure_density(psi));
    }

    const ComplexMatrix& matrix() const { return rho_; }
    std::size_t dim() const { return rho_.rows(); }

private:
    ComplexMatrix rho_;
};

// Two-qubit concurrence (the standard spin-flip entanglement monotone).
// lambda_i are the square roots, in decreasing order, of the eigenvalues of
// rho (Y(x)Y) rho* (Y(x)Y); evaluated here through the Hermitian form
// sqrt(rho) rho~ sqrt(rho), which shares those eigenvalues.
inline double concurrence(const ComplexMatrix& rho) {
    if (rho.rows() != 4 || rho.cols() != 4)
        throw std::invalid_argument("concurrence: defined for 4x4 two-qubit states only");

    const ComplexMatrix yy = tensor(pauli('y'), pauli('y'));
    const ComplexMatrix rho_tilde = yy * rho.conjugate() * yy;
    const ComplexMatrix root = sqrt_psd(rho);
    ComplexMatrix m = root * rho_tilde * root;

    // symmetrize away the round-off; m is Hermitian PSD in exact arithmetic
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i; j < 4; ++j) {
            const cplx avg = 0.5 * (m(i, j) + std::conj(m(j, i)));
            m(i, j) = avg;
            m(j, i) = std::conj(avg);
        }

    const std::vector<double> eig = hermitian_eigenvalues(m);  // ascending
    double lam[4];
    for (int i = 0; i < 4; ++i) lam[i] = std::sqrt(std::max(eig[3 - i], 0.0));
    return std::max(0.0, lam[0] - lam[1] - lam[2] - lam[3]);
}

}  // namespace rhobar
