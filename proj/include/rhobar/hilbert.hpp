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

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "rhobar/complex_matrix.hpp"

namespace rhobar {

// Tags the space a scenario lives in so that dimension bookkeeping has one
// source of truth.
struct HilbertSpaceSpec {
    enum class Kind { qubit, two_qubit, oscillator, generic };

    Kind kind = Kind::generic;
    std::size_t dim = 0;

    static HilbertSpaceSpec qubit() { return {Kind::qubit, 2}; }
    static HilbertSpaceSpec two_qubit() { return {Kind::two_qubit, 4}; }
    static HilbertSpaceSpec oscillator(std::size_t n_fock) {
        if (n_fock < 2)
            throw std::invalid_argument("HilbertSpaceSpec: oscillator needs >= 2 levels");
        return {Kind::oscillator, n_fock};
    }
    static HilbertSpaceSpec generic(std::size_t dim) {
        if (dim < 1) throw std::invalid_argument("HilbertSpaceSpec: dimension must be positive");
        return {Kind::generic, dim};
    }

    void check() const {
        const bool ok =
            (kind == Kind::qubit && dim == 2) || (kind == Kind::two_qubit && dim == 4) ||
            (kind == Kind::oscillator && dim >= 2) || (kind == Kind::generic && dim >= 1);
        if (!ok)
            throw std::invalid_argument("HilbertSpaceSpec: kind/dimension mismatch (dim="
                + std::to_string(dim) + ")");
    }
};

inline std::vector<cplx> basis_ket(std::size_t dim, std::size_t k) {
    if (k >= dim) throw std::invalid_argument("basis_ket: index out of range");
    std::vector<cplx> v(dim, cplx(0.0, 0.0));
    v[k] = 1.0;
    return v;
}

// |psi><psi| from an (unnormalized) state vector
inline ComplexMatrix pure_density(const std::vector<cplx>& psi) {
    double n2 = 0.0;
    for (const auto& c : psi) n2 += std::norm(c);
    if (n2 <= 0.0) throw std::invalid_argument("pure_density: zero state vector");
    ComplexMatrix rho(psi.size(), psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i)
        for (std::size_t j = 0; j < psi.size(); ++j)
            rho(i, j) = psi[i] * std::conj(psi[j]) / n2;
    return rho;
}

// (|00> + |11>)/sqrt(2)
inline ComplexMatrix bell_phi_plus() {
    std::vector<cplx> psi(4, cplx(0.0, 0.0));
    psi[0] = 1.0;
    psi[3] = 1.0;
    return pure_density(psi);
}

// (|01> + |10>)/sqrt(2)
inline ComplexMatrix bell_psi_plus() {
    std::vector<cplx> psi(4, cplx(0.0, 0.0));
    psi[1] = 1.0;
    psi[2] = 1.0;
    return pure_density(psi);
}

// Z(x)I + I(x)Z, the collective-dephasing generator direction for two qubits;
// diagonal (2, 0, 0, -2).
inline ComplexMatrix two_qubit_z_total() {
    const ComplexMatrix z = pauli('z');
    const ComplexMatrix id = pauli('i');
    return tensor(z, id) + tensor(id, z);
}

}  // namespace rhobar
