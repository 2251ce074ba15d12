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
#include <numeric>
#include <stdexcept>
#include <vector>

#include "rhobar/complex_matrix.hpp"

namespace rhobar {

// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
// vectors holds the eigenvectors as columns (empty unless requested).
struct HermitianEig {
    std::vector<double> values;
    ComplexMatrix vectors;
};

namespace detail {

// One complex Jacobi rotation zeroing A(p,q). A is updated in place as
// R† A R and, if V is non-null, V accumulates the rotation as V R.
inline void jacobi_rotate(ComplexMatrix& A, std::size_t p, std::size_t q, ComplexMatrix* V) {
    const cplx g = A(p, q);
    const double absg = std::abs(g);
    if (absg == 0.0) return;

    const double alpha = A(p, p).real();
    const double beta = A(q, q).real();
    const double tau = (beta - alpha) / (2.0 * absg);
    const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = t * c;
    const cplx w = g / absg;           // e^{i phi}
    const cplx wc = std::conj(w);

    const std::size_t n = A.rows();
    for (std::size_t i = 0; i < n; ++i) {
        const cplx aip = A(i, p);
        const cplx aiq = A(i, q);
        A(i, p) = c * aip - s * wc * aiq;
        A(i, q) = s * w * aip + c * aiq;
    }
    for (std::size_t j = 0; j < n; ++j) {
        const cplx apj = A(p, j);
        const cplx aqj = A(q, j);
        A(p, j) = c * apj - s * w * aqj;
        A(q, j) = s * wc * apj + c * aqj;
    }
    // pin the analytically known results against round-off
    A(p, q) = 0.0;
    A(q, p) = 0.0;
    A(p, p) = alpha - t * absg;
    A(q, q) = beta + t * absg;

    if (V) {
        for (std::size_t i = 0; i < n; ++i) {
            const cplx vip = (*V)(i, p);
            const cplx viq = (*V)(i, q);
            (*V)(i, p) = c * vip - s * wc * viq;
            (*V)(i, q) = s * w * vip + c * viq;
        }
    }
}

inline double offdiag_norm(const ComplexMatrix& A) {
    double s = 0.0;
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t j = i + 1; j < A.cols(); ++j)
            s += std::norm(A(i, j));
    return std::sqrt(2.0 * s);
}

}  // namespace detail

// Cyclic Jacobi diagonalization. Kept self-contained on purpose: the matrices
// here are tiny and this avoids dragging a linear-algebra dependency into a
// header-only library. Converges when the off-diagonal norm drops below
// 1e-12 relative to the Frobenius norm of the input.
inline HermitianEig hermitian_eigensystem(const ComplexMatrix& input, bool want_vectors = true) {
    input.require_square("hermitian_eigensystem");
    const std::size_t n = input.rows();
    const double scale = input.frobenius_norm();
    if (input.hermiticity_error() > 1e-8 * std::max(1.0, scale))
        throw std::invalid_argument("hermitian_eigensystem: input is not Hermitian");

    // work on the exactly Hermitian part so round-off in the input cannot
    // push the iteration off the real-diagonal track
    ComplexMatrix A(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            A(i, j) = 0.5 * (input(i, j) + std::conj(input(j, i)));

    ComplexMatrix V;
    if (want_vectors) V = ComplexMatrix::identity(n);

    const double tol = 1e-12 * std::max(scale, 1e-300);
    const int max_sweeps = 100;
    int sweep = 0;
    while (detail::offdiag_norm(A) > tol) {
        if (++sweep > max_sweeps)
            throw std::runtime_error("hermitian_eigensystem: Jacobi sweep limit reached");
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q)
                detail::jacobi_rotate(A, p, q, want_vectors ? &V : nullptr);
    }

    HermitianEig out;
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.values[i] = A(i, i).real();

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return out.values[a] < out.values[b]; });

    std::vector<double> sorted(n);
    for (std::size_t i = 0; i < n; ++i) sorted[i] = out.values[order[i]];
    out.values = std::move(sorted);

    if (want_vectors) {
        out.vectors = ComplexMatrix(n, n);
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < n; ++i)
                out.vectors(i, j) = V(i, order[j]);
    }
    return out;
}

inline std::vector<double> hermitian_eigenvalues(const ComplexMatrix& a) {
    return hermitian_eigensystem(a, false).values;
}

inline double min_eigenvalue(const ComplexMatrix& a) {
    return hermitian_eigenvalues(a).front();
}

// V f(lambda) V† for Hermitian input
template <typename Fn>
inline ComplexMatrix hermitian_function(const ComplexMatrix& a, Fn&& f) {
    const HermitianEig eig = hermitian_eigensystem(a, true);
    const std::size_t n = a.rows();
    ComplexMatrix scaled = eig.vectors;  // columns times f(lambda_j)
    for (std::size_t j = 0; j < n; ++j) {
        const cplx fj = f(eig.values[j]);
        for (std::size_t i = 0; i < n; ++i) scaled(i, j) *= fj;
    }
    return scaled * eig.vectors.adjoint();
}

// Principal square root of a positive semidefinite matrix; tiny negative
// eigenvalues from round-off are clamped to zero.
inline ComplexMatrix sqrt_psd(const ComplexMatrix& a) {
    return hermitian_function(a, [](double x) { return cplx(std::sqrt(std::max(x, 0.0)), 0.0); });
}

// exp(-i theta H) for Hermitian H; unitary to round-off by construction.
inline ComplexMatrix hermitian_propagator(const ComplexMatrix& h, double theta) {
    return hermitian_function(h, [theta](double x) {
        return std::exp(cplx(0.0, -theta * x));
    });
}

}  // namespace rhobar
