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
#include <stdexcept>

#include "rhobar/complex_matrix.hpp"

namespace rhobar {

namespace detail {

inline double one_norm(const ComplexMatrix& m) {
    double best = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m.rows(); ++i) s += std::abs(m(i, j));
        best = std::max(best, s);
    }
    return best;
}

}  // namespace detail

// Matrix exponential by scaling and squaring around a Taylor core. The
// propagation steps that call this keep the scaled norm at 0.25 or below,
// where the series reaches round-off in at most a couple dozen terms.
inline ComplexMatrix matrix_exp(const ComplexMatrix& m) {
    m.require_square("matrix_exp");
    if (!m.all_finite())
        throw std::invalid_argument("matrix_exp: input has non-finite entries");

    int squarings = 0;
    double nrm = detail::one_norm(m);
    while (nrm > 0.25 && squarings < 64) {
        nrm *= 0.5;
        ++squarings;
    }

    ComplexMatrix x = m;
    if (squarings > 0) x *= cplx(std::ldexp(1.0, -squarings), 0.0);

    ComplexMatrix result = ComplexMatrix::identity(m.rows());
    ComplexMatrix term = x;
    result += term;
    for (int k = 2; k <= 40; ++k) {
        term = term * x;
        term *= cplx(1.0 / k, 0.0);
        result += term;
        if (term.max_abs() <= 1e-17 * std::max(1.0, result.max_abs())) break;
    }

    for (int i = 0; i < squarings; ++i) result = result * result;
    return result;
}

}  // namespace rhobar
