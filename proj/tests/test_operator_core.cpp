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

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "rhobar/complex_matrix.hpp"
#include "rhobar/density_matrix.hpp"
#include "rhobar/hermitian_eig.hpp"
#include "rhobar/hilbert.hpp"
#include "rhobar/matrix_exp.hpp"
#include "rhobar/rng.hpp"

using namespace rhobar;

namespace {

ComplexMatrix random_hermitian(CounterRng& rng, std::size_t n, double scale) {
    ComplexMatrix g(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            g(i, j) = cplx(rng.next_normal(), rng.next_normal()) * scale;
    return (g + g.adjoint()) * cplx(0.5, 0.0);
}

ComplexMatrix random_density(CounterRng& rng, std::size_t n) {
    ComplexMatrix w(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) w(i, j) = cplx(rng.next_normal(), rng.next_normal());
    ComplexMatrix rho = w * w.adjoint();
    return rho * (1.0 / rho.trace());
}

// Random 2x2 special unitary from two normals mapped to Euler-like angles.
ComplexMatrix random_su2(CounterRng& rng) {
    const double a = rng.next_uniform() * 2.0 * 3.14159265358979323846;
    const double b = rng.next_uniform() * 2.0 * 3.14159265358979323846;
    const double th = std::acos(2.0 * rng.next_uniform() - 1.0) * 0.5;
    const cplx u = std::exp(cplx(0.0, a)) * std::cos(th);
    const cplx v = std::exp(cplx(0.0, b)) * std::sin(th);
    return ComplexMatrix{{u, -std::conj(v)}, {v, std::conj(u)}};
}

// Characteristic polynomial of a 4x4 matrix by the Faddeev-LeVerrier
// recursion, then all four roots by Durand-Kerner iteration. This shares no
// code with the Jacobi eigensolver, which is the point: it is the
// independent route used to cross-check the concurrence.
std::array<cplx, 4> quartic_eigenvalues(const ComplexMatrix& a) {
    const std::size_t n = 4;
    std::array<cplx, 5> c;  // p(x) = x^4 + c[1] x^3 + c[2] x^2 + c[3] x + c[4]
    c[0] = 1.0;
    ComplexMatrix m = a;
    for (std::size_t k = 1; k <= n; ++k) {
        c[k] = m.trace() * (-1.0 / static_cast<double>(k));
        if (k < n) {
            for (std::size_t i = 0; i < n; ++i) m(i, i) += c[k];
            m = a * m;
        }
    }
    const auto p = [&c](cplx x) {
        return (((x + c[1]) * x + c[2]) * x + c[3]) * x + c[4];
    };
    std::array<cplx, 4> r;
    for (std::size_t k = 0; k < 4; ++k) r[k] = std::pow(cplx(0.4, 0.9), static_cast<double>(k + 1));
    for (int iter = 0; iter < 400; ++iter) {
        double moved = 0.0;
        for (std::size_t k = 0; k < 4; ++k) {
            cplx denom(1.0, 0.0);
            for (std::size_t j = 0; j < 4; ++j)
                if (j != k) denom *= r[k] - r[j];
            const cplx delta = p(r[k]) / denom;
            r[k] -= delta;
            moved = std::max(moved, std::abs(delta));
        }
        if (moved < 1e-14) break;
    }
    return r;
}

double concurrence_by_char_poly(const ComplexMatrix& rho) {
    const ComplexMatrix yy = tensor(pauli('y'), pauli('y'));
    const std::array<cplx, 4> roots = quartic_eigenvalues(rho * yy * rho.conjugate() * yy);
    std::array<double, 4> lam{};
    for (std::size_t k = 0; k < 4; ++k) lam[k] = std::sqrt(std::max(0.0, roots[k].real()));
    std::sort(lam.begin(), lam.end(), std::greater<double>());
    return std::max(0.0, lam[0] - lam[1] - lam[2] - lam[3]);
}

}  // namespace

TEST_CASE("commutator basics") {
    const ComplexMatrix x = pauli('x');
    const ComplexMatrix z = pauli('z');

    REQUIRE(commutator(x, x).max_abs() == 0.0);

    const ComplexMatrix rho = ComplexMatrix::diagonal_real({0.7, 0.3});
    REQUIRE(commutator(z, rho).max_abs() == 0.0);

    REQUIRE_THROWS_AS(commutator(x, ComplexMatrix::identity(3)), std::invalid_argument);
}

TEST_CASE("truncated ladder commutator picks up the edge defect") {
    const auto [a, adag] = fock_ladder(5);
    const ComplexMatrix c = commutator(a, adag);
    const ComplexMatrix expected = ComplexMatrix::diagonal_real({1.0, 1.0, 1.0, 1.0, -4.0});
    REQUIRE(max_abs_diff(c, expected) < 1e-14);
}

TEST_CASE("pauli matrices") {
    const ComplexMatrix z = pauli('z');
    REQUIRE(z(0, 0) == cplx(1.0, 0.0));
    REQUIRE(z(1, 1) == cplx(-1.0, 0.0));
    REQUIRE(z(0, 1) == cplx(0.0, 0.0));

    REQUIRE(max_abs_diff(pauli('x') * pauli('x'), ComplexMatrix::identity(2)) == 0.0);

    for (char which : {'x', 'y', 'z'}) {
        const ComplexMatrix p = pauli(which);
        REQUIRE(p.hermiticity_error() == 0.0);
        REQUIRE(p.trace() == cplx(0.0, 0.0));
        REQUIRE(max_abs_diff(p * p.adjoint(), ComplexMatrix::identity(2)) == 0.0);
    }
    REQUIRE_THROWS_AS(pauli('q'), std::invalid_argument);
}

TEST_CASE("total inversion operator of two qubits") {
    const ComplexMatrix zt = two_qubit_z_total();
    const ComplexMatrix expected = ComplexMatrix::diagonal_real({2.0, 0.0, 0.0, -2.0});
    REQUIRE(max_abs_diff(zt, expected) == 0.0);
}

TEST_CASE("fock ladder operators") {
    const auto two = fock_ladder(2);
    REQUIRE(two.a(0, 1) == cplx(1.0, 0.0));
    REQUIRE(two.a(0, 0) == cplx(0.0, 0.0));
    REQUIRE(two.a(1, 0) == cplx(0.0, 0.0));
    REQUIRE(two.a(1, 1) == cplx(0.0, 0.0));

    const auto five = fock_ladder(5);
    // raise is the exact conjugate transpose, bit for bit
    REQUIRE(max_abs_diff(five.a_dag, five.a.adjoint()) == 0.0);
    // the number operator diagonal is 0..4; entries k = 2, 3 come out as
    // (sqrt k)^2 and sit one rounding away from the integer
    const ComplexMatrix number = five.a_dag * five.a;
    for (std::size_t k = 0; k < 5; ++k) {
        REQUIRE(std::abs(number(k, k) - cplx(static_cast<double>(k), 0.0)) <= 1e-15);
        for (std::size_t l = 0; l < 5; ++l)
            if (l != k) REQUIRE(number(k, l) == cplx(0.0, 0.0));
    }
    REQUIRE(number.hermiticity_error() == 0.0);

    // lowering |2> gives sqrt(2) |1>
    ComplexMatrix e2(5, 1);
    e2(2, 0) = 1.0;
    const ComplexMatrix lowered = five.a * e2;
    REQUIRE(std::abs(lowered(1, 0) - cplx(std::sqrt(2.0), 0.0)) < 1e-15);
    for (std::size_t k : {0, 2, 3, 4}) REQUIRE(lowered(k, 0) == cplx(0.0, 0.0));

    REQUIRE_THROWS_AS(fock_ladder(1), std::invalid_argument);
}

TEST_CASE("tensor product") {
    const ComplexMatrix id2 = ComplexMatrix::identity(2);
    REQUIRE(max_abs_diff(tensor(id2, id2), ComplexMatrix::identity(4)) == 0.0);

    const ComplexMatrix zi = tensor(pauli('z'), id2);
    REQUIRE(zi(0, 0) == cplx(1.0, 0.0));
    REQUIRE(zi(3, 3) == cplx(-1.0, 0.0));

    SECTION("dimensions multiply and association is exact") {
        CounterRng rng(11, 0);
        const ComplexMatrix a = random_hermitian(rng, 2, 1.0);
        const ComplexMatrix b = random_hermitian(rng, 3, 1.0);
        const ComplexMatrix c = random_hermitian(rng, 2, 1.0);
        REQUIRE(tensor(a, b).rows() == 6);
        REQUIRE(tensor(a, b).cols() == 6);

        // with exactly representable entries the index bookkeeping must
        // associate bit for bit; generic complex entries re-round per
        // association order, so those only get an ulp-scale bound
        const ComplexMatrix p{{1.0, 2.0}, {cplx(0.0, -3.0), 0.5}};
        const ComplexMatrix q{{4.0, cplx(0.25, 1.0)}, {0.0, -2.0}};
        const ComplexMatrix r{{cplx(1.5, -0.5), 8.0}, {0.125, 1.0}};
        REQUIRE(max_abs_diff(tensor(tensor(p, q), r), tensor(p, tensor(q, r))) == 0.0);
        REQUIRE(max_abs_diff(tensor(tensor(a, b), c), tensor(a, tensor(b, c))) < 1e-14);
    }

    SECTION("the symmetric one-excitation state is a null eigenvector of the total inversion") {
        const ComplexMatrix zt = two_qubit_z_total();
        const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
        ComplexMatrix psi(4, 1);
        psi(1, 0) = inv_sqrt2;
        psi(2, 0) = inv_sqrt2;
        REQUIRE((zt * psi).max_abs() == 0.0);
    }
}

TEST_CASE("density matrix validation") {
    SECTION("maximally mixed state is valid") {
        for (std::size_t d : {2, 3, 4, 7}) {
            const ComplexMatrix rho = ComplexMatrix::identity(d) * cplx(1.0 / d, 0.0);
            REQUIRE(validate_density(rho).ok);
        }
    }

    SECTION("trace deviation is reported as such") {
        const DensityValidation v = validate_density(ComplexMatrix::diagonal_real({0.6, 0.5}));
        REQUIRE_FALSE(v.ok);
        REQUIRE_THAT(v.failure, Catch::Matchers::ContainsSubstring("trace"));
        REQUIRE(v.trace_error == Catch::Approx(0.1).margin(1e-14));
    }

    SECTION("indefinite matrix fails positivity with the analytic eigenvalue") {
        const ComplexMatrix m{{0.5, 0.6}, {0.6, 0.5}};
        const DensityValidation v = validate_density(m);
        REQUIRE_FALSE(v.ok);
        REQUIRE_THAT(v.failure, Catch::Matchers::ContainsSubstring("positivity"));
        REQUIRE(v.min_eig == Catch::Approx(-0.1).margin(1e-12));
    }

    SECTION("non-Hermitian input is its own failure kind") {
        const ComplexMatrix m{{0.5, cplx(0.1, 0.2)}, {0.1, 0.5}};
        const DensityValidation v = validate_density(m);
        REQUIRE_FALSE(v.ok);
        REQUIRE_THAT(v.failure, Catch::Matchers::ContainsSubstring("hermiticity"));
    }

    SECTION("raise_if_failed names the context") {
        const DensityValidation v = validate_density(ComplexMatrix::diagonal_real({0.6, 0.5}));
        REQUIRE_THROWS_WITH(v.raise_if_failed("unit test"),
                            Catch::Matchers::ContainsSubstring("unit test"));
    }
}

TEST_CASE("hermitian eigensolver") {
    SECTION("2x2 with known spectrum") {
        const std::vector<double> eig = hermitian_eigenvalues(
            ComplexMatrix{{0.5, 0.6}, {0.6, 0.5}});
        REQUIRE(eig[0] == Catch::Approx(-0.1).margin(1e-13));
        REQUIRE(eig[1] == Catch::Approx(1.1).margin(1e-13));
    }

    SECTION("eigenpairs reconstruct random Hermitian matrices") {
        CounterRng rng(42, 0);
        for (int trial = 0; trial < 20; ++trial) {
            const std::size_t n = 2 + static_cast<std::size_t>(trial % 5);
            const ComplexMatrix a = random_hermitian(rng, n, 1.3);
            const HermitianEig eig = hermitian_eigensystem(a);
            for (std::size_t k = 1; k < n; ++k) REQUIRE(eig.values[k] >= eig.values[k - 1]);
            const ComplexMatrix lambda = ComplexMatrix::diagonal_real(eig.values);
            REQUIRE(max_abs_diff(a * eig.vectors, eig.vectors * lambda) < 1e-11);
            REQUIRE(max_abs_diff(eig.vectors.adjoint() * eig.vectors,
                                 ComplexMatrix::identity(n)) < 1e-12);
        }
    }
}

TEST_CASE("matrix exponential") {
    REQUIRE(max_abs_diff(matrix_exp(ComplexMatrix::zero(3, 3)),
                         ComplexMatrix::identity(3)) == 0.0);

    SECTION("rotation generated by a Pauli axis") {
        const double theta = 0.83;
        const ComplexMatrix u = matrix_exp(pauli('x') * cplx(0.0, -theta));
        ComplexMatrix expected = ComplexMatrix::identity(2) * cplx(std::cos(theta), 0.0);
        expected += pauli('x') * cplx(0.0, -std::sin(theta));
        REQUIRE(max_abs_diff(u, expected) < 1e-14);
        REQUIRE(max_abs_diff(u * u.adjoint(), ComplexMatrix::identity(2)) < 1e-14);
    }

    SECTION("diagonal argument exponentiates elementwise") {
        const ComplexMatrix e = matrix_exp(ComplexMatrix::diagonal({cplx(0.3, -0.7), cplx(-1.2, 0.4)}));
        REQUIRE(std::abs(e(0, 0) - std::exp(cplx(0.3, -0.7))) < 1e-14);
        REQUIRE(std::abs(e(1, 1) - std::exp(cplx(-1.2, 0.4))) < 1e-14);
        REQUIRE(e(0, 1) == cplx(0.0, 0.0));
    }

    SECTION("agrees with the eigenbasis propagator on Hermitian input") {
        CounterRng rng(7, 0);
        const ComplexMatrix h = random_hermitian(rng, 4, 0.9);
        const double theta = 1.7;
        REQUIRE(max_abs_diff(matrix_exp(h * cplx(0.0, -theta)),
                             hermitian_propagator(h, theta)) < 1e-12);
    }
}

TEST_CASE("concurrence of reference states") {
    REQUIRE(concurrence(bell_phi_plus()) == Catch::Approx(1.0).margin(1e-12));

    ComplexMatrix mixed = ComplexMatrix::zero(4, 4);
    mixed(0, 0) = 0.5;
    mixed(3, 3) = 0.5;
    REQUIRE(concurrence(mixed) == Catch::Approx(0.0).margin(1e-12));

    // X-shaped state half way through the corner decay (off-diagonals 1/4):
    // for this family the concurrence equals twice the corner magnitude
    ComplexMatrix half = mixed;
    half(0, 3) = 0.25;
    half(3, 0) = 0.25;
    REQUIRE(concurrence(half) == Catch::Approx(0.5).margin(1e-12));

    REQUIRE_THROWS_AS(concurrence(ComplexMatrix::identity(2)), std::invalid_argument);
}

TEST_CASE("concurrence cross-checked against the characteristic-polynomial route") {
    CounterRng rng(314, 0);
    for (int trial = 0; trial < 40; ++trial) {
        const ComplexMatrix rho = random_density(rng, 4);
        REQUIRE(concurrence(rho) ==
                Catch::Approx(concurrence_by_char_poly(rho)).margin(1e-9));
    }

    ComplexMatrix x_state = ComplexMatrix::zero(4, 4);
    x_state(0, 0) = 0.5;
    x_state(3, 3) = 0.5;
    x_state(0, 3) = 0.25;
    x_state(3, 0) = 0.25;
    REQUIRE(concurrence_by_char_poly(x_state) == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("concurrence is invariant under local unitaries") {
    CounterRng rng(2718, 0);
    for (int trial = 0; trial < 25; ++trial) {
        const ComplexMatrix rho = random_density(rng, 4);
        const ComplexMatrix u = tensor(random_su2(rng), random_su2(rng));
        const double before = concurrence(rho);
        const double after = concurrence(u * rho * u.adjoint());
        REQUIRE(after == Catch::Approx(before).margin(1e-9));
    }
}

TEST_CASE("pure density construction normalizes") {
    const ComplexMatrix rho = pure_density({cplx(3.0, 0.0), cplx(0.0, 4.0)});
    REQUIRE(std::abs(rho.trace() - cplx(1.0, 0.0)) < 1e-15);
    REQUIRE(rho(0, 0).real() == Catch::Approx(0.36).margin(1e-15));
    REQUIRE(rho(1, 1).real() == Catch::Approx(0.64).margin(1e-15));
    REQUIRE_THROWS_AS(pure_density({cplx(0.0, 0.0)}), std::invalid_argument);
}

TEST_CASE("hilbert space specs stay consistent") {
    REQUIRE(HilbertSpaceSpec::qubit().dim == 2);
    REQUIRE(HilbertSpaceSpec::two_qubit().dim == 4);
    REQUIRE(HilbertSpaceSpec::oscillator(7).dim == 7);
    REQUIRE_THROWS_AS(HilbertSpaceSpec::oscillator(1), std::invalid_argument);
}
