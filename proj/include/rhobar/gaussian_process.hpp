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
#include <vector>

#include "rhobar/correlation_kernel.hpp"
#include "rhobar/rng.hpp"

namespace rhobar {

// Deterministic mean of the process. Constant means keep exact closed-form
// integrals; arbitrary callables fall back to adaptive Simpson.
class MeanFunction {
public:
    MeanFunction() = default;

    static MeanFunction constant(double m) {
        MeanFunction f;
        f.constant_value_ = m;
        return f;
    }

    static MeanFunction of(std::function<double(double)> fn) {
        MeanFunction f;
        f.fn_ = std::move(fn);
        return f;
    }

    bool is_constant() const { return !fn_; }

    double eval(double t) const { return fn_ ? fn_(t) : constant_value_; }

    double integral(double t0, double t) const {
        if (t < t0)
            throw std::invalid_argument("MeanFunction::integral: t < t0");
        if (!fn_) return constant_value_ * (t - t0);
        return adaptive_simpson(t0, t);
    }

    bool is_zero() const { return !fn_ && constant_value_ == 0.0; }

private:
    double adaptive_simpson(double a, double b) const {
        const double fa = fn_(a), fb = fn_(b), fm = fn_(0.5 * (a + b));
        const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        return simpson_step(a, b, fa, fm, fb, whole, 1e-12, 30);
    }

    double simpson_step(double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) const {
        const double m = 0.5 * (a + b);
        const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
        const double flm = fn_(lm), frm = fn_(rm);
        const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        const double delta = left + right - whole;
        if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
            return left + right + delta / 15.0;
        return simpson_step(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
               simpson_step(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
    }

    double constant_value_ = 0.0;
    std::function<double(double)> fn_;
};

// A scalar Gaussian process: either real valued, or circularly symmetric
// complex (independent real and imaginary parts with half the variance each
// and vanishing pseudo-correlation <a a>).
struct GaussianProcessSpec {
    enum class Valence { real, circular_complex };

    Valence valence = Valence::real;
    MeanFunction mean;
    CorrelationKernel kernel = CorrelationKernel::exponential(0.0, 1.0);

    static GaussianProcessSpec real_process(CorrelationKernel k,
                                            MeanFunction m = MeanFunction::constant(0.0)) {
        GaussianProcessSpec s;
        s.valence = Valence::real;
        s.mean = std::move(m);
        s.kernel = std::move(k);
        return s;
    }

    static GaussianProcessSpec circular(CorrelationKernel k) {
        GaussianProcessSpec s;
        s.valence = Valence::circular_complex;
        s.kernel = std::move(k);
        return s;
    }
};

// One realization on a time grid. For white noise the pointwise values do
// not exist; only the running integral is defined, and pointwise_defined is
// false.
struct ProcessPath {
    std::vector<double> times;
    std::vector<double> values;
    std::vector<double> running_integral;  // starts at exactly 0
    bool pointwise_defined = true;
};

struct ComplexProcessPath {
    std::vector<double> times;
    std::vector<cplx> values;
    std::vector<cplx> running_integral;
};

namespace detail {

inline void require_grid(const std::vector<double>& grid) {
    if (grid.empty())
        throw std::invalid_argument("sample_path: empty time grid");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw std::invalid_argument("sample_path: grid must be strictly increasing");
}

// Stationary Ornstein-Uhlenbeck recursion for the centered process; exact
// for any step size, no discretization error in the transition law.
inline std::vector<double> sample_centered_ou(const CorrelationKernel& kernel,
                                              const std::vector<double>& grid, CounterRng& rng) {
    const double sigma = std::sqrt(kernel.variance());
    const double T = kernel.corr_time();
    std::vector<double> x(grid.size());
    x[0] = sigma * rng.next_normal();
    for (std::size_t k = 1; k < grid.size(); ++k) {
        const double decay = std::exp(-(grid[k] - grid[k - 1]) / T);
        x[k] = x[k - 1] * decay + sigma * std::sqrt(1.0 - decay * decay) * rng.next_normal();
    }
    return x;
}

}  // namespace detail

inline ProcessPath sample_path(const GaussianProcessSpec& spec, const std::vector<double>& grid,
                               CounterRng& rng) {
    detail::require_grid(grid);
    if (spec.valence != GaussianProcessSpec::Valence::real)
        throw std::invalid_argument("sample_path: use sample_complex_path for complex processes");

    ProcessPath path;
    path.times = grid;
    path.running_integral.assign(grid.size(), 0.0);

    switch (spec.kernel.kind()) {
        case CorrelationKernel::Kind::exponential: {
            const std::vector<double> x = detail::sample_centered_ou(spec.kernel, grid, rng);
            path.values.resize(grid.size());
            for (std::size_t k = 0; k < grid.size(); ++k)
                path.values[k] = spec.mean.eval(grid[k]) + x[k];
            for (std::size_t k = 1; k < grid.size(); ++k) {
                const double h = grid[k] - grid[k - 1];
                path.running_integral[k] = path.running_integral[k - 1] +
                    0.5 * h * (path.values[k - 1] + path.values[k]);
            }
            break;
        }
        case CorrelationKernel::Kind::white: {
            // white noise is sampled at the level of its integrated process:
            // independent Gaussian increments, exact at any grid spacing
            path.pointwise_defined = false;
            const double g = spec.kernel.strength();
            for (std::size_t k = 1; k < grid.size(); ++k) {
                const double h = grid[k] - grid[k - 1];
                const double drift = spec.mean.integral(grid[k - 1], grid[k]);
                path.running_integral[k] = path.running_integral[k - 1] + drift +
                    std::sqrt(g * h) * rng.next_normal();
            }
            break;
        }
        case CorrelationKernel::Kind::tabulated:
            throw std::invalid_argument("sample_path: no exact sampler for tabulated kernels");
    }
    return path;
}

inline ProcessPath sample_path(const GaussianProcessSpec& spec, const std::vector<double>& grid,
                               std::uint64_t seed, std::uint64_t stream = 0) {
    CounterRng rng(seed, stream);
    return sample_path(spec, grid, rng);
}

// Circularly symmetric complex path: independent real and imaginary OU
// components carrying half the total variance each.
inline ComplexProcessPath sample_complex_path(const GaussianProcessSpec& spec,
                                              const std::vector<double>& grid, CounterRng& rng) {
    detail::require_grid(grid);
    if (spec.valence != GaussianProcessSpec::Valence::circular_complex)
        throw std::invalid_argument("sample_complex_path: spec is not circular_complex");
    if (!spec.mean.is_zero())
        throw std::invalid_argument("sample_complex_path: circular processes must have zero mean");
    if (spec.kernel.kind() != CorrelationKernel::Kind::exponential)
        throw std::invalid_argument("sample_complex_path: exact sampler exists for exponential kernels only");

    const CorrelationKernel half =
        CorrelationKernel::exponential(0.5 * spec.kernel.variance(), spec.kernel.corr_time());
    const std::vector<double> re = detail::sample_centered_ou(half, grid, rng);
    const std::vector<double> im = detail::sample_centered_ou(half, grid, rng);

    ComplexProcessPath path;
    path.times = grid;
    path.values.resize(grid.size());
    path.running_integral.assign(grid.size(), cplx(0.0, 0.0));
    for (std::size_t k = 0; k < grid.size(); ++k) path.values[k] = cplx(re[k], im[k]);
    for (std::size_t k = 1; k < grid.size(); ++k) {
        const double h = grid[k] - grid[k - 1];
        path.running_integral[k] = path.running_integral[k - 1] +
            0.5 * h * (path.values[k - 1] + path.values[k]);
    }
    return path;
}

inline ComplexProcessPath sample_complex_path(const GaussianProcessSpec& spec,
                                              const std::vector<double>& grid,
                                              std::uint64_t seed, std::uint64_t stream = 0) {
    CounterRng rng(seed, stream);
    return sample_complex_path(spec, grid, rng);
}

// Complex path built from one real process by deterministic modulation,
// a(t) = amplitude * e^{i mod_freq t} * x(t). This is how the driven-ion
// coupling is realized; the result is NOT circular (its pseudo-correlation
// survives), which is exactly why that model carries pseudo-kernel terms.
inline ComplexProcessPath sample_modulated_real_path(const GaussianProcessSpec& real_spec,
                                                     cplx amplitude, double mod_freq,
                                                     const std::vector<double>& grid,
                                                     CounterRng& rng) {
    const ProcessPath base = sample_path(real_spec, grid, rng);
    if (!base.pointwise_defined)
        throw std::invalid_argument("sample_modulated_real_path: base process must be pointwise defined");

    ComplexProcessPath path;
    path.times = grid;
    path.values.resize(grid.size());
    path.running_integral.assign(grid.size(), cplx(0.0, 0.0));
    for (std::size_t k = 0; k < grid.size(); ++k)
        path.values[k] = amplitude * std::exp(cplx(0.0, mod_freq * grid[k])) * base.values[k];
    for (std::size_t k = 1; k < grid.size(); ++k) {
        const double h = grid[k] - grid[k - 1];
        path.running_integral[k] = path.running_integral[k - 1] +
            0.5 * h * (path.values[k - 1] + path.values[k]);
    }
    return path;
}

}  // namespace rhobar
