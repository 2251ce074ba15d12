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
#include <string>
#include <utility>
#include <vector>

#include "rhobar/complex_matrix.hpp"
#include "rhobar/hermitian_eig.hpp"

namespace rhobar {

namespace detail {

// x + expm1(-x), i.e. x - 1 + e^{-x}. Both closed-form kernel integrals need
// this combination, which cancels badly for small x; a short series keeps
// full relative precision there.
inline double x_plus_expm1_neg(double x) {
    if (std::abs(x) < 1e-4) {
        return x * x * (0.5 + x * (-1.0 / 6.0 + x * (1.0 / 24.0 - x / 120.0)));
    }
    return x + std::expm1(-x);
}

}  // namespace detail

// Stationary autocovariance kernel of the driving process, K(t - t').
// Three shapes: exponential (Ornstein-Uhlenbeck), white noise (a delta
// function with given strength), and a tabulated even function of the lag.
class CorrelationKernel {
public:
    enum class Kind { exponential, white, tabulated };

    // K(tau) = variance * exp(-|tau|/corr_time)
    static CorrelationKernel exponential(double variance, double corr_time) {
        if (!(variance >= 0.0))
            throw std::invalid_argument("CorrelationKernel: variance must be >= 0, got "
                + std::to_string(variance));
        if (!(corr_time > 0.0))
            throw std::invalid_argument("CorrelationKernel: corr_time must be > 0, got "
                + std::to_string(corr_time));
        CorrelationKernel k;
        k.kind_ = Kind::exponential;
        k.variance_ = variance;
        k.corr_time_ = corr_time;
        return k;
    }

    // K(tau) = strength * delta(tau)
    static CorrelationKernel white(double strength) {
        if (!(strength >= 0.0))
            throw std::invalid_argument("CorrelationKernel: white-noise strength must be >= 0, got "
                + std::to_string(strength));
        CorrelationKernel k;
        k.kind_ = Kind::white;
        k.strength_ = strength;
        return k;
    }

    // Even kernel given on lags >= 0, linearly interpolated, zero beyond the
    // last lag. The Gram matrix on the lag grid is required to be positive
    // semidefinite (up to -1e-8 relative), which catches non-admissible
    // covariance tables at construction.
    static CorrelationKernel tabulated(std::vector<double> lags, std::vector<double> values) {
        if (lags.size() != values.size() || lags.size() < 2)
            throw std::invalid_argument("CorrelationKernel: tabulated needs >= 2 matching lag/value pairs");
        if (lags.front() != 0.0)
            throw std::invalid_argument("CorrelationKernel: tabulated lags must start at 0");
        for (std::size_t i = 1; i < lags.size(); ++i)
            if (!(lags[i] > lags[i - 1]))
                throw std::invalid_argument("CorrelationKernel: tabulated lags must be strictly increasing");

        CorrelationKernel k;
        k.kind_ = Kind::tabulated;
        k.lags_ = std::move(lags);
        k.values_ = std::move(values);
        k.variance_ = k.values_.front();

        const std::size_t n = k.lags_.size();
        ComplexMatrix gram(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                gram(i, j) = k.interp(std::abs(k.lags_[i] - k.lags_[j]));
        double scale = 0.0;
        for (double v : k.values_) scale = std::max(scale, std::abs(v));
        if (min_eigenvalue(gram) < -1e-8 * std::max(1.0, scale))
            throw std::invalid_argument("CorrelationKernel: tabulated kernel is not positive semidefinite");
        return k;
    }

    Kind kind() const { return kind_; }
    double variance() const { return variance_; }
    double corr_time() const { return corr_time_; }
    double strength() const { return strength_; }

    // Width of the sampled support (tabulated kernels only).
    double last_lag() const {
        if (kind_ != Kind::tabulated)
            throw std::logic_error("CorrelationKernel::last_lag: kernel is not tabulated");
        return lags_.back();
    }

    // K(t - s); undefined pointwise for white noise
    double eval(double t, double s) const {
        const double tau = std::abs(t - s);
        switch (kind_) {
            case Kind::exponential:
                return variance_ * std::exp(-tau / corr_time_);
            case Kind::tabulated:
                return interp(tau);
            case Kind::white:
                throw std::logic_error("CorrelationKernel: white noise has no pointwise value; "
                                       "use the integral forms");
        }
        return 0.0;
    }

    // int_{t0}^{t} K(t, t') dt'
    double time_integral(double t, double t0) const {
        require_order(t, t0, "time_integral");
        const double dt = t - t0;
        switch (kind_) {
            case Kind::exponential:
                return variance_ * corr_time_ * -std::expm1(-dt / corr_time_);
            case Kind::white:
                // the delta sits at the interval endpoint, so half its mass
                // is inside; this symmetric-limit convention is what makes
                // the white-noise master equation reproduce the exact decay
                return 0.5 * strength_;
            case Kind::tabulated:
                return quadrature([this](double tau) { return interp(tau); }, dt);
        }
        return 0.0;
    }

    // (int_0^{t-t0} K(tau) cos(omega0 tau) dtau, same with sin); the
    // in-phase and quadrature weights of the kernel at frequency omega0
    std::pair<double, double> modulated_integrals(double omega0, double t, double t0) const {
        require_order(t, t0, "modulated_integrals");
        const double dt = t - t0;
        switch (kind_) {
            case Kind::exponential: {
                const double T = corr_time_;
                const double wT = omega0 * T;
                const double denom = 1.0 + wT * wT;
                const double damp = std::exp(-dt / T);
                const double cwt = std::cos(omega0 * dt);
                const double swt = std::sin(omega0 * dt);
                const double cosine = variance_ * T / denom * (damp * (wT * swt - cwt) + 1.0);
                const double sine = variance_ * T / denom * (wT - damp * (swt + wT * cwt));
                return {cosine, sine};
            }
            case Kind::white:
                return {0.5 * strength_, 0.0};
            case Kind::tabulated: {
                const double c = quadrature(
                    [this, omega0](double tau) { return interp(tau) * std::cos(omega0 * tau); }, dt);
                const double s = quadrature(
                    [this, omega0](double tau) { return interp(tau) * std::sin(omega0 * tau); }, dt);
                return {c, s};
            }
        }
        return {0.0, 0.0};
    }

    // Var[int_{t0}^t a(t') dt'] for the centered process
    double integral_variance(double t, double t0) const {
        require_order(t, t0, "integral_variance");
        const double dt = t - t0;
        switch (kind_) {
            case Kind::exponential: {
                const double T = corr_time_;
                return 2.0 * variance_ * T * T * detail::x_plus_expm1_neg(dt / T);
            }
            case Kind::white:
                return strength_ * dt;
            case Kind::tabulated:
                // double integral of K(u - v) over the square, folded to
                // 2 int_0^dt (dt - tau) K(tau) dtau
                return 2.0 * quadrature(
                    [this, dt](double tau) { return (dt - tau) * interp(tau); }, dt);
        }
        return 0.0;
    }

private:
    static void require_order(double t, double t0, const char* who) {
        if (t < t0)
            throw std::invalid_argument(std::string("CorrelationKernel::") + who
                + ": t < t0 (" + std::to_string(t) + " < " + std::to_string(t0) + ")");
    }

    double interp(double tau) const {
        if (tau <= 0.0) return values_.front();
        if (tau >= lags_.back()) return 0.0;
        std::size_t hi = 1;
        while (lags_[hi] < tau) ++hi;
        const double w = (tau - lags_[hi - 1]) / (lags_[hi] - lags_[hi - 1]);
        return values_[hi - 1] * (1.0 - w) + values_[hi] * w;
    }

    // composite Simpson for the tabulated branch; the grid is fine enough
    // that the piecewise-linear interpolant is resolved to well below the
    // documented 1e-8 relative accuracy of the closed forms
    template <typename Fn>
    double quadrature(Fn&& f, double dt) const {
        if (dt <= 0.0) return 0.0;
        const std::size_t n = 8192;  // even
        const double h = dt / static_cast<double>(n);
        double sum = f(0.0) + f(dt);
        for (std::size_t i = 1; i < n; ++i)
            sum += f(static_cast<double>(i) * h) * (i % 2 == 1 ? 4.0 : 2.0);
        return sum * h / 3.0;
    }

    Kind kind_ = Kind::exponential;
    double variance_ = 0.0;
    double corr_time_ = 1.0;
    double strength_ = 0.0;
    std::vector<double> lags_;
    std::vector<double> values_;
};

}  // namespace rhobar
