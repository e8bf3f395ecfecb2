#pragma once

// Correlation-scale primitives: Pearson correlation, Fisher transforms,
// Simpson quadrature and the integral z-to-r back-transform.

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>

#include "metacorr/special.hpp"

namespace metacorr {

// Correlations are clamped to this magnitude before any z-transform.
inline constexpr double kRClampBound = 0.999;

// ============================================================================
// Correlation and Fisher transforms
// ============================================================================

// Pearson product-moment correlation of two equal-length samples.
// Symmetric in its arguments and invariant under positive affine maps.
inline double pearson_r(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) {
        throw std::invalid_argument("pearson_r: length mismatch");
    }
    const std::size_t n = xs.size();
    if (n < 3) {
        throw std::invalid_argument("pearson_r: requires at least 3 pairs");
    }
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_x += xs[i];
        mean_y += ys[i];
    }
    mean_x /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - mean_x;
        const double dy = ys[i] - mean_y;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw std::invalid_argument("pearson_r: constant input");
    }
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

inline double clamp_r(double r, double bound = kRClampBound) {
    if (!(bound > 0.0 && bound < 1.0)) {
        throw std::invalid_argument("clamp_r: bound must lie in (0, 1)");
    }
    return std::clamp(r, -bound, bound);
}

// atanh(r); callers clamp first when |r| can reach 1.
inline double fisher_z(double r) {
    if (!(std::fabs(r) < 1.0)) {
        throw std::invalid_argument("fisher_z: requires |r| < 1, clamp first");
    }
    return std::atanh(r);
}

inline double inv_fisher(double z) {
    return std::tanh(z);
}

// ============================================================================
// Quadrature
// ============================================================================

struct QuadratureSpec {
    int subintervals = 150;  // even, per Simpson's rule
    double half_width_multiplier = 5.0;
};

// Composite Simpson approximation over equal panels.
template <typename FuncT>
inline double simpson_integrate(FuncT&& f, double a, double b,
                                const QuadratureSpec& spec = {}) {
    if (!(a < b)) {
        throw std::invalid_argument("simpson_integrate: requires a < b");
    }
    const int n = spec.subintervals;
    if (n < 2 || n % 2 != 0) {
        throw std::invalid_argument("simpson_integrate: subintervals must be even and >= 2");
    }
    const double h = (b - a) / n;
    double odds = 0.0;
    double evens = 0.0;
    for (int i = 1; i < n; i += 2) {
        odds += f(a + i * h);
    }
    for (int i = 2; i < n; i += 2) {
        evens += f(a + i * h);
    }
    return (f(a) + f(b) + 4.0 * odds + 2.0 * evens) * h / 3.0;
}

// Expected value of tanh(T) for T ~ N(mu_z, tau_z2), integrated over
// mu_z +- half_width_multiplier * tau_z. Degenerate mixing variance
// collapses to tanh(mu_z). Odd in mu_z and shrinks toward zero relative
// to tanh(mu_z) whenever tau_z2 > 0 and mu_z != 0.
inline double integral_z_to_r(double mu_z, double tau_z2,
                              const QuadratureSpec& spec = {}) {
    if (tau_z2 < 0.0) {
        throw std::invalid_argument("integral_z_to_r: negative variance");
    }
    if (tau_z2 < 1e-12) {
        return std::tanh(mu_z);
    }
    const double tau = std::sqrt(tau_z2);
    const double half = spec.half_width_multiplier * tau;
    const double inv_tau = 1.0 / tau;
    auto integrand = [&](double t) {
        return std::tanh(t) * normal_pdf((t - mu_z) * inv_tau) * inv_tau;
    };
    const double value = simpson_integrate(integrand, mu_z - half, mu_z + half, spec);
    return std::clamp(value, -1.0, 1.0);
}

// ============================================================================
// Small-sample adjustments
// ============================================================================

// Mean shift E(X) - mu of a normal truncated to [a, b].
inline double truncnorm_mean_shift(double mu, double sigma, double a, double b) {
    if (!(a < b)) {
        throw std::invalid_argument("truncnorm_mean_shift: requires a < b");
    }
    if (!(sigma > 0.0)) {
        throw std::invalid_argument("truncnorm_mean_shift: requires sigma > 0");
    }
    const double d1 = (a - mu) / sigma;
    const double d2 = (b - mu) / sigma;
    const double mass = normal_cdf(d2) - normal_cdf(d1);
    if (!(mass > 1e-300)) {
        throw std::runtime_error("truncnorm_mean_shift: truncation interval has vanishing mass");
    }
    return sigma * (normal_pdf(d1) - normal_pdf(d2)) / mass;
}

// Adds back the first-order negative bias of the sample correlation.
// Off by default everywhere; exposed behind explicit flags only.
inline double bias_corrected_r(double r, int n) {
    if (n < 4) {
        throw std::invalid_argument("bias_corrected_r: requires n >= 4");
    }
    const double corrected = r + r * (1.0 - r * r) / (2.0 * (n - 1.0));
    return std::clamp(corrected, -kRClampBound, kRClampBound);
}

}  // namespace metacorr
