#pragma once

// Study-level containers, heterogeneity estimation and pooled estimates.

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "metacorr/stats.hpp"

namespace metacorr {

// One primary study: observed correlation and sample size.
struct StudySummary {
    double r = 0.0;
    int n = 0;
};

// Fisher-z representation with large-sample variance 1/(n-3).
struct ZStudy {
    double z = 0.0;
    double var_z = 0.0;
    int n = 0;
};

// Inverse-variance pooled mean together with the weights that produced it.
struct PooledZ {
    double z_bar = 0.0;
    std::vector<double> weights;
    double tau2 = 0.0;
    int k = 0;
};

// ============================================================================
// Scale conversion
// ============================================================================

inline std::vector<ZStudy> to_z_scale(const std::vector<StudySummary>& studies) {
    std::vector<ZStudy> out;
    out.reserve(studies.size());
    for (std::size_t i = 0; i < studies.size(); ++i) {
        const StudySummary& s = studies[i];
        if (s.n < 4) {
            throw std::invalid_argument("to_z_scale: study " + std::to_string(i + 1) +
                                        " has n < 4");
        }
        const double rc = clamp_r(s.r);
        out.push_back({std::atanh(rc), 1.0 / (s.n - 3.0), s.n});
    }
    return out;
}

// ============================================================================
// Heterogeneity
// ============================================================================

namespace detail {

// Two-step dispersion estimate shared by both scales: seed with the crude
// 1/K dispersion around the unweighted mean, reweight by
// w_i = tau2_0 / (v_i + tau2_0), then take the weighted mean square with
// divisor K - 1. Zero initial dispersion short-circuits to 0.
inline double sj_two_step(const std::vector<double>& y, const std::vector<double>& v) {
    const std::size_t k = y.size();
    double mean = 0.0;
    for (double yi : y) mean += yi;
    mean /= static_cast<double>(k);
    double tau2_0 = 0.0;
    for (double yi : y) tau2_0 += (yi - mean) * (yi - mean);
    tau2_0 /= static_cast<double>(k);
    if (tau2_0 == 0.0) return 0.0;
    double sw = 0.0;
    double swy = 0.0;
    std::vector<double> w(k);
    for (std::size_t i = 0; i < k; ++i) {
        w[i] = tau2_0 / (v[i] + tau2_0);
        sw += w[i];
        swy += w[i] * y[i];
    }
    const double mu = swy / sw;
    double q = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        q += w[i] * (y[i] - mu) * (y[i] - mu);
    }
    return q / static_cast<double>(k - 1);
}

}  // namespace detail

// Sidik-Jonkman two-step heterogeneity estimate on the z scale.
inline double sj_tau2(const std::vector<ZStudy>& zstudies) {
    if (zstudies.size() < 2) {
        throw std::invalid_argument("sj_tau2: requires at least 2 studies");
    }
    std::vector<double> y;
    std::vector<double> v;
    y.reserve(zstudies.size());
    v.reserve(zstudies.size());
    for (const ZStudy& zs : zstudies) {
        y.push_back(zs.z);
        v.push_back(zs.var_z);
    }
    return detail::sj_two_step(y, v);
}

// Sidik-Jonkman two-step estimate on the correlation scale, with the
// large-sample variance (1 - r^2)^2 / (n - 1) of r.
inline double sj_tau2_r(const std::vector<StudySummary>& studies) {
    if (studies.size() < 2) {
        throw std::invalid_argument("sj_tau2_r: requires at least 2 studies");
    }
    std::vector<double> y;
    std::vector<double> v;
    y.reserve(studies.size());
    v.reserve(studies.size());
    for (const StudySummary& s : studies) {
        if (s.n < 4) {
            throw std::invalid_argument("sj_tau2_r: requires n >= 4");
        }
        const double rc = clamp_r(s.r);
        const double one_minus = 1.0 - rc * rc;
        y.push_back(rc);
        v.push_back(one_minus * one_minus / (s.n - 1.0));
    }
    return detail::sj_two_step(y, v);
}

// ============================================================================
// Pooling
// ============================================================================

// Inverse-variance pooled mean with weights (var_z_i + tau2)^-1.
// With tau2 = 0 the summed weights equal N - 3K.
inline PooledZ iv_pooled(const std::vector<ZStudy>& zstudies, double tau2) {
    if (zstudies.empty()) {
        throw std::invalid_argument("iv_pooled: empty input");
    }
    if (tau2 < 0.0) {
        throw std::invalid_argument("iv_pooled: negative tau2");
    }
    PooledZ pooled;
    pooled.tau2 = tau2;
    pooled.k = static_cast<int>(zstudies.size());
    pooled.weights.reserve(zstudies.size());
    double sw = 0.0;
    double swz = 0.0;
    for (const ZStudy& zs : zstudies) {
        const double w = 1.0 / (zs.var_z + tau2);
        pooled.weights.push_back(w);
        sw += w;
        swz += w * zs.z;
    }
    pooled.z_bar = swz / sw;
    return pooled;
}

// Sample-size weighted mean of raw correlations.
inline double hs_pooled_r(const std::vector<StudySummary>& studies) {
    if (studies.empty()) {
        throw std::invalid_argument("hs_pooled_r: empty input");
    }
    double sn = 0.0;
    double snr = 0.0;
    for (const StudySummary& s : studies) {
        sn += s.n;
        snr += s.n * s.r;
    }
    return snr / sn;
}

// Asymptotic interval r +- u_{1-alpha/2} (1 - r^2) / sqrt(N) on the
// correlation scale, clamped to [-1, 1]. Used for pooled individual data
// and the single-study setting.
inline std::pair<double, double> pooled_ipd_ci(double r_pool, long n_total, double alpha) {
    if (n_total < 4) {
        throw std::invalid_argument("pooled_ipd_ci: requires n_total >= 4");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("pooled_ipd_ci: requires 0 < alpha < 1");
    }
    const double u = normal_quantile(1.0 - alpha / 2.0);
    const double half = u * (1.0 - r_pool * r_pool) / std::sqrt(static_cast<double>(n_total));
    const double lo = std::clamp(r_pool - half, -1.0, 1.0);
    const double hi = std::clamp(r_pool + half, -1.0, 1.0);
    return {lo, hi};
}

}  // namespace metacorr
