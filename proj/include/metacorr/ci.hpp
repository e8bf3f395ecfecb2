#pragma once

// Confidence interval construction for pooled correlations: the classical
// z-interval, Hunter-Schmidt, Knapp-Hartung, wild bootstrap variants and
// leverage-adjusted sandwich estimators, each with its quantile and
// back-transform.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "metacorr/pooling.hpp"
#include "metacorr/rng.hpp"

namespace metacorr {

// ============================================================================
// Method tags
// ============================================================================

enum class CiMethod { HOVZ, HS, KH, WBS1, WBS2, WBS3, HC3, HC4 };

enum class Backtransform { TANH, INTEGRAL, NONE };

enum class GammaMode { ONE, KM1_OVER_KM3, KM2_OVER_KM3 };

inline constexpr std::array<CiMethod, 8> kAllMethods = {
    CiMethod::HOVZ, CiMethod::HS,   CiMethod::KH,  CiMethod::WBS1,
    CiMethod::WBS2, CiMethod::WBS3, CiMethod::HC3, CiMethod::HC4,
};

inline const char* method_name(CiMethod m) {
    switch (m) {
        case CiMethod::HOVZ: return "HOVz";
        case CiMethod::HS: return "HS";
        case CiMethod::KH: return "KH";
        case CiMethod::WBS1: return "WBS1";
        case CiMethod::WBS2: return "WBS2";
        case CiMethod::WBS3: return "WBS3";
        case CiMethod::HC3: return "HC3";
        case CiMethod::HC4: return "HC4";
    }
    return "?";
}

inline std::optional<CiMethod> parse_method(std::string_view name) {
    std::string upper;
    upper.reserve(name.size());
    for (char c : name) {
        upper.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
    if (upper == "HOVZ") return CiMethod::HOVZ;
    if (upper == "HS") return CiMethod::HS;
    if (upper == "KH") return CiMethod::KH;
    if (upper == "WBS1") return CiMethod::WBS1;
    if (upper == "WBS2") return CiMethod::WBS2;
    if (upper == "WBS3") return CiMethod::WBS3;
    if (upper == "HC3") return CiMethod::HC3;
    if (upper == "HC4") return CiMethod::HC4;
    return std::nullopt;
}

// Smallest study count a method accepts. The bootstrap variants need the
// gamma ratio to exist, everything z-based needs a heterogeneity estimate.
inline int min_k(CiMethod m) {
    switch (m) {
        case CiMethod::HS: return 1;
        case CiMethod::WBS1:
        case CiMethod::WBS2:
        case CiMethod::WBS3: return 4;
        default: return 2;
    }
}

// ============================================================================
// Result and options
// ============================================================================

struct BootstrapSpec {
    int reps = 1000;  // >= 2
    GammaMode gamma_mode = GammaMode::ONE;
    std::uint64_t rng_seed = 0;
};

struct CiResult {
    CiMethod method = CiMethod::HOVZ;
    double point_r = 0.0;
    double lower_r = 0.0;
    double upper_r = 0.0;
    double z_center = 0.0;  // correlation scale for the NONE back-transform
    double z_se = 0.0;
    double tau2_z = 0.0;
    double alpha = 0.05;
    Backtransform backtransform = Backtransform::TANH;
};

struct CiOptions {
    double alpha = 0.05;
    BootstrapSpec bootstrap;
    std::optional<Backtransform> backtransform_override;
    bool fixed_effect = false;  // forces tau2 = 0
    QuadratureSpec quadrature;
};

// ============================================================================
// Variance estimators
// ============================================================================

// (sum of weights)^-1
inline double naive_z_variance(const PooledZ& pooled) {
    if (pooled.weights.empty()) {
        throw std::invalid_argument("naive_z_variance: empty weights");
    }
    double sw = 0.0;
    for (double w : pooled.weights) sw += w;
    return 1.0 / sw;
}

// Weighted residual variance with divisor K - 1; invariant under weight
// rescaling.
inline double kh_variance(const std::vector<ZStudy>& zstudies, const PooledZ& pooled) {
    const std::size_t k = zstudies.size();
    if (k < 2) {
        throw std::invalid_argument("kh_variance: requires at least 2 studies");
    }
    double sw = 0.0;
    for (double w : pooled.weights) sw += w;
    double q = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double resid = zstudies[i].z - pooled.z_bar;
        q += (pooled.weights[i] / sw) * resid * resid;
    }
    return q / static_cast<double>(k - 1);
}

// Leverage-adjusted sandwich variance; variant 3 squares the reciprocal
// leverage complement, variant 4 raises it to min{4, x_jj / mean leverage}.
inline double hc_variance(const std::vector<ZStudy>& zstudies, const PooledZ& pooled,
                          int variant) {
    const std::size_t k = zstudies.size();
    if (k < 2) {
        throw std::invalid_argument("hc_variance: requires at least 2 studies");
    }
    if (variant != 3 && variant != 4) {
        throw std::invalid_argument("hc_variance: variant must be 3 or 4");
    }
    double sw = 0.0;
    for (double w : pooled.weights) sw += w;
    double mean_leverage = 0.0;
    for (double w : pooled.weights) mean_leverage += w / sw;
    mean_leverage /= static_cast<double>(k);
    double q = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double x_jj = pooled.weights[i] / sw;
        if (x_jj >= 1.0) {
            throw std::runtime_error("hc_variance: a single study dominates the weights");
        }
        const double resid = zstudies[i].z - pooled.z_bar;
        const double exponent =
            variant == 3 ? 2.0 : std::min(4.0, x_jj / mean_leverage);
        q += pooled.weights[i] * pooled.weights[i] * resid * resid *
             std::pow(1.0 - x_jj, -exponent);
    }
    return q / (sw * sw);
}

// Sample-size weighted dispersion of raw correlations with divisor K.
inline double hs_variance(const std::vector<StudySummary>& studies, double r_hs) {
    if (studies.empty()) {
        throw std::invalid_argument("hs_variance: empty input");
    }
    double sn = 0.0;
    double q = 0.0;
    for (const StudySummary& s : studies) {
        sn += s.n;
        q += s.n * (s.r - r_hs) * (s.r - r_hs);
    }
    return q / sn / static_cast<double>(studies.size());
}

inline double gamma_for(GammaMode mode, int k) {
    switch (mode) {
        case GammaMode::ONE:
            return 1.0;
        case GammaMode::KM1_OVER_KM3:
            if (k <= 3) throw std::invalid_argument("gamma_for: ratio mode requires K > 3");
            return (k - 1.0) / (k - 3.0);
        case GammaMode::KM2_OVER_KM3:
            if (k <= 3) throw std::invalid_argument("gamma_for: ratio mode requires K > 3");
            return (k - 2.0) / (k - 3.0);
    }
    throw std::invalid_argument("gamma_for: unknown mode");
}

// Residual-multiplier resampling variance of the pooled mean. Residuals
// are scaled by independent N(0, gamma) multipliers per (replicate, study),
// re-pooled with the original weights, and the sample variance of the
// replicate means (divisor B - 1) is returned. Multipliers are addressed
// by (rng_seed, replicate, study), so the value is independent of
// evaluation order and worker count.
inline double wild_bootstrap_variance(const std::vector<ZStudy>& zstudies,
                                      const PooledZ& pooled, const BootstrapSpec& spec) {
    const std::size_t k = zstudies.size();
    if (k < 2) {
        throw std::invalid_argument("wild_bootstrap_variance: requires at least 2 studies");
    }
    if (spec.reps < 2) {
        throw std::invalid_argument("wild_bootstrap_variance: requires B >= 2");
    }
    const double gamma = gamma_for(spec.gamma_mode, static_cast<int>(k));
    const double sqrt_gamma = std::sqrt(gamma);
    double sw = 0.0;
    for (double w : pooled.weights) sw += w;
    std::vector<double> resid(k);
    for (std::size_t i = 0; i < k; ++i) {
        resid[i] = pooled.z_bar - zstudies[i].z;
    }
    double mean = 0.0;
    double m2 = 0.0;
    for (int b = 0; b < spec.reps; ++b) {
        double s = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const double v = sqrt_gamma * normal_at(spec.rng_seed, static_cast<std::uint64_t>(b), i);
            s += pooled.weights[i] * (zstudies[i].z + resid[i] * v);
        }
        const double z_star = s / sw;
        const double delta = z_star - mean;
        mean += delta / (b + 1.0);
        m2 += delta * (z_star - mean);
    }
    return m2 / (spec.reps - 1.0);
}

// ============================================================================
// Interval assembly
// ============================================================================

// Center +- quantile * se on the z scale (t when df given, normal
// otherwise), then back-transformed. The NONE path treats the center and
// bounds as already living on the correlation scale. Both transforms are
// monotone, so the bound order survives; this is asserted.
inline CiResult build_ci(CiMethod method, double z_center, double se,
                         std::optional<int> df, double alpha, Backtransform bt,
                         double tau2_z, const QuadratureSpec& quadrature = {}) {
    if (se < 0.0) {
        throw std::invalid_argument("build_ci: negative se");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("build_ci: requires 0 < alpha < 1");
    }
    const double q = df.has_value() ? t_quantile(1.0 - alpha / 2.0, *df)
                                    : normal_quantile(1.0 - alpha / 2.0);
    const double lo_z = z_center - q * se;
    const double hi_z = z_center + q * se;
    CiResult out;
    out.method = method;
    out.z_center = z_center;
    out.z_se = se;
    out.tau2_z = tau2_z;
    out.alpha = alpha;
    out.backtransform = bt;
    switch (bt) {
        case Backtransform::TANH:
            out.point_r = std::tanh(z_center);
            out.lower_r = std::tanh(lo_z);
            out.upper_r = std::tanh(hi_z);
            break;
        case Backtransform::INTEGRAL:
            out.point_r = integral_z_to_r(z_center, tau2_z, quadrature);
            out.lower_r = integral_z_to_r(lo_z, tau2_z, quadrature);
            out.upper_r = integral_z_to_r(hi_z, tau2_z, quadrature);
            break;
        case Backtransform::NONE:
            out.point_r = std::clamp(z_center, -1.0, 1.0);
            out.lower_r = std::clamp(lo_z, -1.0, 1.0);
            out.upper_r = std::clamp(hi_z, -1.0, 1.0);
            break;
    }
    if (out.lower_r > out.upper_r) {
        throw std::logic_error("build_ci: bounds out of order after back-transform");
    }
    return out;
}

namespace detail {

inline GammaMode gamma_mode_for(CiMethod m) {
    switch (m) {
        case CiMethod::WBS1: return GammaMode::ONE;
        case CiMethod::WBS2: return GammaMode::KM1_OVER_KM3;
        case CiMethod::WBS3: return GammaMode::KM2_OVER_KM3;
        default: throw std::invalid_argument("gamma_mode_for: not a bootstrap method");
    }
}

// Per-method dispatch over a shared z-scale context.
inline CiResult ci_from_context(const std::vector<StudySummary>& studies,
                                const std::vector<ZStudy>& zstudies,
                                const PooledZ& pooled, CiMethod method,
                                const CiOptions& options) {
    const int k = static_cast<int>(studies.size());
    switch (method) {
        case CiMethod::HS: {
            const double r_hs = hs_pooled_r(studies);
            const double se = std::sqrt(hs_variance(studies, r_hs));
            return build_ci(method, r_hs, se, std::nullopt, options.alpha,
                            Backtransform::NONE, 0.0, options.quadrature);
        }
        case CiMethod::HOVZ: {
            const double se = std::sqrt(naive_z_variance(pooled));
            const Backtransform bt =
                options.backtransform_override.value_or(Backtransform::TANH);
            return build_ci(method, pooled.z_bar, se, std::nullopt, options.alpha, bt,
                            pooled.tau2, options.quadrature);
        }
        case CiMethod::KH: {
            const double se = std::sqrt(kh_variance(zstudies, pooled));
            const Backtransform bt =
                options.backtransform_override.value_or(Backtransform::INTEGRAL);
            return build_ci(method, pooled.z_bar, se, k - 1, options.alpha, bt,
                            pooled.tau2, options.quadrature);
        }
        case CiMethod::HC3:
        case CiMethod::HC4: {
            const int variant = method == CiMethod::HC3 ? 3 : 4;
            const double se = std::sqrt(hc_variance(zstudies, pooled, variant));
            const Backtransform bt =
                options.backtransform_override.value_or(Backtransform::INTEGRAL);
            return build_ci(method, pooled.z_bar, se, k - 1, options.alpha, bt,
                            pooled.tau2, options.quadrature);
        }
        case CiMethod::WBS1:
        case CiMethod::WBS2:
        case CiMethod::WBS3: {
            BootstrapSpec spec = options.bootstrap;
            spec.gamma_mode = gamma_mode_for(method);
            spec.rng_seed = stream_key(options.bootstrap.rng_seed,
                                       static_cast<std::uint64_t>(method), 0x77627356ULL);
            const double se = std::sqrt(wild_bootstrap_variance(zstudies, pooled, spec));
            const Backtransform bt =
                options.backtransform_override.value_or(Backtransform::INTEGRAL);
            return build_ci(method, pooled.z_bar, se, k - 1, options.alpha, bt,
                            pooled.tau2, options.quadrature);
        }
    }
    throw std::invalid_argument("ci_from_context: unknown method");
}

}  // namespace detail

// Facade over the per-method pipelines. Every z-based method shares one
// heterogeneity estimate, which also parameterizes the integral
// back-transform.
inline CiResult compute_ci(const std::vector<StudySummary>& studies, CiMethod method,
                           const CiOptions& options = {}) {
    const int k = static_cast<int>(studies.size());
    if (k < min_k(method)) {
        throw std::invalid_argument(std::string("compute_ci: ") + method_name(method) +
                                    " requires at least " + std::to_string(min_k(method)) +
                                    " studies, got " + std::to_string(k));
    }
    if (method == CiMethod::HS) {
        return detail::ci_from_context(studies, {}, {}, method, options);
    }
    const std::vector<ZStudy> zstudies = to_z_scale(studies);
    const double tau2 = options.fixed_effect ? 0.0 : sj_tau2(zstudies);
    const PooledZ pooled = iv_pooled(zstudies, tau2);
    return detail::ci_from_context(studies, zstudies, pooled, method, options);
}

// Batch variant sharing the z-scale context across methods. Methods whose
// study-count minimum is not met throw individually in compute_ci; here the
// caller is expected to have filtered them.
inline std::vector<CiResult> compute_cis(const std::vector<StudySummary>& studies,
                                         const std::vector<CiMethod>& methods,
                                         const CiOptions& options = {}) {
    std::vector<CiResult> out;
    out.reserve(methods.size());
    const int k = static_cast<int>(studies.size());
    for (CiMethod m : methods) {
        if (k < min_k(m)) {
            throw std::invalid_argument(std::string("compute_cis: ") + method_name(m) +
                                        " requires at least " + std::to_string(min_k(m)) +
                                        " studies, got " + std::to_string(k));
        }
    }
    std::vector<ZStudy> zstudies;
    PooledZ pooled;
    bool have_context = false;
    for (CiMethod m : methods) {
        if (m != CiMethod::HS && !have_context) {
            zstudies = to_z_scale(studies);
            const double tau2 = options.fixed_effect ? 0.0 : sj_tau2(zstudies);
            pooled = iv_pooled(zstudies, tau2);
            have_context = true;
        }
        out.push_back(detail::ci_from_context(studies, zstudies, pooled, m, options));
    }
    return out;
}

}  // namespace metacorr
