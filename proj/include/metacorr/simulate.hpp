#pragma once

// Monte Carlo coverage study: between-study effect models, within-study
// sampling, scenario execution with deterministic chunked parallelism, the
// default scenario grid, and aggregation across size settings.

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "metacorr/ci.hpp"
#include "metacorr/datasets.hpp"
#include "metacorr/pooling.hpp"
#include "metacorr/rng.hpp"
#include "metacorr/stats.hpp"

namespace metacorr {

// ============================================================================
// Effect-size models
// ============================================================================

// TRUNCNORM and BETA describe between-study distributions of the true
// correlation; the K1 models describe a single study analyzed from raw pairs.
enum class Model { TRUNCNORM, BETA, LOGNORMAL_K1, NORMAL_K1 };

inline const char* model_name(Model m) {
    switch (m) {
        case Model::TRUNCNORM: return "truncnorm";
        case Model::BETA: return "beta";
        case Model::LOGNORMAL_K1: return "lognormal_k1";
        case Model::NORMAL_K1: return "normal_k1";
    }
    return "?";
}

inline std::optional<Model> parse_model(std::string_view name) {
    std::string lower;
    lower.reserve(name.size());
    for (char c : name) {
        lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    if (lower == "truncnorm") return Model::TRUNCNORM;
    if (lower == "beta") return Model::BETA;
    if (lower == "lognormal_k1") return Model::LOGNORMAL_K1;
    if (lower == "normal_k1") return Model::NORMAL_K1;
    return std::nullopt;
}

inline constexpr int kRejectionBudget = 1'000'000;
inline constexpr std::uint64_t kDataSalt = 0xD47AULL;
inline constexpr std::uint64_t kWbsSalt = 0x5742ULL;

// Shape parameters of the beta distribution whose affine image on (-1, 1)
// has mean rho and variance tau2. Requires tau2 < 1 - rho^2.
inline std::pair<double, double> beta_params(double rho, double tau2) {
    if (!(tau2 > 0.0)) {
        throw std::invalid_argument("beta_params: requires tau2 > 0");
    }
    if (std::fabs(rho) >= 1.0) {
        throw std::invalid_argument("beta_params: requires |rho| < 1");
    }
    if (tau2 >= (1.0 - rho) * (1.0 + rho)) {
        throw std::invalid_argument("beta_params: tau2 must be below 1 - rho^2");
    }
    const double a = ((1.0 - rho) * (1.0 + rho) - tau2) / tau2 * (1.0 + rho) / 2.0;
    const double b = (1.0 - rho) / (1.0 + rho) * a;
    return {a, b};
}

// One true correlation from the between-study distribution. tau = 0 is the
// homogeneous case for every model and consumes no randomness.
inline double draw_true_rho(Model model, double rho, double tau, RngStream& rng) {
    if (tau <= 0.0) return rho;
    switch (model) {
        case Model::TRUNCNORM:
            for (int attempt = 0; attempt < kRejectionBudget; ++attempt) {
                const double x = rho + tau * rng.normal();
                if (std::fabs(x) <= kRClampBound) return x;
            }
            throw std::runtime_error("draw_true_rho: rejection budget exhausted");
        case Model::BETA: {
            const auto [a, b] = beta_params(rho, tau * tau);
            const double x = rng.beta(a, b);
            return std::clamp(2.0 * x - 1.0, -kRClampBound, kRClampBound);
        }
        default:
            throw std::invalid_argument(
                "draw_true_rho: single-study models take tau = 0");
    }
}

// Sample correlation of n bivariate normal pairs with population correlation
// rho_true. The z-scale shortcut replaces the pair sample with one draw of
// the Fisher statistic.
inline double draw_study_r(double rho_true, int n, RngStream& rng,
                           bool z_scale_draw = false) {
    if (n < 4) {
        throw std::invalid_argument("draw_study_r: requires n >= 4");
    }
    if (z_scale_draw) {
        const double z = fisher_z(clamp_r(rho_true)) + rng.normal() / std::sqrt(n - 3.0);
        return std::tanh(z);
    }
    static thread_local std::vector<double> xs, ys;
    xs.resize(static_cast<std::size_t>(n));
    ys.resize(static_cast<std::size_t>(n));
    const double s = std::sqrt(1.0 - rho_true * rho_true);
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal();
        xs[static_cast<std::size_t>(i)] = x;
        ys[static_cast<std::size_t>(i)] = rho_true * x + s * rng.normal();
    }
    return pearson_r(xs, ys);
}

// Sample correlation of one raw-pair study. The lognormal variant builds
// each margin as a standardized lognormal and mixes them linearly, so the
// population correlation is exactly rho while both margins stay skewed.
inline double draw_k1_r(Model model, double rho, int n, RngStream& rng) {
    if (n < 4) {
        throw std::invalid_argument("draw_k1_r: requires n >= 4");
    }
    static thread_local std::vector<double> xs, ys;
    xs.resize(static_cast<std::size_t>(n));
    ys.resize(static_cast<std::size_t>(n));
    const double s = std::sqrt(1.0 - rho * rho);
    if (model == Model::NORMAL_K1) {
        for (int i = 0; i < n; ++i) {
            const double x = rng.normal();
            xs[static_cast<std::size_t>(i)] = x;
            ys[static_cast<std::size_t>(i)] = rho * x + s * rng.normal();
        }
    } else if (model == Model::LOGNORMAL_K1) {
        const double c_mean = std::exp(0.5);
        const double c_sd = std::sqrt(std::exp(2.0) - std::exp(1.0));
        for (int i = 0; i < n; ++i) {
            const double l1 = (std::exp(rng.normal()) - c_mean) / c_sd;
            const double l2 = (std::exp(rng.normal()) - c_mean) / c_sd;
            xs[static_cast<std::size_t>(i)] = l1;
            ys[static_cast<std::size_t>(i)] = rho * l1 + s * l2;
        }
    } else {
        throw std::invalid_argument("draw_k1_r: not a single-study model");
    }
    return pearson_r(xs, ys);
}

// ============================================================================
// Scenarios
// ============================================================================

struct Scenario {
    std::string id;
    Model model = Model::TRUNCNORM;
    double rho = 0.0;
    double tau = 0.0;  // between-study standard deviation
    int k = 0;
    std::vector<int> n_vector;
    int reps = 2000;
    double alpha = 0.05;
    std::uint64_t seed = 20210916ULL;
    std::vector<CiMethod> methods{kAllMethods.begin(), kAllMethods.end()};
    BootstrapSpec bootstrap;
    bool z_scale_draw = false;
    std::optional<Backtransform> backtransform;
};

struct MethodResult {
    std::string method;
    double coverage = 0.0;
    double mean_length = 0.0;
    long failures = 0;
    double mc_se = 0.0;
};

struct ScenarioResult {
    std::string scenario_id;
    Model model = Model::TRUNCNORM;
    double rho = 0.0;
    double tau = 0.0;
    int k = 0;
    std::string n_pattern;
    std::vector<MethodResult> rows;
};

inline double mc_se(double p, long n_used) {
    return n_used > 0 ? std::sqrt(p * (1.0 - p) / static_cast<double>(n_used)) : 0.0;
}

inline std::string join_sizes(const std::vector<int>& ns) {
    std::string out;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        if (i) out += ";";
        out += std::to_string(ns[i]);
    }
    return out;
}

namespace detail {

inline bool is_k1_model(Model m) {
    return m == Model::LOGNORMAL_K1 || m == Model::NORMAL_K1;
}

struct MethodAccum {
    long covered = 0;
    double sum_length = 0.0;
    long failures = 0;
    long used = 0;
};

inline void validate_scenario(const Scenario& s) {
    const std::string where = "scenario " + (s.id.empty() ? std::string("?") : s.id);
    if (s.k <= 0) throw std::invalid_argument(where + ": k must be positive");
    if (static_cast<int>(s.n_vector.size()) != s.k) {
        throw std::invalid_argument(where + ": n_vector length must equal k");
    }
    for (int n : s.n_vector) {
        if (n < 4) throw std::invalid_argument(where + ": every n must be at least 4");
    }
    if (s.reps < 1) throw std::invalid_argument(where + ": reps must be positive");
    if (!(s.alpha > 0.0 && s.alpha < 1.0)) {
        throw std::invalid_argument(where + ": alpha must lie in (0, 1)");
    }
    if (!(s.tau >= 0.0)) throw std::invalid_argument(where + ": tau must be nonnegative");
    if (is_k1_model(s.model)) {
        if (s.k != 1) {
            throw std::invalid_argument(where + ": single-study models require k = 1");
        }
        if (s.tau != 0.0) {
            throw std::invalid_argument(where + ": single-study models require tau = 0");
        }
    } else {
        if (s.k < 2) {
            throw std::invalid_argument(where + ": meta-analysis models require k >= 2");
        }
        if (s.methods.empty()) {
            throw std::invalid_argument(where + ": no methods requested");
        }
        for (CiMethod m : s.methods) {
            if (s.k < min_k(m)) {
                throw std::invalid_argument(where + ": " + method_name(m) +
                                            " requires at least " +
                                            std::to_string(min_k(m)) + " studies");
            }
        }
        if (s.model == Model::BETA && s.tau > 0.0) {
            beta_params(s.rho, s.tau * s.tau);
        }
    }
}

}  // namespace detail

// Runs one scenario. Replicates are processed in fixed chunks of 64 whose
// partial sums are merged in chunk order, and every random draw is addressed
// by (seed, replicate), so the result is identical for any worker count.
inline ScenarioResult run_scenario(const Scenario& s, int threads = 1) {
    detail::validate_scenario(s);
    const bool k1 = detail::is_k1_model(s.model);
    const std::size_t num_methods = k1 ? 1 : s.methods.size();

    constexpr int kChunk = 64;
    const int num_chunks = (s.reps + kChunk - 1) / kChunk;
    std::vector<std::vector<detail::MethodAccum>> chunk_acc(
        static_cast<std::size_t>(num_chunks),
        std::vector<detail::MethodAccum>(num_methods));

    auto run_replicate = [&](int j, std::vector<detail::MethodAccum>& acc) {
        RngStream gen(s.seed, static_cast<std::uint64_t>(j), kDataSalt);
        if (k1) {
            double r = 0.0;
            try {
                r = draw_k1_r(s.model, s.rho, s.n_vector[0], gen);
            } catch (const std::exception&) {
                acc[0].failures += 1;
                return;
            }
            const auto [lo, hi] =
                pooled_ipd_ci(r, static_cast<long>(s.n_vector[0]), s.alpha);
            acc[0].used += 1;
            if (lo <= s.rho && s.rho <= hi) acc[0].covered += 1;
            acc[0].sum_length += hi - lo;
            return;
        }
        std::vector<StudySummary> studies;
        studies.reserve(static_cast<std::size_t>(s.k));
        bool gen_ok = true;
        try {
            for (int i = 0; i < s.k; ++i) {
                const double rho_i = draw_true_rho(s.model, s.rho, s.tau, gen);
                const double r_i = draw_study_r(rho_i, s.n_vector[static_cast<std::size_t>(i)],
                                                gen, s.z_scale_draw);
                studies.push_back(StudySummary{r_i, s.n_vector[static_cast<std::size_t>(i)]});
            }
        } catch (const std::exception&) {
            gen_ok = false;
        }
        if (!gen_ok) {
            for (auto& a : acc) a.failures += 1;
            return;
        }
        CiOptions opts;
        opts.alpha = s.alpha;
        opts.bootstrap = s.bootstrap;
        opts.bootstrap.rng_seed = stream_key(s.seed, static_cast<std::uint64_t>(j), kWbsSalt);
        opts.backtransform_override = s.backtransform;
        for (std::size_t m = 0; m < s.methods.size(); ++m) {
            try {
                const CiResult res = compute_ci(studies, s.methods[m], opts);
                acc[m].used += 1;
                if (res.lower_r <= s.rho && s.rho <= res.upper_r) acc[m].covered += 1;
                acc[m].sum_length += res.upper_r - res.lower_r;
            } catch (const std::exception&) {
                acc[m].failures += 1;
            }
        }
    };

    auto run_chunk = [&](int c) {
        const int begin = c * kChunk;
        const int end = std::min(s.reps, begin + kChunk);
        for (int j = begin; j < end; ++j) {
            run_replicate(j, chunk_acc[static_cast<std::size_t>(c)]);
        }
    };

    const int workers = std::clamp(threads, 1, num_chunks);
    if (workers <= 1) {
        for (int c = 0; c < num_chunks; ++c) run_chunk(c);
    } else {
        std::atomic<int> next{0};
        auto worker = [&]() {
            for (;;) {
                const int c = next.fetch_add(1);
                if (c >= num_chunks) break;
                run_chunk(c);
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    ScenarioResult out;
    out.scenario_id = s.id;
    out.model = s.model;
    out.rho = s.rho;
    out.tau = s.tau;
    out.k = s.k;
    out.n_pattern = join_sizes(s.n_vector);
    out.rows.resize(num_methods);
    for (std::size_t m = 0; m < num_methods; ++m) {
        detail::MethodAccum total;
        for (int c = 0; c < num_chunks; ++c) {
            const detail::MethodAccum& a = chunk_acc[static_cast<std::size_t>(c)][m];
            total.covered += a.covered;
            total.sum_length += a.sum_length;
            total.failures += a.failures;
            total.used += a.used;
        }
        MethodResult row;
        row.method = k1 ? "IPD" : method_name(s.methods[m]);
        row.failures = total.failures;
        if (total.used > 0) {
            row.coverage = static_cast<double>(total.covered) / static_cast<double>(total.used);
            row.mean_length = total.sum_length / static_cast<double>(total.used);
            row.mc_se = mc_se(row.coverage, total.used);
        }
        out.rows[m] = std::move(row);
    }
    return out;
}

// ============================================================================
// Default grid
// ============================================================================

struct GridConfig {
    int reps = 2000;
    double alpha = 0.05;
    std::uint64_t seed = 20210916ULL;
    std::vector<CiMethod> methods{kAllMethods.begin(), kAllMethods.end()};
    BootstrapSpec bootstrap;
    bool z_scale_draw = false;
    std::optional<Backtransform> backtransform;
};

namespace detail {

inline std::vector<int> tiled_sizes(int k, int scale) {
    static const int base[5] = {15, 16, 19, 23, 27};
    std::vector<int> out(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        out[static_cast<std::size_t>(i)] = base[i % 5] * scale;
    }
    return out;
}

}  // namespace detail

// The ten study-size settings: balanced small and large studies at
// K in {5, 10, 20, 40}, one strongly unbalanced five-study setting, and one
// large twenty-study setting.
inline std::vector<std::vector<int>> default_size_settings() {
    std::vector<std::vector<int>> settings;
    for (int k : {5, 10, 20, 40}) {
        for (int scale : {1, 4}) {
            settings.push_back(detail::tiled_sizes(k, scale));
        }
    }
    settings.push_back({23, 19, 250, 330, 29});
    const int large[10] = {210, 240, 350, 220, 290, 280, 340, 400, 380, 290};
    std::vector<int> s20;
    s20.reserve(20);
    for (int rep = 0; rep < 2; ++rep) {
        for (int v : large) s20.push_back(v);
    }
    settings.push_back(std::move(s20));
    return settings;
}

// 480 scenarios: 2 models x 3 tau x 8 rho x 10 size settings. Cell seeds
// depend on (tau, rho, size setting) but not on the model, so both models
// share identical streams where tau = 0 and the models coincide.
inline std::vector<Scenario> default_grid(const GridConfig& cfg = {}) {
    const double taus[3] = {0.0, 0.16, 0.4};
    const double rhos[8] = {0.0, 0.1, 0.3, 0.5, 0.6, 0.7, 0.8, 0.9};
    const std::vector<std::vector<int>> settings = default_size_settings();
    std::vector<Scenario> out;
    out.reserve(480);
    int idx = 0;
    for (Model model : {Model::TRUNCNORM, Model::BETA}) {
        for (int ti = 0; ti < 3; ++ti) {
            for (int ri = 0; ri < 8; ++ri) {
                for (int si = 0; si < 10; ++si) {
                    Scenario s;
                    ++idx;
                    char buf[16];
                    std::snprintf(buf, sizeof(buf), "s%03d", idx);
                    s.id = buf;
                    s.model = model;
                    s.rho = rhos[ri];
                    s.tau = taus[ti];
                    s.n_vector = settings[static_cast<std::size_t>(si)];
                    s.k = static_cast<int>(s.n_vector.size());
                    s.reps = cfg.reps;
                    s.alpha = cfg.alpha;
                    s.seed = stream_key(
                        cfg.seed,
                        (static_cast<std::uint64_t>(ti) * 8 + static_cast<std::uint64_t>(ri)) * 10 +
                            static_cast<std::uint64_t>(si),
                        0xCE11ULL);
                    s.methods = cfg.methods;
                    s.bootstrap = cfg.bootstrap;
                    s.z_scale_draw = cfg.z_scale_draw;
                    s.backtransform = cfg.backtransform;
                    out.push_back(std::move(s));
                }
            }
        }
    }
    return out;
}

// ============================================================================
// Aggregation
// ============================================================================

struct AggregateRow {
    Model model = Model::TRUNCNORM;
    double rho = 0.0;
    double tau = 0.0;
    std::string method;
    double coverage = 0.0;
    double mean_length = 0.0;
    long failures = 0;
    double mc_se = 0.0;
    int cells = 0;
};

// Collapses scenario rows over size settings within each (model, tau, rho,
// method) cell: plain means of coverage and length, summed failures, and the
// standard error of the mean of independent cell estimates.
inline std::vector<AggregateRow> aggregate_by_effect(
    const std::vector<ScenarioResult>& results) {
    struct Accum {
        AggregateRow row;
        double sum_cov = 0.0;
        double sum_len = 0.0;
        double sum_se2 = 0.0;
    };
    std::vector<Accum> acc;
    for (const ScenarioResult& res : results) {
        for (const MethodResult& mr : res.rows) {
            Accum* slot = nullptr;
            for (Accum& a : acc) {
                if (a.row.model == res.model && a.row.rho == res.rho &&
                    a.row.tau == res.tau && a.row.method == mr.method) {
                    slot = &a;
                    break;
                }
            }
            if (!slot) {
                acc.emplace_back();
                slot = &acc.back();
                slot->row.model = res.model;
                slot->row.rho = res.rho;
                slot->row.tau = res.tau;
                slot->row.method = mr.method;
            }
            slot->sum_cov += mr.coverage;
            slot->sum_len += mr.mean_length;
            slot->sum_se2 += mr.mc_se * mr.mc_se;
            slot->row.failures += mr.failures;
            slot->row.cells += 1;
        }
    }
    std::vector<AggregateRow> out;
    out.reserve(acc.size());
    for (Accum& a : acc) {
        const double cells = static_cast<double>(a.row.cells);
        a.row.coverage = a.sum_cov / cells;
        a.row.mean_length = a.sum_len / cells;
        a.row.mc_se = std::sqrt(a.sum_se2) / cells;
        out.push_back(std::move(a.row));
    }
    return out;
}

// ============================================================================
// Grid CSV
// ============================================================================

inline std::string grid_to_csv(const std::vector<Scenario>& grid) {
    std::string out = "id,model,rho,tau,k,n_vector,reps,alpha,seed\n";
    char buf[64];
    for (const Scenario& s : grid) {
        out += s.id;
        out += ",";
        out += model_name(s.model);
        std::snprintf(buf, sizeof(buf), ",%.10g,%.10g,%d,", s.rho, s.tau, s.k);
        out += buf;
        out += join_sizes(s.n_vector);
        std::snprintf(buf, sizeof(buf), ",%d,%.10g,%llu", s.reps, s.alpha,
                      static_cast<unsigned long long>(s.seed));
        out += buf;
        out += "\n";
    }
    return out;
}

inline void save_grid_csv(const std::vector<Scenario>& grid, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write '" + path + "'");
    }
    out << grid_to_csv(grid);
}

// Parses a scenario grid. Method lists, bootstrap settings and sampling
// flags are not stored in the file; they keep their defaults for the caller
// to override.
inline std::vector<Scenario> parse_grid_csv(const std::string& content) {
    std::istringstream in(content);
    std::string line;
    std::size_t lineno = 0;
    std::vector<std::string> header;
    int cols[9] = {-1, -1, -1, -1, -1, -1, -1, -1, -1};
    static const char* names[9] = {"id",       "model", "rho",   "tau",  "k",
                                   "n_vector", "reps",  "alpha", "seed"};
    std::vector<Scenario> out;

    auto parse_int = [](const std::string& v, const std::string& err) {
        try {
            std::size_t pos = 0;
            const int x = std::stoi(v, &pos);
            if (pos != v.size()) throw std::invalid_argument("");
            return x;
        } catch (const std::exception&) {
            throw std::runtime_error(err);
        }
    };
    auto parse_double = [](const std::string& v, const std::string& err) {
        try {
            std::size_t pos = 0;
            const double x = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument("");
            return x;
        } catch (const std::exception&) {
            throw std::runtime_error(err);
        }
    };

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> fields = detail::split_csv_line(line, lineno);
        if (header.empty()) {
            header = fields;
            for (int i = 0; i < static_cast<int>(header.size()); ++i) {
                const std::string h = detail::trim(header[i]);
                for (int c = 0; c < 9; ++c) {
                    if (h == names[c]) cols[c] = i;
                }
            }
            for (int c = 0; c < 9; ++c) {
                if (cols[c] < 0) {
                    throw std::runtime_error(std::string("line 1: missing column '") +
                                             names[c] + "'");
                }
            }
            continue;
        }
        if (fields.size() != header.size()) {
            throw std::runtime_error("line " + std::to_string(lineno) + ": expected " +
                                     std::to_string(header.size()) + " fields, got " +
                                     std::to_string(fields.size()));
        }
        const std::string err_prefix = "line " + std::to_string(lineno) + ": ";
        Scenario s;
        s.id = detail::trim(fields[static_cast<std::size_t>(cols[0])]);
        if (s.id.empty()) throw std::runtime_error(err_prefix + "empty scenario id");
        const std::string model_field = detail::trim(fields[static_cast<std::size_t>(cols[1])]);
        const std::optional<Model> model = parse_model(model_field);
        if (!model) {
            throw std::runtime_error(err_prefix + "unknown model '" + model_field + "'");
        }
        s.model = *model;
        s.rho = parse_double(detail::trim(fields[static_cast<std::size_t>(cols[2])]),
                             err_prefix + "invalid rho");
        s.tau = parse_double(detail::trim(fields[static_cast<std::size_t>(cols[3])]),
                             err_prefix + "invalid tau");
        s.k = parse_int(detail::trim(fields[static_cast<std::size_t>(cols[4])]),
                        err_prefix + "invalid k");
        const std::string nv = detail::trim(fields[static_cast<std::size_t>(cols[5])]);
        std::istringstream nin(nv);
        std::string tok;
        while (std::getline(nin, tok, ';')) {
            s.n_vector.push_back(parse_int(detail::trim(tok), err_prefix + "invalid n_vector"));
        }
        s.reps = parse_int(detail::trim(fields[static_cast<std::size_t>(cols[6])]),
                           err_prefix + "invalid reps");
        s.alpha = parse_double(detail::trim(fields[static_cast<std::size_t>(cols[7])]),
                               err_prefix + "invalid alpha");
        const std::string seed_field = detail::trim(fields[static_cast<std::size_t>(cols[8])]);
        try {
            std::size_t pos = 0;
            s.seed = std::stoull(seed_field, &pos);
            if (pos != seed_field.size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw std::runtime_error(err_prefix + "invalid seed '" + seed_field + "'");
        }
        out.push_back(std::move(s));
    }
    if (header.empty()) {
        throw std::runtime_error("empty input: no header row");
    }
    if (out.empty()) {
        throw std::runtime_error("empty grid: no scenario rows");
    }
    return out;
}

inline std::vector<Scenario> load_grid_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_grid_csv(buf.str());
}

}  // namespace metacorr
