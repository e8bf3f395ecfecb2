// Command-line front end: pooled-correlation analysis of a dataset, Monte
// Carlo coverage simulation, and access to the bundled datasets.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "metacorr/metacorr.hpp"

namespace mc = metacorr;
using nlohmann::ordered_json;

namespace {

std::string fmt6(double x) {
    char b[64];
    std::snprintf(b, sizeof(b), "%.6f", x);
    return b;
}

std::string fmtg(double x) {
    char b[64];
    std::snprintf(b, sizeof(b), "%.10g", x);
    return b;
}

std::string trim_copy(const std::string& s) {
    const std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const std::size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

std::vector<mc::CiMethod> parse_methods_csv(const std::string& csv) {
    std::vector<mc::CiMethod> out;
    std::istringstream in(csv);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        const std::string t = trim_copy(tok);
        if (t.empty()) continue;
        const std::optional<mc::CiMethod> m = mc::parse_method(t);
        if (!m) throw std::runtime_error("unknown method '" + t + "'");
        out.push_back(*m);
    }
    if (out.empty()) throw std::runtime_error("empty method list");
    return out;
}

std::string methods_to_string(const std::vector<mc::CiMethod>& ms) {
    std::string out;
    for (std::size_t i = 0; i < ms.size(); ++i) {
        if (i) out += ",";
        out += mc::method_name(ms[i]);
    }
    return out;
}

std::optional<mc::Backtransform> parse_backtransform(const std::string& s) {
    if (s.empty()) return std::nullopt;
    if (s == "tanh") return mc::Backtransform::TANH;
    if (s == "integral") return mc::Backtransform::INTEGRAL;
    throw std::runtime_error("unknown backtransform '" + s + "' (expected tanh or integral)");
}

std::pair<std::string, std::string> parse_filter(const std::string& kv) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw std::runtime_error("filter must have the form key=value, got '" + kv + "'");
    }
    return {kv.substr(0, eq), kv.substr(eq + 1)};
}

// Writes to a file when a path is given, stdout otherwise.
struct Sink {
    std::ofstream file;
    std::ostream* out = &std::cout;

    void open(const std::string& path) {
        if (path.empty()) return;
        file.open(path, std::ios::binary);
        if (!file) throw std::runtime_error("cannot write '" + path + "'");
        out = &file;
    }
    template <typename T>
    Sink& operator<<(const T& v) {
        (*out) << v;
        return *this;
    }
    void flush() { out->flush(); }
};

void warn(std::vector<std::string>& warnings, const std::string& msg) {
    warnings.push_back(msg);
    std::cerr << "warning: " << msg << "\n";
}

// ============================================================================
// analyze
// ============================================================================

struct AnalyzeArgs {
    std::string input;
    std::string builtin;
    std::vector<std::string> filters;
    std::string methods_csv = "HOVz,HS,KH,WBS1,WBS2,WBS3,HC3,HC4";
    double alpha = 0.05;
    std::string backtransform;
    int bootstrap_reps = 1000;
    std::uint64_t seed = 20210916ULL;
    std::string tau_estimator = "SJ";
    bool fixed_effect = false;
    bool bias_correct = false;
    std::string output;
    std::string format = "csv";
};

int run_analyze(const AnalyzeArgs& args) {
    if (args.input.empty() == args.builtin.empty()) {
        throw std::runtime_error("analyze needs exactly one of --input or --builtin");
    }
    if (args.tau_estimator != "SJ") {
        throw std::runtime_error("unknown tau estimator '" + args.tau_estimator +
                                 "' (available: SJ)");
    }
    mc::Dataset ds = args.builtin.empty() ? mc::load_csv(args.input)
                                          : mc::builtin_dataset(args.builtin);
    for (const std::string& f : args.filters) {
        const auto [key, value] = parse_filter(f);
        ds = mc::filter_dataset(ds, key, value);
    }
    std::vector<mc::StudySummary> studies = mc::study_summaries(ds);
    if (args.bias_correct) {
        for (mc::StudySummary& s : studies) s.r = mc::bias_corrected_r(s.r, s.n);
    }
    const std::vector<mc::CiMethod> methods = parse_methods_csv(args.methods_csv);
    const std::optional<mc::Backtransform> bt = parse_backtransform(args.backtransform);
    const int k = static_cast<int>(studies.size());
    long n_total = 0;
    for (const mc::StudySummary& s : studies) n_total += s.n;

    const bool have_tau = k >= 2;
    double tau2_z = 0.0;
    double tau2_r = 0.0;
    if (have_tau) {
        tau2_z = mc::sj_tau2(mc::to_z_scale(studies));
        tau2_r = mc::sj_tau2_r(studies);
    }

    std::vector<std::string> warnings;
    ordered_json json_rows = ordered_json::array();
    std::vector<std::string> csv_rows;

    auto emit_pass = [&](bool fixed) {
        mc::CiOptions opts;
        opts.alpha = args.alpha;
        opts.bootstrap.reps = args.bootstrap_reps;
        opts.bootstrap.rng_seed = args.seed;
        opts.backtransform_override = bt;
        opts.fixed_effect = fixed;
        const char* pooling = fixed ? "fixed" : "random";
        const double row_tau2_z = fixed ? 0.0 : tau2_z;
        const double row_tau2_r = fixed ? 0.0 : tau2_r;
        for (mc::CiMethod m : methods) {
            if (k < mc::min_k(m)) {
                warn(warnings, std::string("skipping ") + mc::method_name(m) +
                                   ": requires at least " + std::to_string(mc::min_k(m)) +
                                   " studies, got " + std::to_string(k));
                csv_rows.push_back(std::string(mc::method_name(m)) + "," + pooling +
                                   ",,,,,,,," + std::to_string(k) + "," +
                                   std::to_string(n_total));
                ordered_json row;
                row["method"] = mc::method_name(m);
                row["pooling"] = pooling;
                row["point_r"] = nullptr;
                row["lower_r"] = nullptr;
                row["upper_r"] = nullptr;
                row["z_center"] = nullptr;
                row["z_se"] = nullptr;
                row["tau2_z"] = nullptr;
                row["tau2_r"] = nullptr;
                row["k"] = k;
                row["n_total"] = n_total;
                json_rows.push_back(row);
                continue;
            }
            const mc::CiResult res = mc::compute_ci(studies, m, opts);
            csv_rows.push_back(std::string(mc::method_name(m)) + "," + pooling + "," +
                               fmt6(res.point_r) + "," + fmt6(res.lower_r) + "," +
                               fmt6(res.upper_r) + "," + fmt6(res.z_center) + "," +
                               fmt6(res.z_se) + "," +
                               (have_tau ? fmt6(row_tau2_z) : std::string()) + "," +
                               (have_tau ? fmt6(row_tau2_r) : std::string()) + "," +
                               std::to_string(k) + "," + std::to_string(n_total));
            ordered_json row;
            row["method"] = mc::method_name(m);
            row["pooling"] = pooling;
            row["point_r"] = res.point_r;
            row["lower_r"] = res.lower_r;
            row["upper_r"] = res.upper_r;
            row["z_center"] = res.z_center;
            row["z_se"] = res.z_se;
            if (have_tau) {
                row["tau2_z"] = row_tau2_z;
                row["tau2_r"] = row_tau2_r;
            } else {
                row["tau2_z"] = nullptr;
                row["tau2_r"] = nullptr;
            }
            row["k"] = k;
            row["n_total"] = n_total;
            json_rows.push_back(row);
        }
    };
    emit_pass(false);
    if (args.fixed_effect) emit_pass(true);

    Sink sink;
    sink.open(args.output);
    const std::string bt_label = args.backtransform.empty() ? "default" : args.backtransform;
    if (args.format == "csv") {
        sink << "# command=analyze\n";
        sink << "# dataset=" << ds.name << "\n";
        sink << "# methods=" << methods_to_string(methods) << "\n";
        sink << "# alpha=" << fmtg(args.alpha) << "\n";
        sink << "# backtransform=" << bt_label << "\n";
        sink << "# bootstrap_reps=" << args.bootstrap_reps << "\n";
        sink << "# seed=" << args.seed << "\n";
        sink << "# tau_estimator=SJ\n";
        sink << "# fixed_effect=" << (args.fixed_effect ? 1 : 0) << "\n";
        sink << "# bias_correct=" << (args.bias_correct ? 1 : 0) << "\n";
        sink << "method,pooling,point_r,lower_r,upper_r,z_center,z_se,tau2_z,tau2_r,k,n_total\n";
        for (const std::string& row : csv_rows) sink << row << "\n";
    } else {
        ordered_json j;
        j["command"] = "analyze";
        j["config"] = {{"dataset", ds.name},
                       {"methods", methods_to_string(methods)},
                       {"alpha", args.alpha},
                       {"backtransform", bt_label},
                       {"bootstrap_reps", args.bootstrap_reps},
                       {"seed", args.seed},
                       {"tau_estimator", "SJ"},
                       {"fixed_effect", args.fixed_effect},
                       {"bias_correct", args.bias_correct}};
        j["warnings"] = warnings;
        j["rows"] = json_rows;
        sink << j.dump(2) << "\n";
    }
    sink.flush();
    return 0;
}

// ============================================================================
// simulate
// ============================================================================

struct SimulateArgs {
    std::string grid = "default";
    int reps = 2000;
    double alpha = 0.05;
    std::string methods_csv = "HOVz,HS,KH,WBS1,WBS2,WBS3,HC3,HC4";
    int bootstrap_reps = 1000;
    std::uint64_t seed = 20210916ULL;
    int threads = 1;
    bool z_draw = false;
    std::string backtransform;
    std::string output;
    std::string format = "csv";
    bool reps_given = false;
    bool alpha_given = false;
    bool seed_given = false;
};

std::string simulate_csv_row(const std::string& scenario_id, mc::Model model, double rho,
                             double tau, int k, const std::string& n_pattern,
                             const mc::MethodResult& mr) {
    return scenario_id + "," + mc::model_name(model) + "," + fmtg(rho) + "," + fmtg(tau) +
           "," + std::to_string(k) + "," + n_pattern + "," + mr.method + "," +
           fmt6(mr.coverage) + "," + fmt6(mr.mean_length) + "," +
           std::to_string(mr.failures) + "," + fmt6(mr.mc_se);
}

ordered_json simulate_json_row(const std::string& scenario_id, mc::Model model, double rho,
                               double tau, int k, const std::string& n_pattern,
                               const mc::MethodResult& mr) {
    ordered_json row;
    row["scenario_id"] = scenario_id;
    row["model"] = mc::model_name(model);
    row["rho"] = rho;
    row["tau"] = tau;
    row["k"] = k;
    row["n_pattern"] = n_pattern;
    row["method"] = mr.method;
    row["coverage"] = mr.coverage;
    row["mean_length"] = mr.mean_length;
    row["failures"] = mr.failures;
    row["mc_se"] = mr.mc_se;
    return row;
}

int run_simulate(const SimulateArgs& args) {
    const std::vector<mc::CiMethod> methods = parse_methods_csv(args.methods_csv);
    const std::optional<mc::Backtransform> bt = parse_backtransform(args.backtransform);
    std::vector<std::string> warnings;

    std::vector<mc::Scenario> grid;
    const bool use_default = args.grid == "default";
    if (use_default) {
        mc::GridConfig cfg;
        cfg.reps = args.reps;
        cfg.alpha = args.alpha;
        cfg.seed = args.seed;
        cfg.methods = methods;
        cfg.bootstrap.reps = args.bootstrap_reps;
        cfg.z_scale_draw = args.z_draw;
        cfg.backtransform = bt;
        grid = mc::default_grid(cfg);
    } else {
        grid = mc::load_grid_csv(args.grid);
        if (args.seed_given) {
            warn(warnings, "ignoring --seed: scenario seeds come from the grid file");
        }
        for (mc::Scenario& s : grid) {
            if (args.reps_given) s.reps = args.reps;
            if (args.alpha_given) s.alpha = args.alpha;
            s.methods = methods;
            s.bootstrap.reps = args.bootstrap_reps;
            s.z_scale_draw = args.z_draw;
            s.backtransform = bt;
        }
    }
    // Methods a scenario cannot support are dropped with a warning rather
    // than failing the whole run.
    for (mc::Scenario& s : grid) {
        if (s.model == mc::Model::LOGNORMAL_K1 || s.model == mc::Model::NORMAL_K1) continue;
        std::vector<mc::CiMethod> kept;
        for (mc::CiMethod m : s.methods) {
            if (s.k < mc::min_k(m)) {
                warn(warnings, "scenario " + s.id + ": skipping " + mc::method_name(m) +
                                   " (requires at least " + std::to_string(mc::min_k(m)) +
                                   " studies, got " + std::to_string(s.k) + ")");
            } else {
                kept.push_back(m);
            }
        }
        if (kept.empty()) {
            throw std::runtime_error("scenario " + s.id + ": no usable methods");
        }
        s.methods = std::move(kept);
    }

    Sink sink;
    sink.open(args.output);
    const std::string bt_label = args.backtransform.empty() ? "default" : args.backtransform;
    const std::string reps_label = use_default || args.reps_given
                                       ? std::to_string(args.reps)
                                       : std::string("grid");
    const std::string alpha_label =
        use_default || args.alpha_given ? fmtg(args.alpha) : std::string("grid");
    const std::string seed_label =
        use_default ? std::to_string(args.seed) : std::string("grid");

    const bool csv = args.format == "csv";
    ordered_json json_rows = ordered_json::array();
    if (csv) {
        sink << "# command=simulate\n";
        sink << "# grid=" << args.grid << "\n";
        sink << "# scenarios=" << grid.size() << "\n";
        sink << "# reps=" << reps_label << "\n";
        sink << "# alpha=" << alpha_label << "\n";
        sink << "# methods=" << methods_to_string(methods) << "\n";
        sink << "# bootstrap_reps=" << args.bootstrap_reps << "\n";
        sink << "# seed=" << seed_label << "\n";
        sink << "# z_draw=" << (args.z_draw ? 1 : 0) << "\n";
        sink << "# backtransform=" << bt_label << "\n";
        sink << "scenario_id,model,rho,tau,k,n_pattern,method,coverage,mean_length,"
                "failures,mc_se\n";
        sink.flush();
    }

    std::vector<mc::ScenarioResult> results;
    results.reserve(grid.size());
    for (const mc::Scenario& s : grid) {
        mc::ScenarioResult res = mc::run_scenario(s, args.threads);
        for (const mc::MethodResult& mr : res.rows) {
            if (csv) {
                sink << simulate_csv_row(res.scenario_id, res.model, res.rho, res.tau,
                                         res.k, res.n_pattern, mr)
                     << "\n";
            } else {
                json_rows.push_back(simulate_json_row(res.scenario_id, res.model, res.rho,
                                                      res.tau, res.k, res.n_pattern, mr));
            }
        }
        if (csv) sink.flush();
        results.push_back(std::move(res));
    }

    for (const mc::AggregateRow& agg : mc::aggregate_by_effect(results)) {
        mc::MethodResult mr;
        mr.method = agg.method;
        mr.coverage = agg.coverage;
        mr.mean_length = agg.mean_length;
        mr.failures = agg.failures;
        mr.mc_se = agg.mc_se;
        if (csv) {
            sink << simulate_csv_row("summary", agg.model, agg.rho, agg.tau, 0, "-", mr)
                 << "\n";
        } else {
            json_rows.push_back(simulate_json_row("summary", agg.model, agg.rho, agg.tau,
                                                  0, "-", mr));
        }
    }
    if (!csv) {
        ordered_json j;
        j["command"] = "simulate";
        j["config"] = {{"grid", args.grid},
                       {"scenarios", grid.size()},
                       {"reps", reps_label},
                       {"alpha", alpha_label},
                       {"methods", methods_to_string(methods)},
                       {"bootstrap_reps", args.bootstrap_reps},
                       {"seed", seed_label},
                       {"z_draw", args.z_draw},
                       {"backtransform", bt_label}};
        j["warnings"] = warnings;
        j["rows"] = json_rows;
        sink << j.dump(2) << "\n";
    }
    sink.flush();
    return 0;
}

// ============================================================================
// datasets
// ============================================================================

int run_datasets_list(const std::string& output, const std::string& format) {
    Sink sink;
    sink.open(output);
    if (format == "csv") {
        sink << "# command=datasets-list\n";
        sink << "name,studies,n_total\n";
        for (const std::string& name : mc::builtin_names()) {
            const mc::Dataset ds = mc::builtin_dataset(name);
            long n_total = 0;
            for (const mc::DatasetRecord& rec : ds.records) n_total += rec.n;
            sink << name << "," << ds.records.size() << "," << n_total << "\n";
        }
    } else {
        ordered_json rows = ordered_json::array();
        for (const std::string& name : mc::builtin_names()) {
            const mc::Dataset ds = mc::builtin_dataset(name);
            long n_total = 0;
            for (const mc::DatasetRecord& rec : ds.records) n_total += rec.n;
            rows.push_back({{"name", name},
                            {"studies", ds.records.size()},
                            {"n_total", n_total}});
        }
        ordered_json j;
        j["command"] = "datasets-list";
        j["rows"] = rows;
        sink << j.dump(2) << "\n";
    }
    sink.flush();
    return 0;
}

int run_datasets_show(const std::string& input, const std::string& builtin,
                      const std::vector<std::string>& filters, const std::string& output,
                      const std::string& format) {
    if (input.empty() == builtin.empty()) {
        throw std::runtime_error("datasets show needs exactly one of --input or --builtin");
    }
    mc::Dataset ds = builtin.empty() ? mc::load_csv(input) : mc::builtin_dataset(builtin);
    for (const std::string& f : filters) {
        const auto [key, value] = parse_filter(f);
        ds = mc::filter_dataset(ds, key, value);
    }
    Sink sink;
    sink.open(output);
    if (format == "csv") {
        sink << "# command=datasets-show\n";
        sink << "# dataset=" << ds.name << "\n";
        sink << mc::dataset_to_csv(ds);
    } else {
        ordered_json rows = ordered_json::array();
        for (const mc::DatasetRecord& rec : ds.records) {
            ordered_json row;
            row["study"] = rec.study_id;
            row["authors"] = rec.authors;
            row["year"] = rec.year;
            row["n"] = rec.n;
            row["r"] = rec.r;
            row["attributes"] = rec.attributes;
            rows.push_back(row);
        }
        ordered_json j;
        j["command"] = "datasets-show";
        j["config"] = {{"dataset", ds.name}};
        j["rows"] = rows;
        sink << j.dump(2) << "\n";
    }
    sink.flush();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Confidence intervals for pooled Pearson correlations"};
    app.require_subcommand(1);

    AnalyzeArgs an;
    CLI::App* analyze = app.add_subcommand("analyze", "Pool a dataset and report CIs");
    analyze->add_option("--input", an.input, "Dataset CSV (columns r and n required)");
    analyze->add_option("--builtin", an.builtin,
                        "Bundled dataset: molloy2014, santos2016, chalkidou2012");
    analyze->add_option("--filter", an.filters, "Keep records with attribute key=value");
    analyze->add_option("--methods", an.methods_csv, "Comma-separated method list")->capture_default_str();
    analyze->add_option("--alpha", an.alpha, "Two-sided miscoverage level")->capture_default_str();
    analyze
        ->add_option("--backtransform", an.backtransform,
                     "Override the z-to-r back-transform for z-scale methods")
        ->check(CLI::IsMember({"tanh", "integral"}));
    analyze->add_option("--bootstrap-reps", an.bootstrap_reps,
                        "Wild bootstrap replicates")->capture_default_str();
    analyze->add_option("--seed", an.seed, "Bootstrap RNG seed")->capture_default_str();
    analyze->add_option("--tau-estimator", an.tau_estimator,
                        "Heterogeneity estimator")->capture_default_str();
    analyze->add_flag("--fixed-effect", an.fixed_effect,
                      "Also report rows with the heterogeneity variance forced to zero");
    analyze->add_flag("--bias-correct", an.bias_correct,
                      "Apply the small-sample correlation bias correction per study");
    analyze->add_option("--output", an.output, "Output path (default stdout)");
    analyze->add_option("--format", an.format, "Output format")->capture_default_str()
        ->check(CLI::IsMember({"csv", "json"}));

    SimulateArgs sim;
    CLI::App* simulate = app.add_subcommand("simulate", "Run the coverage simulation");
    simulate->add_option("--grid", sim.grid,
                         "Scenario grid: 'default' or a grid CSV path")->capture_default_str();
    CLI::Option* reps_opt =
        simulate->add_option("--reps", sim.reps, "Replicates per scenario")->capture_default_str();
    CLI::Option* alpha_opt =
        simulate->add_option("--alpha", sim.alpha, "Two-sided miscoverage level")->capture_default_str();
    simulate->add_option("--methods", sim.methods_csv, "Comma-separated method list")->capture_default_str();
    simulate->add_option("--bootstrap-reps", sim.bootstrap_reps,
                         "Wild bootstrap replicates")->capture_default_str();
    CLI::Option* seed_opt = simulate->add_option(
        "--seed", sim.seed, "Base seed for the default grid (grid files carry their own)")->capture_default_str();
    simulate->add_option("--threads", sim.threads, "Worker threads")->capture_default_str()
        ->check(CLI::Range(1, 256));
    simulate->add_flag("--z-draw", sim.z_draw,
                       "Draw study statistics directly on the z scale");
    simulate
        ->add_option("--backtransform", sim.backtransform,
                     "Override the z-to-r back-transform for z-scale methods")
        ->check(CLI::IsMember({"tanh", "integral"}));
    simulate->add_option("--output", sim.output, "Output path (default stdout)");
    simulate->add_option("--format", sim.format, "Output format")->capture_default_str()
        ->check(CLI::IsMember({"csv", "json"}));

    CLI::App* datasets = app.add_subcommand("datasets", "Inspect bundled datasets");
    datasets->require_subcommand(1);
    std::string ds_output;
    std::string ds_format = "csv";
    CLI::App* ds_list = datasets->add_subcommand("list", "List bundled datasets");
    ds_list->add_option("--output", ds_output, "Output path (default stdout)");
    ds_list->add_option("--format", ds_format, "Output format")->capture_default_str()
        ->check(CLI::IsMember({"csv", "json"}));
    std::string show_input, show_builtin, show_output;
    std::string show_format = "csv";
    std::vector<std::string> show_filters;
    CLI::App* ds_show = datasets->add_subcommand("show", "Print a dataset's records");
    ds_show->add_option("--input", show_input, "Dataset CSV path");
    ds_show->add_option("--builtin", show_builtin, "Bundled dataset name");
    ds_show->add_option("--filter", show_filters, "Keep records with attribute key=value");
    ds_show->add_option("--output", show_output, "Output path (default stdout)");
    ds_show->add_option("--format", show_format, "Output format")->capture_default_str()
        ->check(CLI::IsMember({"csv", "json"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (analyze->parsed()) return run_analyze(an);
        if (simulate->parsed()) {
            sim.reps_given = reps_opt->count() > 0;
            sim.alpha_given = alpha_opt->count() > 0;
            sim.seed_given = seed_opt->count() > 0;
            return run_simulate(sim);
        }
        if (datasets->parsed()) {
            if (ds_list->parsed()) return run_datasets_list(ds_output, ds_format);
            if (ds_show->parsed()) {
                return run_datasets_show(show_input, show_builtin, show_filters,
                                         show_output, show_format);
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
