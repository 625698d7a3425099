// sscd: command-line front end.
//
//   sscd simulate   synthetic SEM benchmark -> CSV/JSON files
//   sscd fit        data CSV + label CSV -> per-pair scores (JSON)
//   sscd baselines  data CSV -> Pearson / Kendall / Lasso scores (JSON)
//   sscd features   data CSV -> pair feature matrix (CSV or binary)
//   sscd evaluate   replicated AUC experiment -> report JSON + CSV
//
// Exit codes: 0 success, 2 usage or I/O error, 3 invalid input or numerical
// failure, 4 evaluate finished with failed replicates, 1 anything else.

#include "sscd/sscd.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using sscd::Json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitInput = 3;
constexpr int kExitIncomplete = 4;

struct FeatureFlags {
    double h = 0.2;
    double bound = 3.0;
    std::size_t d_target = 100;
    unsigned threads = 1;
};

void add_feature_flags(CLI::App& cmd, FeatureFlags& f) {
    cmd.add_option("--bin-width", f.h, "histogram bin width h on the standardized scale")->capture_default_str();
    cmd.add_option("--bound", f.bound, "values are clamped to [-bound, bound] after standardizing")
        ->capture_default_str();
    cmd.add_option("--d-target", f.d_target, "PCA dimension of the pair features; 0 keeps the raw bins")
        ->capture_default_str();
    cmd.add_option("--threads", f.threads, "worker thread cap")->capture_default_str()->check(CLI::PositiveNumber);
}

sscd::PipelineOptions pipeline_options(const FeatureFlags& f, double lambda, std::optional<double> sigma) {
    sscd::PipelineOptions opts;
    opts.bin_width = f.h;
    opts.bound = f.bound;
    opts.d_target = f.d_target;
    opts.lambda = lambda;
    opts.sigma = sigma;
    opts.threads = f.threads;
    return opts;
}

sscd::LabelScheme parse_scheme(const std::string& s) {
    return s == "rowwise" ? sscd::LabelScheme::RowWise : sscd::LabelScheme::Random;
}

void write_text(const fs::path& path, const std::string& text) {
    auto out = sscd::io::detail::open_out(path);
    out << text;
    if (!out) throw sscd::Error(sscd::ErrorKind::Io, "short write to '" + path.string() + "'");
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
    sscd::BenchmarkConfig bench;
    std::uint64_t seed = 0;
    double rho = 0.5;
    std::string scheme = "random";
    fs::path out_dir = ".";
};

int run_simulate(const SimulateArgs& a) {
    const auto inst = sscd::make_benchmark(a.bench, a.seed);
    fs::create_directories(a.out_dir);
    const auto& names = inst.train.names();

    Json sem;
    sem["sem"] = sscd::to_json(inst.spec);
    sem["targets"] = inst.targets;
    sem["variables"] = names;
    sem["seed"] = a.seed;
    sem["attempts"] = inst.attempts;
    sscd::write_json_file(a.out_dir / "sem.json", sem);

    sscd::io::write_data_csv(a.out_dir / "train.csv", inst.train);
    sscd::io::write_data_csv(a.out_dir / "obs_holdout.csv", sscd::DataMatrix(inst.obs_holdout, names));
    // Row r of interventions.csv was measured with variable r knocked out.
    sscd::io::write_data_csv(a.out_dir / "interventions.csv", sscd::DataMatrix(inst.intervention_rows, names));
    sscd::write_json_file(a.out_dir / "gold.json", sscd::to_json(inst.gold, names));
    sscd::write_json_file(a.out_dir / "reachability.json", sscd::to_json(inst.reachability, names));

    const auto labels = sscd::sample_labels(inst.gold.adjacency, a.rho, parse_scheme(a.scheme), sscd::mix_seed(a.seed, 100));
    sscd::io::write_label_csv(a.out_dir / "labels.csv", labels, names);

    std::cout << "wrote benchmark to " << a.out_dir.string() << ": p=" << names.size() << " n_train=" << inst.train.n()
              << " causal pairs=" << inst.gold.adjacency.edge_count() << " labelled=" << labels.m_labelled() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------

struct FitArgs {
    fs::path data;
    fs::path labels;
    fs::path out;
    double lambda = sscd::kDefaultLambda;
    std::optional<double> sigma;
    FeatureFlags features;
};

int run_fit(const FitArgs& a) {
    const auto data = sscd::io::read_data_csv(a.data);
    const auto labels = sscd::io::read_label_csv(a.labels, data.names());
    const auto opts = pipeline_options(a.features, a.lambda, a.sigma);
    const auto graph = sscd::prepare_graph(data, opts);
    const auto fitted = sscd::fit_sscd(graph, labels, a.lambda);

    Json out;
    out["config"] = {{"data", a.data.string()},
                     {"labels", a.labels.string()},
                     {"lambda", a.lambda},
                     {"sigma", a.sigma ? Json(*a.sigma) : Json("median")},
                     {"bin_width", a.features.h},
                     {"bound", a.features.bound},
                     {"d_target", a.features.d_target},
                     {"feature_dim", graph.feature_dim},
                     {"metric", std::string(sscd::to_string(graph.metric))}};
    const Json body = sscd::to_json(fitted, labels, data.names());
    for (const auto& [key, value] : body.items()) out[key] = value;
    sscd::write_json_file(a.out, out);

    std::size_t predicted = 0;
    for (const auto k : labels.unlabelled()) predicted += static_cast<std::size_t>(fitted.predictions[k]);
    std::cout << "fitted " << labels.m() << " pairs (" << labels.m_labelled() << " labelled), sigma=" << graph.sigma
              << "; " << predicted << " unlabelled pairs predicted causal -> " << a.out.string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------

struct BaselineArgs {
    fs::path data;
    fs::path out;
    std::string method = "pearson";
    std::size_t folds = 5;
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

int run_baselines(const BaselineArgs& a) {
    const auto data = sscd::io::read_data_csv(a.data);
    sscd::ScoreTable table;
    if (a.method == "pearson") table = sscd::pearson_scores(data);
    else if (a.method == "kendall") table = sscd::kendall_scores(data);
    else table = sscd::lasso_scores(data, {a.folds, 50, 1e-3, a.seed}, a.threads);

    Json out;
    out["config"] = {{"data", a.data.string()}, {"method", a.method}};
    if (a.method == "lasso") {
        out["config"]["folds"] = a.folds;
        out["config"]["seed"] = a.seed;
    }
    const Json body = sscd::to_json(table, data.names());
    for (const auto& [key, value] : body.items()) out[key] = value;
    sscd::write_json_file(a.out, out);
    std::cout << a.method << " scores for " << table.scores.size() << " pairs -> " << a.out.string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------

struct FeatureArgs {
    fs::path data;
    fs::path out;
    std::string format = "csv";
    bool distances = false;
    FeatureFlags features;
};

int run_features(const FeatureArgs& a) {
    const auto data = sscd::io::read_data_csv(a.data);
    const auto opts = pipeline_options(a.features, sscd::kDefaultLambda, std::nullopt);
    const auto features = sscd::build_features(data, opts);
    const auto meta = sscd::feature_metadata(features);

    if (a.format == "csv") {
        std::ostringstream csv;
        sscd::io::write_pair_matrix_csv(csv, features.features, data.names());
        write_text(fs::path(a.out) += ".csv", csv.str());
        write_text(fs::path(a.out) += ".json", meta.dump(2) + "\n");
    } else {
        sscd::io::write_matrix_binary(a.out, features.features, meta);
    }
    if (a.distances) {
        const auto dist = sscd::pair_distance_matrix(features, a.features.threads);
        const double sigma = sscd::median_heuristic_sigma(dist);
        const auto sim = sscd::similarity_matrix(dist, sigma);
        auto stem = [&](const char* suffix) { return fs::path(a.out.string() + suffix); };
        sscd::io::write_matrix_binary(stem("_distances"), dist.d,
                                      {{"kind", std::string(sscd::to_string(dist.kind))}, {"h", features.grid.bin_width}});
        sscd::io::write_matrix_binary(stem("_similarity"), sim.w, {{"kind", "gaussian"}, {"sigma", sigma}});
    }
    std::cout << features.m() << " pairs x " << features.d() << " " << sscd::to_string(features.kind) << " features -> "
              << a.out.string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------

struct EvaluateArgs {
    sscd::BenchmarkConfig bench;
    std::vector<double> rhos{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
    std::vector<std::size_t> n_trains{200, 500, 1000};
    std::vector<std::string> methods{"sscd", "pearson", "kendall", "lasso"};
    std::string scheme = "random";
    std::size_t replicates = 25;
    std::uint64_t seed = 0;
    double lambda = sscd::kDefaultLambda;
    std::optional<double> sigma;
    std::size_t folds = 5;
    FeatureFlags features;
    std::optional<fs::path> data;
    std::optional<fs::path> gold;
    fs::path out_json = "report.json";
    fs::path out_csv = "report.csv";
};

int run_evaluate(const EvaluateArgs& a) {
    sscd::ExperimentConfig cfg;
    cfg.bench = a.bench;
    cfg.rhos = a.rhos;
    cfg.n_trains = a.n_trains;
    cfg.methods = a.methods;
    cfg.scheme = parse_scheme(a.scheme);
    cfg.replicates = a.replicates;
    cfg.seed = a.seed;
    cfg.pipeline = pipeline_options(a.features, a.lambda, a.sigma);
    cfg.lasso_folds = a.folds;
    cfg.threads = a.features.threads;
    if (a.data) {
        auto data = sscd::io::read_data_csv(*a.data);
        auto gold = sscd::gold_from_json(sscd::read_json_file(*a.gold), data.names());
        cfg.external = sscd::ExternalBenchmark{std::move(data), std::move(gold.adjacency)};
    }

    const auto report = sscd::run_experiment(cfg);
    sscd::write_json_file(a.out_json, sscd::to_json(report));
    std::ostringstream csv;
    sscd::write_report_csv(csv, report);
    write_text(a.out_csv, csv.str());

    std::size_t failed = 0;
    for (const auto& row : report.summary) {
        failed += row.failed;
        std::cout << row.method << " rho=" << row.rho << " n_train=" << row.n_train << " mean_auc=";
        if (row.completed > 0) std::cout << row.mean;
        else std::cout << "NA";
        std::cout << " se=" << row.standard_error << " (" << row.completed << "/" << row.completed + row.failed
                  << ")\n";
    }
    if (failed > 0) {
        std::cerr << "sscd: " << failed << " replicate cells failed; see " << a.out_json.string() << "\n";
        return kExitIncomplete;
    }
    return 0;
}

void add_benchmark_flags(CLI::App& cmd, sscd::BenchmarkConfig& b) {
    cmd.add_option("--p", b.p, "variables of interest")->capture_default_str()->check(CLI::Range(2, 100000));
    cmd.add_option("--p-extra", b.p_extra, "further SEM variables outside the set of interest")->capture_default_str();
    cmd.add_option("--edge-prob", b.edge_prob, "probability of each forward edge of the random DAG")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    cmd.add_option("--n-obs", b.n_obs, "observational samples; half form the gold-standard hold-out")
        ->capture_default_str()
        ->check(CLI::Range(4, 100000000));
    cmd.add_option("--knockout-sds", b.knockout_sds, "knockouts clamp a variable to minus this many marginal sds")
        ->capture_default_str();
    cmd.add_option("--tau", b.tau, "robust z-score threshold of the gold standard (strict)")->capture_default_str();
    cmd.add_option("--min-density", b.min_density, "gold standards sparser than this are redrawn")
        ->capture_default_str();
    cmd.add_flag("--require-row-effects", b.require_row_effects,
                 "also redraw gold standards in which fewer than half of the rows hold an effect");
}

int error_exit(const sscd::Error& e) {
    std::cerr << "sscd: " << e.what() << "\n";
    return e.kind() == sscd::ErrorKind::Io ? kExitUsage : kExitInput;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Semi-supervised causal discovery over ordered variable pairs."};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "generate a synthetic interventional benchmark");
    add_benchmark_flags(*simulate, sim.bench);
    simulate->add_option("--n-train", sim.bench.n_train, "training samples: held-in observations plus outside knockouts")
        ->capture_default_str();
    simulate->add_option("--seed", sim.seed, "benchmark seed")->capture_default_str();
    simulate->add_option("--rho", sim.rho, "fraction of pairs written to labels.csv")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    simulate->add_option("--scheme", sim.scheme, "label sampling scheme")
        ->capture_default_str()
        ->check(CLI::IsMember({"random", "rowwise"}));
    simulate->add_option("--out-dir", sim.out_dir, "output directory")->capture_default_str();

    FitArgs fit;
    auto* fit_cmd = app.add_subcommand("fit", "score every ordered pair from data and partial labels");
    fit_cmd->add_option("--data", fit.data, "data CSV (header of variable names)")->required();
    fit_cmd->add_option("--labels", fit.labels, "label CSV with from,to,label rows")->required();
    fit_cmd->add_option("--out", fit.out, "output JSON")->required();
    fit_cmd->add_option("--lambda", fit.lambda, "smoothness weight; coarse grid 0.001, 0.01, 0.1, 1")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    fit_cmd->add_option("--sigma", fit.sigma, "similarity bandwidth (default: median pair distance)")
        ->check(CLI::PositiveNumber);
    add_feature_flags(*fit_cmd, fit.features);

    BaselineArgs base;
    auto* base_cmd = app.add_subcommand("baselines", "score pairs with a label-free baseline");
    base_cmd->add_option("--data", base.data, "data CSV")->required();
    base_cmd->add_option("--out", base.out, "output JSON")->required();
    base_cmd->add_option("--method", base.method, "baseline")
        ->capture_default_str()
        ->check(CLI::IsMember({"pearson", "kendall", "lasso"}));
    base_cmd->add_option("--folds", base.folds, "Lasso cross-validation folds")->capture_default_str();
    base_cmd->add_option("--seed", base.seed, "Lasso fold seed")->capture_default_str();
    base_cmd->add_option("--threads", base.threads, "worker thread cap")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);

    FeatureArgs feat;
    auto* feat_cmd = app.add_subcommand("features", "export pair histogram features");
    feat_cmd->add_option("--data", feat.data, "data CSV")->required();
    feat_cmd->add_option("--out", feat.out, "output stem (.csv/.bin plus .json sidecar)")->required();
    feat_cmd->add_option("--format", feat.format, "csv or bin")
        ->capture_default_str()
        ->check(CLI::IsMember({"csv", "bin"}));
    feat_cmd->add_flag("--distances", feat.distances, "also write pair distance and similarity matrices (binary)");
    add_feature_flags(*feat_cmd, feat.features);

    EvaluateArgs ev;
    auto* eval_cmd = app.add_subcommand("evaluate", "replicated AUC experiment on held-out pairs");
    add_benchmark_flags(*eval_cmd, ev.bench);
    eval_cmd->add_option("--n-train", ev.n_trains, "training sample sizes")->capture_default_str()->delimiter(',');
    eval_cmd->add_option("--rho", ev.rhos, "label fractions")->capture_default_str()->delimiter(',');
    eval_cmd->add_option("--methods", ev.methods, "methods to run")
        ->capture_default_str()
        ->delimiter(',')
        ->check(CLI::IsMember(sscd::known_methods()));
    eval_cmd->add_option("--scheme", ev.scheme, "label sampling scheme")
        ->capture_default_str()
        ->check(CLI::IsMember({"random", "rowwise"}));
    eval_cmd->add_option("--replicates", ev.replicates, "replicates; replicate r uses seed + r")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    eval_cmd->add_option("--seed", ev.seed, "base seed")->capture_default_str();
    eval_cmd->add_option("--lambda", ev.lambda, "smoothness weight")->capture_default_str()->check(CLI::NonNegativeNumber);
    eval_cmd->add_option("--sigma", ev.sigma, "similarity bandwidth (default: median pair distance)")
        ->check(CLI::PositiveNumber);
    eval_cmd->add_option("--folds", ev.folds, "Lasso cross-validation folds")->capture_default_str();
    add_feature_flags(*eval_cmd, ev.features);
    auto* data_opt = eval_cmd->add_option("--data", ev.data, "evaluate on this data CSV instead of simulating");
    auto* gold_opt = eval_cmd->add_option("--gold", ev.gold, "gold-standard JSON for --data");
    data_opt->needs(gold_opt);
    gold_opt->needs(data_opt);
    eval_cmd->add_option("--out-json", ev.out_json, "report JSON")->capture_default_str();
    eval_cmd->add_option("--out-csv", ev.out_csv, "per-replicate CSV")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*simulate) return run_simulate(sim);
        if (*fit_cmd) return run_fit(fit);
        if (*base_cmd) return run_baselines(base);
        if (*feat_cmd) return run_features(feat);
        if (*eval_cmd) return run_evaluate(ev);
    } catch (const sscd::Error& e) {
        return error_exit(e);
    } catch (const fs::filesystem_error& e) {
        std::cerr << "sscd: IoError: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "sscd: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
