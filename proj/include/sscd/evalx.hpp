#pragma once

// ROC/AUC on unlabelled pairs and the replicated benchmark experiment.

#include "sscd/baselines.hpp"
#include "sscd/benchgen.hpp"
#include "sscd/error.hpp"
#include "sscd/laprls.hpp"
#include "sscd/pairspace.hpp"
#include "sscd/parallel.hpp"
#include "sscd/pipeline.hpp"
#include "sscd/random.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <tuple>
#include <vector>

namespace sscd {

struct RocPoint {
    double fpr;
    double tpr;
};

struct RocResult {
    double auc = 0.5;
    std::vector<RocPoint> roc_points;
    std::size_t n_pos = 0;
    std::size_t n_neg = 0;
};

/// Mann-Whitney AUC with ties counted half, plus the exact ROC curve with one
/// vertex per distinct score.
inline RocResult auc(std::span<const double> scores, std::span<const int> truth, bool use_absolute = false) {
    if (scores.size() != truth.size()) throw Error(ErrorKind::Param, "scores and truth differ in length");
    std::vector<double> values(scores.begin(), scores.end());
    for (auto& v : values) {
        if (std::isnan(v)) throw Error(ErrorKind::Param, "NaN score");
        if (use_absolute) v = std::abs(v);
    }
    RocResult out;
    for (const int t : truth) (t != 0 ? out.n_pos : out.n_neg) += 1;
    if (out.n_pos == 0 || out.n_neg == 0) {
        throw Error(ErrorKind::Class, "truth has a single class (" + std::to_string(out.n_pos) + " positive, " +
                                          std::to_string(out.n_neg) + " negative)");
    }
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });

    // Twice the number of correctly ordered (pos, neg) pairs; ties add one.
    std::uint64_t twice_area = 0;
    std::uint64_t tp = 0, fp = 0;
    out.roc_points.push_back({0.0, 0.0});
    for (std::size_t start = 0; start < order.size();) {
        std::size_t end = start;
        std::uint64_t pos = 0, neg = 0;
        while (end < order.size() && values[order[end]] == values[order[start]]) {
            (truth[order[end]] != 0 ? pos : neg) += 1;
            ++end;
        }
        twice_area += neg * (2 * tp + pos);
        tp += pos;
        fp += neg;
        out.roc_points.push_back({static_cast<double>(fp) / static_cast<double>(out.n_neg),
                                  static_cast<double>(tp) / static_cast<double>(out.n_pos)});
        start = end;
    }
    out.auc = static_cast<double>(twice_area) /
              (2.0 * static_cast<double>(out.n_pos) * static_cast<double>(out.n_neg));
    return out;
}

/// Trapezoidal area under a polyline of ROC points.
inline double trapezoid_area(std::span<const RocPoint> pts) {
    double area = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        area += (pts[i].fpr - pts[i - 1].fpr) * (pts[i].tpr + pts[i - 1].tpr) / 2.0;
    }
    return area;
}

/// AUC restricted to the unlabelled pairs.
inline RocResult evaluate_on_unlabelled(const Vector& scores, bool use_absolute, const AdjacencyMatrix& gold,
                                        const LabelAssignment& labels) {
    if (static_cast<std::size_t>(scores.size()) != labels.m() || gold.p() != labels.p()) {
        throw Error(ErrorKind::Param, "scores, gold standard and labels disagree in size");
    }
    std::vector<double> s;
    std::vector<int> t;
    s.reserve(labels.m_unlabelled());
    t.reserve(labels.m_unlabelled());
    for (const auto k : labels.unlabelled()) {
        const auto [i, j] = pair_unindex(k, labels.p());
        s.push_back(scores[static_cast<Eigen::Index>(k)]);
        t.push_back(gold(i, j) ? 1 : 0);
    }
    if (s.empty()) throw Error(ErrorKind::Class, "no unlabelled pairs to evaluate");
    return auc(s, t, use_absolute);
}

inline RocResult evaluate_on_unlabelled(const FitResult& fitted, const AdjacencyMatrix& gold,
                                        const LabelAssignment& labels) {
    return evaluate_on_unlabelled(fitted.scores, false, gold, labels);
}

inline RocResult evaluate_on_unlabelled(const ScoreTable& table, const AdjacencyMatrix& gold,
                                        const LabelAssignment& labels) {
    return evaluate_on_unlabelled(table.scores, table.use_absolute, gold, labels);
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

inline const std::vector<std::string>& known_methods() {
    static const std::vector<std::string> methods{"sscd", "pearson", "kendall", "lasso"};
    return methods;
}

/// User-supplied data and gold standard; replicates then only resample labels.
struct ExternalBenchmark {
    DataMatrix data;
    AdjacencyMatrix gold;
};

struct ExperimentConfig {
    BenchmarkConfig bench;
    std::vector<double> rhos{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
    std::vector<std::size_t> n_trains{200, 500, 1000};
    std::vector<std::string> methods{"sscd", "pearson", "kendall", "lasso"};
    LabelScheme scheme = LabelScheme::Random;
    std::size_t replicates = 25;
    std::uint64_t seed = 0;
    PipelineOptions pipeline;
    std::size_t lasso_folds = 5;
    unsigned threads = 1;
    std::optional<ExternalBenchmark> external;
};

struct ReplicateRecord {
    std::string method;
    double rho = 0.0;
    std::size_t n_train = 0;
    std::size_t replicate = 0;
    std::optional<double> auc;
    std::string error;
};

struct SummaryRow {
    std::string method;
    double rho = 0.0;
    std::size_t n_train = 0;
    std::size_t completed = 0;
    std::size_t failed = 0;
    double mean = std::nan("");
    double standard_error = std::nan("");
};

struct ExperimentReport {
    nlohmann::ordered_json config;
    std::vector<ReplicateRecord> records;
    std::vector<SummaryRow> summary;

    bool all_completed() const {
        return std::all_of(records.begin(), records.end(), [](const auto& r) { return r.auc.has_value(); });
    }

    const SummaryRow& find(const std::string& method, double rho, std::size_t n_train) const {
        for (const auto& row : summary)
            if (row.method == method && row.rho == rho && row.n_train == n_train) return row;
        throw Error(ErrorKind::Param, "no summary row for " + method);
    }

    /// Per-replicate AUCs for one cell (failed replicates skipped).
    std::vector<double> aucs(const std::string& method, double rho, std::size_t n_train) const {
        std::vector<double> out;
        for (const auto& r : records)
            if (r.method == method && r.rho == rho && r.n_train == n_train && r.auc) out.push_back(*r.auc);
        return out;
    }
};

struct MeanSe {
    double mean;
    double standard_error;
};

/// Sample mean and sd/sqrt(count); the error is NaN below two values.
inline MeanSe mean_and_se(std::span<const double> values) {
    if (values.empty()) return {std::nan(""), std::nan("")};
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    if (values.size() < 2) return {mean, std::nan("")};
    double ss = 0.0;
    for (const double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

namespace detail {

inline nlohmann::ordered_json experiment_config_json(const ExperimentConfig& cfg) {
    nlohmann::ordered_json j;
    j["seed"] = cfg.seed;
    j["seed_rule"] = "replicate r uses seed + r";
    j["replicates"] = cfg.replicates;
    j["methods"] = cfg.methods;
    j["rho"] = cfg.rhos;
    j["scheme"] = std::string(to_string(cfg.scheme));
    j["lambda"] = cfg.pipeline.lambda;
    j["sigma"] = cfg.pipeline.sigma ? nlohmann::ordered_json(*cfg.pipeline.sigma) : nlohmann::ordered_json("median");
    j["bin_width"] = cfg.pipeline.bin_width;
    j["bound"] = cfg.pipeline.bound;
    j["d_target"] = cfg.pipeline.d_target;
    j["lasso_folds"] = cfg.lasso_folds;
    if (cfg.external) {
        j["data"] = "external";
        j["n_train"] = std::vector<std::size_t>{cfg.external->data.n()};
        j["p"] = cfg.external->data.p();
    } else {
        j["data"] = "simulated";
        j["n_train"] = cfg.n_trains;
        const auto& b = cfg.bench;
        j["benchmark"] = {{"p", b.p},
                          {"p_extra", b.p_extra},
                          {"edge_prob", b.edge_prob},
                          {"weight_range", {b.weight_lo, b.weight_hi}},
                          {"noise_sd", b.noise_sd},
                          {"n_obs", b.n_obs},
                          {"knockout_sds", b.knockout_sds},
                          {"tau", b.tau},
                          {"min_density", b.min_density},
                          {"require_row_effects", b.require_row_effects}};
    }
    return j;
}

inline void validate(const ExperimentConfig& cfg) {
    if (cfg.replicates == 0) throw Error(ErrorKind::Param, "replicates must be >= 1");
    if (cfg.rhos.empty()) throw Error(ErrorKind::Param, "empty rho grid");
    if (!cfg.external && cfg.n_trains.empty()) throw Error(ErrorKind::Param, "empty n_train grid");
    if (cfg.methods.empty()) throw Error(ErrorKind::Param, "empty method list");
    for (const auto& m : cfg.methods) {
        const auto& known = known_methods();
        if (std::find(known.begin(), known.end(), m) == known.end()) {
            throw Error(ErrorKind::Param, "unknown method '" + m + "'");
        }
    }
    for (const double r : cfg.rhos)
        if (!(r > 0.0 && r < 1.0)) throw Error(ErrorKind::Param, "rho values must lie in (0,1)");
}

}  // namespace detail

/// Runs every (replicate, n_train, rho, method) cell. Replicate r draws its
/// benchmark from seed + r, so the gold standard of a replicate is shared by
/// all rho and n_train values. Failures are recorded, not thrown.
inline ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    detail::validate(cfg);
    const std::vector<std::size_t> n_trains =
        cfg.external ? std::vector<std::size_t>{cfg.external->data.n()} : cfg.n_trains;
    const std::size_t cells_per_replicate = n_trains.size() * cfg.rhos.size() * cfg.methods.size();

    // Indexed [replicate][n_train][rho][method].
    std::vector<ReplicateRecord> slots(cfg.replicates * cells_per_replicate);
    auto slot = [&](std::size_t r, std::size_t t, std::size_t q, std::size_t mi) -> ReplicateRecord& {
        return slots[((r * n_trains.size() + t) * cfg.rhos.size() + q) * cfg.methods.size() + mi];
    };

    parallel_for(cfg.replicates, cfg.threads, [&](std::size_t r) {
        const std::uint64_t rep_seed = cfg.seed + r;
        for (std::size_t t = 0; t < n_trains.size(); ++t) {
            for (std::size_t q = 0; q < cfg.rhos.size(); ++q)
                for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi)
                    slot(r, t, q, mi) = {cfg.methods[mi], cfg.rhos[q], n_trains[t], r, std::nullopt, {}};

            auto fail_all = [&](const std::string& msg) {
                for (std::size_t q = 0; q < cfg.rhos.size(); ++q)
                    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) slot(r, t, q, mi).error = msg;
            };

            std::optional<DataMatrix> data;
            std::optional<AdjacencyMatrix> gold;
            try {
                if (cfg.external) {
                    data = cfg.external->data;
                    gold = cfg.external->gold;
                } else {
                    auto bench_cfg = cfg.bench;
                    bench_cfg.n_train = n_trains[t];
                    auto inst = make_benchmark(bench_cfg, rep_seed);
                    data = std::move(inst.train);
                    gold = std::move(inst.gold.adjacency);
                }
            } catch (const std::exception& e) {
                fail_all(e.what());
                continue;
            }

            std::vector<LabelAssignment> labels;
            std::vector<std::string> label_errors(cfg.rhos.size());
            for (std::size_t q = 0; q < cfg.rhos.size(); ++q) {
                try {
                    labels.push_back(sample_labels(*gold, cfg.rhos[q], cfg.scheme, mix_seed(rep_seed, 100 + q)));
                } catch (const std::exception& e) {
                    labels.push_back(LabelAssignment::all_unlabelled(gold->p()));
                    label_errors[q] = e.what();
                }
            }

            for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
                const auto& method = cfg.methods[mi];
                std::optional<PreparedGraph> graph;
                std::optional<ScoreTable> table;
                try {
                    if (method == "sscd") {
                        auto opts = cfg.pipeline;
                        opts.threads = 1;
                        graph = prepare_graph(*data, opts);
                    } else if (method == "pearson") {
                        table = pearson_scores(*data);
                    } else if (method == "kendall") {
                        table = kendall_scores(*data);
                    } else {
                        table = lasso_scores(*data, {cfg.lasso_folds, 50, 1e-3, mix_seed(rep_seed, 7)});
                    }
                } catch (const std::exception& e) {
                    for (std::size_t q = 0; q < cfg.rhos.size(); ++q) slot(r, t, q, mi).error = e.what();
                    continue;
                }
                for (std::size_t q = 0; q < cfg.rhos.size(); ++q) {
                    auto& rec = slot(r, t, q, mi);
                    if (!label_errors[q].empty()) {
                        rec.error = label_errors[q];
                        continue;
                    }
                    try {
                        const RocResult roc = graph ? evaluate_on_unlabelled(fit_sscd(*graph, labels[q], cfg.pipeline.lambda),
                                                                             *gold, labels[q])
                                                    : evaluate_on_unlabelled(*table, *gold, labels[q]);
                        rec.auc = roc.auc;
                    } catch (const std::exception& e) {
                        rec.error = e.what();
                    }
                }
            }
        }
    });

    ExperimentReport report;
    report.config = detail::experiment_config_json(cfg);
    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
        for (std::size_t q = 0; q < cfg.rhos.size(); ++q) {
            for (std::size_t t = 0; t < n_trains.size(); ++t) {
                SummaryRow row{cfg.methods[mi], cfg.rhos[q], n_trains[t], 0, 0, std::nan(""), std::nan("")};
                std::vector<double> values;
                for (std::size_t r = 0; r < cfg.replicates; ++r) {
                    const auto& rec = slot(r, t, q, mi);
                    report.records.push_back(rec);
                    if (rec.auc) values.push_back(*rec.auc);
                }
                row.completed = values.size();
                row.failed = cfg.replicates - values.size();
                const auto stats = mean_and_se(values);
                row.mean = stats.mean;
                row.standard_error = stats.standard_error;
                report.summary.push_back(row);
            }
        }
    }
    return report;
}

inline nlohmann::ordered_json to_json(const ExperimentReport& report) {
    auto num = [](double v) { return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr); };
    nlohmann::ordered_json j;
    j["config"] = report.config;
    j["summary"] = nlohmann::ordered_json::array();
    for (const auto& s : report.summary) {
        j["summary"].push_back({{"method", s.method},
                                {"rho", s.rho},
                                {"n_train", s.n_train},
                                {"completed", s.completed},
                                {"failed", s.failed},
                                {"mean_auc", num(s.mean)},
                                {"se_auc", num(s.standard_error)}});
    }
    j["replicates"] = nlohmann::ordered_json::array();
    for (const auto& r : report.records) {
        nlohmann::ordered_json row{{"method", r.method}, {"rho", r.rho}, {"n_train", r.n_train}, {"replicate", r.replicate}};
        row["auc"] = r.auc ? nlohmann::ordered_json(*r.auc) : nlohmann::ordered_json(nullptr);
        if (!r.error.empty()) row["error"] = r.error;
        j["replicates"].push_back(std::move(row));
    }
    return j;
}

/// Flat `method,rho,n_train,replicate,auc` table; failed cells read NA.
inline void write_report_csv(std::ostream& out, const ExperimentReport& report) {
    out << "method,rho,n_train,replicate,auc\n";
    for (const auto& r : report.records) {
        out << r.method << ',' << nlohmann::json(r.rho).dump() << ',' << r.n_train << ',' << r.replicate << ',';
        if (r.auc) out << nlohmann::json(*r.auc).dump();
        else out << "NA";
        out << '\n';
    }
}

}  // namespace sscd
