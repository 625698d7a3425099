#pragma once

// Synthetic interventional benchmarks: linear-Gaussian structural equation
// models with clamping interventions, robust z-score and reachability gold
// standards, and the random / row-wise label sampling schemes.

#include "sscd/error.hpp"
#include "sscd/pairspace.hpp"
#include "sscd/random.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace sscd {

struct SemEdge {
    std::size_t from;
    std::size_t to;
    double weight;
    friend bool operator==(const SemEdge&, const SemEdge&) = default;
};

/// x_v = sum_{u->v} w_uv x_u + e_v with e_v ~ N(0, noise_sd^2).
struct SemSpec {
    std::size_t p = 0;
    std::vector<SemEdge> edges;
    double noise_sd = 1.0;
    std::uint64_t seed = 0;
    friend bool operator==(const SemSpec&, const SemSpec&) = default;
};

struct Intervention {
    std::size_t target;
    double value;
};

/// Row r of `interventional` was drawn with interventions[r] applied.
struct SemDraw {
    Matrix observational;
    Matrix interventional;
};

enum class GoldProvenance { ZScore, Reachability };

struct GoldStandard {
    AdjacencyMatrix adjacency;
    double tau = std::numeric_limits<double>::infinity();
    GoldProvenance provenance = GoldProvenance::Reachability;
    /// Effect variables dropped because their observational IQR is zero;
    /// their columns are left at 0.
    std::vector<std::size_t> excluded;
};

enum class LabelScheme { Random, RowWise };

inline std::string_view to_string(LabelScheme s) noexcept { return s == LabelScheme::Random ? "random" : "rowwise"; }

/// Kahn's algorithm; ties broken by smallest index so the order is canonical.
inline std::vector<std::size_t> topological_order(const SemSpec& spec) {
    std::vector<std::size_t> indegree(spec.p, 0);
    std::vector<std::vector<std::size_t>> children(spec.p);
    for (const auto& e : spec.edges) {
        if (e.from >= spec.p || e.to >= spec.p) throw Error(ErrorKind::Index, "SEM edge endpoint out of range");
        if (e.from == e.to) throw Error(ErrorKind::Cycle, "self-loop on variable " + std::to_string(e.from));
        children[e.from].push_back(e.to);
        ++indegree[e.to];
    }
    std::vector<std::size_t> ready;
    for (std::size_t v = 0; v < spec.p; ++v)
        if (indegree[v] == 0) ready.push_back(v);
    std::vector<std::size_t> order;
    order.reserve(spec.p);
    while (!ready.empty()) {
        const auto it = std::min_element(ready.begin(), ready.end());
        const std::size_t v = *it;
        ready.erase(it);
        order.push_back(v);
        for (const auto c : children[v])
            if (--indegree[c] == 0) ready.push_back(c);
    }
    if (order.size() != spec.p) throw Error(ErrorKind::Cycle, "SEM edge set contains a directed cycle");
    return order;
}

inline void validate(const SemSpec& spec) {
    if (spec.p < 1) throw Error(ErrorKind::Param, "SEM needs at least one variable");
    if (!(spec.noise_sd > 0.0) || !std::isfinite(spec.noise_sd)) throw Error(ErrorKind::Param, "noise_sd must be > 0");
    for (const auto& e : spec.edges) {
        if (!std::isfinite(e.weight) || e.weight == 0.0) throw Error(ErrorKind::Param, "edge weights must be finite and nonzero");
    }
    topological_order(spec);
}

/// Weight matrix B with B(u,v) = w_uv.
inline Matrix sem_weights(const SemSpec& spec) {
    Matrix b = Matrix::Zero(static_cast<Eigen::Index>(spec.p), static_cast<Eigen::Index>(spec.p));
    for (const auto& e : spec.edges) b(static_cast<Eigen::Index>(e.from), static_cast<Eigen::Index>(e.to)) += e.weight;
    return b;
}

/// Observational covariance noise_sd^2 (I - B')^{-1} (I - B)^{-1}.
inline Matrix sem_covariance(const SemSpec& spec) {
    validate(spec);
    const auto p = static_cast<Eigen::Index>(spec.p);
    const Matrix mix = (Matrix::Identity(p, p) - sem_weights(spec).transpose()).inverse();
    return spec.noise_sd * spec.noise_sd * mix * mix.transpose();
}

/// Random DAG over a seeded random variable order. Each forward pair becomes
/// an edge with probability edge_prob; weights are +-U[w_lo, w_hi].
inline SemSpec random_sem(std::size_t p, double edge_prob, std::uint64_t seed, double noise_sd = 1.0,
                          double w_lo = 0.5, double w_hi = 1.5) {
    if (p < 1) throw Error(ErrorKind::Param, "SEM needs at least one variable");
    if (!(edge_prob >= 0.0 && edge_prob <= 1.0)) throw Error(ErrorKind::Param, "edge probability must lie in [0,1]");
    if (!(w_lo > 0.0 && w_hi >= w_lo)) throw Error(ErrorKind::Param, "weight range must satisfy 0 < lo <= hi");
    auto rng = make_rng(seed, 0);
    std::vector<std::size_t> order(p);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    SemSpec spec{p, {}, noise_sd, seed};
    for (std::size_t a = 0; a < p; ++a) {
        for (std::size_t b = a + 1; b < p; ++b) {
            if (unit(rng) < edge_prob) {
                const double magnitude = w_lo + (w_hi - w_lo) * unit(rng);
                const double sign = unit(rng) < 0.5 ? -1.0 : 1.0;
                spec.edges.push_back({order[a], order[b], sign * magnitude});
            }
        }
    }
    std::sort(spec.edges.begin(), spec.edges.end(),
              [](const SemEdge& x, const SemEdge& y) { return x.from != y.from ? x.from < y.from : x.to < y.to; });
    return spec;
}

/// Samples n_obs observational rows plus one row per intervention, with the
/// intervened variable clamped and its structural equation removed.
/// `stream` selects an independent random stream under spec.seed.
inline SemDraw simulate_sem(const SemSpec& spec, std::size_t n_obs, const std::vector<Intervention>& interventions,
                            std::uint64_t stream = 1) {
    validate(spec);
    if (n_obs < 1) throw Error(ErrorKind::Param, "n_obs must be >= 1");
    for (const auto& iv : interventions) {
        if (iv.target >= spec.p) throw Error(ErrorKind::Index, "intervention target out of range");
        if (!std::isfinite(iv.value)) throw Error(ErrorKind::Param, "intervention value must be finite");
    }
    const auto order = topological_order(spec);
    std::vector<std::vector<std::pair<std::size_t, double>>> parents(spec.p);
    for (const auto& e : spec.edges) parents[e.to].emplace_back(e.from, e.weight);

    auto rng = make_rng(spec.seed, stream);
    std::normal_distribution<double> noise(0.0, spec.noise_sd);
    auto draw_row = [&](auto row, const Intervention* iv) {
        for (const auto v : order) {
            const double e = noise(rng);
            if (iv && iv->target == v) {
                row[static_cast<Eigen::Index>(v)] = iv->value;
                continue;
            }
            double x = e;
            for (const auto& [u, w] : parents[v]) x += w * row[static_cast<Eigen::Index>(u)];
            row[static_cast<Eigen::Index>(v)] = x;
        }
    };

    const auto p = static_cast<Eigen::Index>(spec.p);
    SemDraw out{Matrix(static_cast<Eigen::Index>(n_obs), p),
                Matrix(static_cast<Eigen::Index>(interventions.size()), p)};
    for (Eigen::Index r = 0; r < out.observational.rows(); ++r) draw_row(out.observational.row(r), nullptr);
    for (Eigen::Index r = 0; r < out.interventional.rows(); ++r) {
        draw_row(out.interventional.row(r), &interventions[static_cast<std::size_t>(r)]);
    }
    return out;
}

/// Linear-interpolation (type 7) quantile.
inline double quantile_type7(std::vector<double> values, double q) {
    if (values.empty()) throw Error(ErrorKind::EmptyData, "quantile of an empty sample");
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

/// A(i,j) = 1 iff |X_int(i,j) - median_j| / IQR_j > tau, where row i of
/// `intervention_rows` was measured under intervention on variable i and the
/// median/IQR come from the observational hold-out.
inline GoldStandard zscore_gold_standard(const Matrix& intervention_rows, const Matrix& obs_holdout, double tau = 5.0) {
    const auto p = obs_holdout.cols();
    if (intervention_rows.rows() != p || intervention_rows.cols() != p) {
        throw Error(ErrorKind::Param, "need one intervention row per variable (p x p)");
    }
    if (obs_holdout.rows() < 1) throw Error(ErrorKind::EmptyData, "empty observational hold-out");
    if (std::isnan(tau)) throw Error(ErrorKind::Param, "tau must not be NaN");
    GoldStandard gold{AdjacencyMatrix(static_cast<std::size_t>(p)), tau, GoldProvenance::ZScore, {}};
    for (Eigen::Index j = 0; j < p; ++j) {
        std::vector<double> col(obs_holdout.col(j).begin(), obs_holdout.col(j).end());
        const double median = quantile_type7(col, 0.5);
        const double iqr = quantile_type7(col, 0.75) - quantile_type7(col, 0.25);
        if (!(iqr > 0.0)) {
            gold.excluded.push_back(static_cast<std::size_t>(j));
            continue;
        }
        for (Eigen::Index i = 0; i < p; ++i) {
            if (i == j) continue;
            const double z = std::abs(intervention_rows(i, j) - median) / iqr;
            if (z > tau) gold.adjacency.set(static_cast<std::size_t>(i), static_cast<std::size_t>(j), true);
        }
    }
    return gold;
}

/// Transitive closure of the SEM's edge set.
inline GoldStandard reachability_gold_standard(const SemSpec& spec) {
    validate(spec);
    std::vector<std::vector<std::size_t>> children(spec.p);
    for (const auto& e : spec.edges) children[e.from].push_back(e.to);
    GoldStandard gold{AdjacencyMatrix(spec.p), std::numeric_limits<double>::infinity(), GoldProvenance::Reachability, {}};
    for (std::size_t src = 0; src < spec.p; ++src) {
        std::vector<char> seen(spec.p, 0);
        std::vector<std::size_t> stack(children[src].begin(), children[src].end());
        while (!stack.empty()) {
            const auto v = stack.back();
            stack.pop_back();
            if (seen[v]) continue;
            seen[v] = 1;
            if (v != src) gold.adjacency.set(src, v, true);
            for (const auto c : children[v]) stack.push_back(c);
        }
    }
    return gold;
}

/// Fraction of off-diagonal entries that are 1.
inline double edge_density(const AdjacencyMatrix& a) {
    const std::size_t p = a.p();
    return p < 2 ? 0.0 : static_cast<double>(a.edge_count()) / static_cast<double>(pair_count(p));
}

inline bool density_check(const AdjacencyMatrix& a, double min_fraction = 0.025) {
    return edge_density(a) >= min_fraction;
}

/// True when at least half of the rows contain a causal effect.
inline bool rows_have_effects(const AdjacencyMatrix& a) {
    std::size_t rows = 0;
    for (std::size_t i = 0; i < a.p(); ++i) {
        for (std::size_t j = 0; j < a.p(); ++j) {
            if (a(i, j)) {
                ++rows;
                break;
            }
        }
    }
    return 2 * rows >= a.p();
}

/// Random: floor(rho*m) pairs drawn without replacement. RowWise: floor(rho*p)
/// cause variables drawn without replacement, each contributing its whole row.
inline LabelAssignment sample_labels(const AdjacencyMatrix& a, double rho, LabelScheme scheme, std::uint64_t seed) {
    if (!(rho > 0.0 && rho < 1.0)) throw Error(ErrorKind::Param, "rho must lie in (0,1)");
    const std::size_t p = a.p();
    if (p < 2) throw Error(ErrorKind::Param, "need p >= 2");
    auto rng = make_rng(seed, 0);
    std::vector<Pair> observed;
    if (scheme == LabelScheme::Random) {
        const std::size_t m = pair_count(p);
        const auto take = static_cast<std::size_t>(std::floor(rho * static_cast<double>(m)));
        if (take == 0) throw Error(ErrorKind::Param, "rho yields no labelled pairs");
        std::vector<std::size_t> ks(m);
        std::iota(ks.begin(), ks.end(), std::size_t{0});
        std::shuffle(ks.begin(), ks.end(), rng);
        for (std::size_t t = 0; t < take; ++t) observed.push_back(pair_unindex(ks[t], p));
    } else {
        const auto take = static_cast<std::size_t>(std::floor(rho * static_cast<double>(p)));
        if (take == 0) throw Error(ErrorKind::Param, "rho yields no labelled rows");
        std::vector<std::size_t> rows(p);
        std::iota(rows.begin(), rows.end(), std::size_t{0});
        std::shuffle(rows.begin(), rows.end(), rng);
        for (std::size_t t = 0; t < take; ++t)
            for (std::size_t j = 0; j < p; ++j)
                if (j != rows[t]) observed.push_back({rows[t], j});
    }
    return labels_from_adjacency(a, observed);
}

// ---------------------------------------------------------------------------
// Benchmark instances
// ---------------------------------------------------------------------------

/// A causal discovery task over `p` variables of interest embedded in a larger
/// SEM. The gold standard comes from knocking out each variable of interest;
/// the training matrix mixes held-in observational samples with knockouts of
/// variables outside the set of interest.
struct BenchmarkConfig {
    std::size_t p = 20;
    std::size_t p_extra = 30;
    double edge_prob = 0.25;
    double weight_lo = 0.5;
    double weight_hi = 1.5;
    double noise_sd = 1.0;
    /// Observational samples; half form the gold-standard hold-out.
    std::size_t n_obs = 160;
    std::size_t n_train = 500;
    /// Knockouts clamp a variable to -knockout_sds marginal standard deviations.
    double knockout_sds = 6.0;
    double tau = 5.0;
    double min_density = 0.025;
    bool require_row_effects = false;
    std::size_t max_attempts = 200;
};

struct BenchmarkInstance {
    SemSpec spec;
    /// SEM indices of the variables of interest, in column order.
    std::vector<std::size_t> targets;
    DataMatrix train;
    Matrix obs_holdout;
    Matrix intervention_rows;
    GoldStandard gold;
    GoldStandard reachability;
    std::size_t attempts = 1;
};

inline std::vector<std::string> variable_names(const std::vector<std::size_t>& targets) {
    std::vector<std::string> names;
    for (const auto t : targets) names.push_back("X" + std::to_string(t));
    return names;
}

/// Knockout value for each SEM variable.
inline std::vector<double> knockout_values(const SemSpec& spec, double sds) {
    const Matrix cov = sem_covariance(spec);
    std::vector<double> out(spec.p);
    for (std::size_t v = 0; v < spec.p; ++v) out[v] = -sds * std::sqrt(cov(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(v)));
    return out;
}

/// Draws SEMs until the z-score gold standard passes the density filter.
/// The SEM, hold-out and gold standard depend only on `seed`, never on n_train.
inline BenchmarkInstance make_benchmark(const BenchmarkConfig& cfg, std::uint64_t seed) {
    if (cfg.p < 2) throw Error(ErrorKind::Param, "benchmark needs p >= 2");
    if (cfg.n_obs < 4) throw Error(ErrorKind::Param, "benchmark needs n_obs >= 4");
    const std::size_t n_obs_train = cfg.n_obs - cfg.n_obs / 2;
    if (cfg.n_train < n_obs_train) {
        throw Error(ErrorKind::Param, "n_train must be at least the " + std::to_string(n_obs_train) +
                                          " observational training samples");
    }
    if (cfg.p_extra == 0 && cfg.n_train != n_obs_train) {
        throw Error(ErrorKind::Param, "interventional training samples need p_extra > 0");
    }
    const std::size_t total = cfg.p + cfg.p_extra;

    for (std::size_t attempt = 0; attempt < cfg.max_attempts; ++attempt) {
        const std::uint64_t sem_seed = mix_seed(seed, 1000 + attempt);
        SemSpec spec = random_sem(total, cfg.edge_prob, sem_seed, cfg.noise_sd, cfg.weight_lo, cfg.weight_hi);

        auto rng = make_rng(sem_seed, 1);
        std::vector<std::size_t> perm(total);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<std::size_t> targets(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(cfg.p));
        std::vector<std::size_t> outside(perm.begin() + static_cast<std::ptrdiff_t>(cfg.p), perm.end());
        std::sort(targets.begin(), targets.end());
        std::sort(outside.begin(), outside.end());

        const auto knock = knockout_values(spec, cfg.knockout_sds);
        std::vector<Intervention> gold_ivs;
        for (const auto t : targets) gold_ivs.push_back({t, knock[t]});
        const SemDraw gold_draw = simulate_sem(spec, cfg.n_obs, gold_ivs, 2);

        auto restrict_cols = [&](const Matrix& full) {
            Matrix out(full.rows(), static_cast<Eigen::Index>(targets.size()));
            for (std::size_t c = 0; c < targets.size(); ++c) out.col(static_cast<Eigen::Index>(c)) = full.col(static_cast<Eigen::Index>(targets[c]));
            return out;
        };
        const Matrix obs = restrict_cols(gold_draw.observational);
        const auto half = static_cast<Eigen::Index>(cfg.n_obs / 2);
        Matrix holdout = obs.topRows(half);
        Matrix obs_train = obs.bottomRows(obs.rows() - half);
        Matrix iv_rows = restrict_cols(gold_draw.interventional);

        GoldStandard gold = zscore_gold_standard(iv_rows, holdout, cfg.tau);
        if (!density_check(gold.adjacency, cfg.min_density)) continue;
        if (cfg.require_row_effects && !rows_have_effects(gold.adjacency)) continue;

        const std::size_t n_int = cfg.n_train - n_obs_train;
        std::vector<Intervention> train_ivs;
        auto pick = make_rng(sem_seed, 3);
        if (!outside.empty()) {
            std::uniform_int_distribution<std::size_t> which(0, outside.size() - 1);
            for (std::size_t r = 0; r < n_int; ++r) {
                const auto t = outside[which(pick)];
                train_ivs.push_back({t, knock[t]});
            }
        }
        const SemDraw train_draw = simulate_sem(spec, 1, train_ivs, 4);
        Matrix train(static_cast<Eigen::Index>(cfg.n_train), static_cast<Eigen::Index>(cfg.p));
        train.topRows(obs_train.rows()) = obs_train;
        if (n_int > 0) train.bottomRows(static_cast<Eigen::Index>(n_int)) = restrict_cols(train_draw.interventional);

        const GoldStandard full_reach = reachability_gold_standard(spec);
        GoldStandard reach{AdjacencyMatrix(cfg.p), full_reach.tau, GoldProvenance::Reachability, {}};
        for (std::size_t a = 0; a < cfg.p; ++a)
            for (std::size_t b = 0; b < cfg.p; ++b)
                if (a != b && full_reach.adjacency(targets[a], targets[b])) reach.adjacency.set(a, b, true);

        auto names = variable_names(targets);
        return {std::move(spec), std::move(targets), DataMatrix(std::move(train), std::move(names)),
                std::move(holdout), std::move(iv_rows), std::move(gold), std::move(reach), attempt + 1};
    }
    throw Error(ErrorKind::Param, "no SEM met the gold-standard density filter within " +
                                      std::to_string(cfg.max_attempts) + " attempts");
}

}  // namespace sscd
