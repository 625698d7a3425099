#pragma once

// standardize -> pair histograms -> PCA -> distances -> similarity -> Laplacian,
// after which any number of label sets can be fitted against the same graph.

#include "sscd/histfeat.hpp"
#include "sscd/laprls.hpp"
#include "sscd/pairmetric.hpp"
#include "sscd/pairspace.hpp"

#include <optional>

namespace sscd {

struct PipelineOptions {
    double bin_width = 0.2;
    double bound = 3.0;
    /// 0 keeps the raw bin features.
    std::size_t d_target = 100;
    double lambda = kDefaultLambda;
    /// Median heuristic when unset.
    std::optional<double> sigma;
    unsigned threads = 1;
};

struct PreparedGraph {
    LaplacianSystem system;
    double sigma = 0.0;
    std::size_t feature_dim = 0;
    MetricKind metric = MetricKind::PcaEuclidean;
};

inline PairFeatureMatrix build_features(const DataMatrix& data, const PipelineOptions& opts) {
    const auto grid = HistogramGrid::symmetric(opts.bin_width, opts.bound);
    auto raw = pair_features(standardize_truncate(data, opts.bound), grid, opts.threads);
    if (opts.d_target == 0) return raw;
    return pca_reduce(raw, opts.d_target);
}

inline PreparedGraph prepare_graph(const DataMatrix& data, const PipelineOptions& opts) {
    const auto features = build_features(data, opts);
    const auto dist = pair_distance_matrix(features, opts.threads);
    const double sigma = opts.sigma ? *opts.sigma : median_heuristic_sigma(dist);
    return {normalized_laplacian(similarity_matrix(dist, sigma)), sigma, features.d(), dist.kind};
}

inline FitResult fit_sscd(const PreparedGraph& graph, const LabelAssignment& labels, double lambda) {
    return fit(graph.system, labels, lambda, graph.sigma);
}

inline FitResult fit_sscd(const DataMatrix& data, const LabelAssignment& labels, const PipelineOptions& opts = {}) {
    return fit_sscd(prepare_graph(data, opts), labels, opts.lambda);
}

}  // namespace sscd
