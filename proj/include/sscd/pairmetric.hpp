#pragma once

// Distances between variable pairs and the Gaussian similarity graph over them.

#include "sscd/error.hpp"
#include "sscd/histfeat.hpp"
#include "sscd/pairspace.hpp"
#include "sscd/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace sscd {

enum class MetricKind { ExactHistogramL2, PcaEuclidean };

inline std::string_view to_string(MetricKind kind) noexcept {
    return kind == MetricKind::ExactHistogramL2 ? "exact_histogram_l2" : "pca_euclidean";
}

struct DistanceMatrix {
    Matrix d;
    MetricKind kind = MetricKind::ExactHistogramL2;
    std::size_t m() const noexcept { return static_cast<std::size_t>(d.rows()); }
};

struct SimilarityMatrix {
    Matrix w;
    double sigma = 1.0;
    std::size_t m() const noexcept { return static_cast<std::size_t>(w.rows()); }
};

/// L2 distance between two piecewise-constant densities on the same grid:
/// (1/h) * ||mass1 - mass2||.
inline double density_l2_distance(const HistogramDensity& a, const HistogramDensity& b) {
    if (!(a.grid == b.grid)) throw Error(ErrorKind::Grid, "histograms live on different grids");
    double acc = 0.0;
    for (Eigen::Index c = 0; c < a.mass.cols(); ++c) {
        for (Eigen::Index r = 0; r < a.mass.rows(); ++r) {
            const double diff = a.mass(r, c) - b.mass(r, c);
            acc += diff * diff;
        }
    }
    return std::sqrt(acc) / a.grid.bin_width;
}

/// Raw features give the exact histogram L2 distance; PCA features give the
/// Euclidean distance in the reduced space, carrying the same 1/h scale.
inline DistanceMatrix pair_distance_matrix(const PairFeatureMatrix& features, unsigned threads = 1) {
    if (features.kind == FeatureKind::PcaReduced && !features.basis) {
        throw Error(ErrorKind::Kind, "PCA-reduced features without a basis");
    }
    if (features.kind == FeatureKind::RawBins && features.d() != features.grid.cell_count()) {
        throw Error(ErrorKind::Kind, "raw bin features do not match the histogram grid");
    }
    const Matrix cols = features.features.transpose();
    const auto m = cols.cols();
    const double scale = 1.0 / features.grid.bin_width;
    Matrix d = Matrix::Zero(m, m);
    parallel_for(static_cast<std::size_t>(m), threads, [&](std::size_t a) {
        const auto i = static_cast<Eigen::Index>(a);
        for (Eigen::Index j = i + 1; j < m; ++j) d(i, j) = scale * (cols.col(i) - cols.col(j)).norm();
    });
    d.triangularView<Eigen::StrictlyLower>() = d.transpose();
    return {std::move(d), features.kind == FeatureKind::RawBins ? MetricKind::ExactHistogramL2
                                                                 : MetricKind::PcaEuclidean};
}

/// Median of the upper-triangle distances; falls back to the smallest
/// positive distance when the median is zero, and to 1 when all are zero.
inline double median_heuristic_sigma(const DistanceMatrix& dist) {
    const auto m = dist.d.rows();
    if (m < 2) throw Error(ErrorKind::Param, "median heuristic needs at least two pairs");
    std::vector<double> off;
    off.reserve(static_cast<std::size_t>(m * (m - 1) / 2));
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = i + 1; j < m; ++j) off.push_back(dist.d(i, j));
    const std::size_t half = off.size() / 2;
    std::nth_element(off.begin(), off.begin() + static_cast<std::ptrdiff_t>(half), off.end());
    double median = off[half];
    if (off.size() % 2 == 0) {
        const double lower = *std::max_element(off.begin(), off.begin() + static_cast<std::ptrdiff_t>(half));
        median = 0.5 * (lower + median);
    }
    if (median > 0.0) return median;
    double smallest = 0.0;
    for (const double v : off)
        if (v > 0.0 && (smallest == 0.0 || v < smallest)) smallest = v;
    return smallest > 0.0 ? smallest : 1.0;
}

/// W = exp(-d^2 / (2 sigma^2)), dense.
inline SimilarityMatrix similarity_matrix(const DistanceMatrix& dist, double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw Error(ErrorKind::Param, "sigma must be positive and finite");
    const double scale = -1.0 / (2.0 * sigma * sigma);
    Matrix w = (dist.d.array().square() * scale).exp().matrix();
    w.diagonal().setOnes();
    return {std::move(w), sigma};
}

}  // namespace sscd
