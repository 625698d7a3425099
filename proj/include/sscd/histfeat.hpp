#pragma once

// Pair featurization: column standardization with clamping, fixed-grid
// bivariate histograms, and PCA compression of the per-pair feature rows.

#include "sscd/error.hpp"
#include "sscd/pairspace.hpp"
#include "sscd/parallel.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace sscd {

/// Square [lower, upper]^2 split into bins x bins cells of side bin_width.
struct HistogramGrid {
    double lower = -3.0;
    double upper = 3.0;
    double bin_width = 0.2;
    std::size_t bins = 30;

    static HistogramGrid make(double bin_width, double lower, double upper) {
        if (!(bin_width > 0.0) || !(upper > lower)) {
            throw Error(ErrorKind::Grid, "need bin_width > 0 and upper > lower");
        }
        const double ratio = (upper - lower) / bin_width;
        const double rounded = std::round(ratio);
        if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
            throw Error(ErrorKind::Grid, "domain width " + std::to_string(upper - lower) +
                                             " is not an integer multiple of bin width " + std::to_string(bin_width));
        }
        return {lower, upper, bin_width, static_cast<std::size_t>(rounded)};
    }

    /// Symmetric domain [-bound, bound]^2.
    static HistogramGrid symmetric(double bin_width, double bound) { return make(bin_width, -bound, bound); }

    /// Grid with `bins` cells per axis; the bin width follows from the domain.
    static HistogramGrid with_bins(std::size_t bins, double lower, double upper) {
        if (bins == 0 || !(upper > lower)) throw Error(ErrorKind::Grid, "need bins >= 1 and upper > lower");
        return {lower, upper, (upper - lower) / static_cast<double>(bins), bins};
    }

    std::size_t cell_count() const noexcept { return bins * bins; }

    /// Bins are half-open except the last, which also takes the upper edge.
    std::size_t bin_of(double x) const noexcept {
        const double t = (x - lower) / (upper - lower) * static_cast<double>(bins);
        if (!(t > 0.0)) return 0;
        const auto idx = static_cast<std::size_t>(t);
        return idx >= bins ? bins - 1 : idx;
    }

    bool contains(double x) const noexcept { return x >= lower && x <= upper; }

    friend bool operator==(const HistogramGrid& a, const HistogramGrid& b) {
        return a.bins == b.bins && a.lower == b.lower && a.upper == b.upper;
    }
};

/// Histogram density estimate: bin proportions b_ij / n on a grid.
/// The density on bin (i,j) is mass(i,j) / h^2.
struct HistogramDensity {
    Matrix mass;
    HistogramGrid grid;
    std::size_t n = 0;

    double density(std::size_t i, std::size_t j) const {
        return mass(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) /
               (grid.bin_width * grid.bin_width);
    }

    /// Density at a point of the domain; zero outside.
    double operator()(double x, double y) const {
        if (!grid.contains(x) || !grid.contains(y)) return 0.0;
        return density(grid.bin_of(x), grid.bin_of(y));
    }
};

/// Column-wise z-scores (sample sd, denominator n-1), then clamped into
/// [-bound, bound]. Pass an infinite bound to skip clamping.
inline DataMatrix standardize_truncate(const DataMatrix& data, double bound = 3.0) {
    if (!(bound > 0.0)) throw Error(ErrorKind::Param, "truncation bound must be positive");
    Matrix out = data.values();
    const double n = static_cast<double>(out.rows());
    for (Eigen::Index c = 0; c < out.cols(); ++c) {
        auto col = out.col(c);
        const double mean = col.mean();
        col.array() -= mean;
        const double sd = std::sqrt(col.squaredNorm() / (n - 1.0));
        if (!(sd > 0.0) || col.cwiseAbs().maxCoeff() == 0.0) {
            throw Error(ErrorKind::ConstantVariable,
                        "variable '" + data.names()[static_cast<std::size_t>(c)] + "' is constant");
        }
        col /= sd;
        if (std::isfinite(bound)) col = col.cwiseMax(-bound).cwiseMin(bound);
    }
    return DataMatrix(std::move(out), data.names());
}

inline HistogramDensity histogram_estimate(const Eigen::Ref<const Vector>& xs, const Eigen::Ref<const Vector>& ys,
                                           const HistogramGrid& grid) {
    if (xs.size() != ys.size()) throw Error(ErrorKind::Param, "scatter coordinates differ in length");
    if (xs.size() == 0) throw Error(ErrorKind::EmptyData, "empty scatter");
    HistogramGrid::make(grid.bin_width, grid.lower, grid.upper);
    const auto nb = static_cast<Eigen::Index>(grid.bins);
    Matrix counts = Matrix::Zero(nb, nb);
    for (Eigen::Index r = 0; r < xs.size(); ++r) {
        if (!grid.contains(xs[r]) || !grid.contains(ys[r])) {
            throw Error(ErrorKind::Param, "scatter point (" + std::to_string(xs[r]) + "," + std::to_string(ys[r]) +
                                              ") lies outside the histogram domain");
        }
        counts(static_cast<Eigen::Index>(grid.bin_of(xs[r])), static_cast<Eigen::Index>(grid.bin_of(ys[r]))) += 1.0;
    }
    const auto n = static_cast<std::size_t>(xs.size());
    return {counts / static_cast<double>(n), grid, n};
}

/// n x 2 scatter overload.
inline HistogramDensity histogram_estimate(const Matrix& scatter, const HistogramGrid& grid) {
    if (scatter.cols() != 2) throw Error(ErrorKind::Param, "scatter must have two columns");
    return histogram_estimate(scatter.col(0), scatter.col(1), grid);
}

enum class FeatureKind { RawBins, PcaReduced };

inline std::string_view to_string(FeatureKind kind) noexcept {
    return kind == FeatureKind::RawBins ? "raw_bins" : "pca_reduced";
}

/// One feature row per ordered pair.
struct PairFeatureMatrix {
    Matrix features;
    FeatureKind kind = FeatureKind::RawBins;
    HistogramGrid grid;
    std::size_t p = 0;
    /// PcaReduced only: d_raw x d orthonormal basis and the d_raw feature mean.
    std::optional<Matrix> basis;
    std::optional<Eigen::RowVectorXd> mean;

    std::size_t m() const noexcept { return static_cast<std::size_t>(features.rows()); }
    std::size_t d() const noexcept { return static_cast<std::size_t>(features.cols()); }
};

/// Row k is the flattened mass grid of the scatter (X_i(k), X_j(k)); the first
/// variable indexes grid rows, so cell (a,b) sits at column a*bins + b.
inline PairFeatureMatrix pair_features(const DataMatrix& standardized, const HistogramGrid& grid = {},
                                       unsigned threads = 1) {
    HistogramGrid::make(grid.bin_width, grid.lower, grid.upper);
    const auto& v = standardized.values();
    const std::size_t p = standardized.p();
    const std::size_t n = standardized.n();
    std::vector<std::uint32_t> bin(n * p);
    for (std::size_t c = 0; c < p; ++c) {
        for (std::size_t r = 0; r < n; ++r) {
            const double x = v(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
            if (!grid.contains(x)) {
                throw Error(ErrorKind::Param, "value " + std::to_string(x) + " of '" + standardized.names()[c] +
                                                  "' lies outside the histogram domain; standardize first");
            }
            bin[c * n + r] = static_cast<std::uint32_t>(grid.bin_of(x));
        }
    }
    const std::size_t m = pair_count(p);
    Matrix features = Matrix::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(grid.cell_count()));
    const double unit = 1.0 / static_cast<double>(n);
    parallel_for(m, threads, [&](std::size_t k) {
        const auto [i, j] = pair_unindex(k, p);
        const auto row = static_cast<Eigen::Index>(k);
        for (std::size_t r = 0; r < n; ++r) {
            features(row, static_cast<Eigen::Index>(bin[i * n + r] * grid.bins + bin[j * n + r])) += unit;
        }
    });
    return {std::move(features), FeatureKind::RawBins, grid, p, std::nullopt, std::nullopt};
}

/// Centers the rows and projects them on the leading min(d_target, rank)
/// right singular vectors of the centered matrix.
inline PairFeatureMatrix pca_reduce(const PairFeatureMatrix& raw, std::size_t d_target = 100) {
    if (d_target == 0) throw Error(ErrorKind::Param, "PCA target dimension must be >= 1");
    if (raw.kind != FeatureKind::RawBins) throw Error(ErrorKind::Kind, "PCA expects raw bin features");
    const Eigen::RowVectorXd mean = raw.features.colwise().mean();
    const Matrix centered = raw.features.rowwise() - mean;

    Eigen::BDCSVD<Matrix> svd(centered, Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    Eigen::Index rank = 0;
    if (sv.size() > 0 && sv[0] > 0.0) {
        const double tol = static_cast<double>(std::max(centered.rows(), centered.cols())) *
                           std::numeric_limits<double>::epsilon() * sv[0];
        while (rank < sv.size() && sv[rank] > tol) ++rank;
    }
    const Eigen::Index d = std::min<Eigen::Index>(static_cast<Eigen::Index>(d_target), rank);
    Matrix basis = svd.matrixV().leftCols(d);
    Matrix projected = centered * basis;
    return {std::move(projected), FeatureKind::PcaReduced, raw.grid, raw.p, std::move(basis), mean};
}

}  // namespace sscd
