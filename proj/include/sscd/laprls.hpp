#pragma once

// Laplacian-regularized least squares over the pair similarity graph.
//
// With F the m x 2 score matrix (columns: non-causal, causal), Y the one-hot
// labels of the labelled pairs, and L the normalized Laplacian, the fit
// minimizes
//
//   J(F) = (1/m_L) * sum_{k in L} ||F_k - Y_k||^2 + (lambda/m^2) * tr(F' L F)
//
// whose stationarity condition is (S + gamma L) F = Y_pad with S the 0/1
// selector of labelled rows and gamma = lambda * m_L / m^2. A ridge eps*I keeps
// the system positive definite on graphs with label-free components.

#include "sscd/error.hpp"
#include "sscd/pairmetric.hpp"
#include "sscd/pairspace.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace sscd {

inline constexpr double kDefaultLambda = 0.001;
inline constexpr double kRidge = 1e-8;

struct LaplacianSystem {
    Matrix laplacian;
    Vector degrees;
    std::size_t m() const noexcept { return static_cast<std::size_t>(laplacian.rows()); }
};

struct FitResult {
    Matrix f;  // m x 2
    Vector scores;
    std::vector<int> predictions;
    double lambda = kDefaultLambda;
    double sigma = 0.0;
};

/// L = I - D^{-1/2} W D^{-1/2} with degrees the full row sums of W.
inline LaplacianSystem normalized_laplacian(const SimilarityMatrix& sim) {
    const auto& w = sim.w;
    if (w.rows() != w.cols()) throw Error(ErrorKind::Param, "similarity matrix must be square");
    if ((w.array() < 0.0).any()) throw Error(ErrorKind::Param, "similarity matrix has negative entries");
    Vector degrees = w.rowwise().sum();
    for (Eigen::Index k = 0; k < degrees.size(); ++k) {
        if (!(degrees[k] > 0.0)) throw Error(ErrorKind::Degree, "pair " + std::to_string(k) + " has zero degree");
    }
    const Vector inv_sqrt = degrees.cwiseSqrt().cwiseInverse();
    Matrix lap = -(inv_sqrt.asDiagonal() * w * inv_sqrt.asDiagonal());
    lap.diagonal().array() += 1.0;
    // Symmetrize away rounding asymmetry.
    lap = 0.5 * (lap + lap.transpose()).eval();
    return {std::move(lap), std::move(degrees)};
}

namespace detail {

inline Matrix padded_labels(const LabelAssignment& labels) {
    Matrix y = Matrix::Zero(static_cast<Eigen::Index>(labels.m()), 2);
    for (const auto k : labels.labelled()) {
        y(static_cast<Eigen::Index>(k), labels[k] == LabelState::Causal ? 1 : 0) = 1.0;
    }
    return y;
}

}  // namespace detail

/// (1/m_L) sum_{k in L} ||F_k - Y_k||^2 + (lambda/m^2) tr(F' L F).
inline double objective_value(const Matrix& f, const LaplacianSystem& sys, const LabelAssignment& labels,
                              double lambda) {
    const auto m = static_cast<double>(labels.m());
    const Matrix y = detail::padded_labels(labels);
    double loss = 0.0;
    for (const auto k : labels.labelled()) {
        loss += (f.row(static_cast<Eigen::Index>(k)) - y.row(static_cast<Eigen::Index>(k))).squaredNorm();
    }
    if (labels.m_labelled() > 0) loss /= static_cast<double>(labels.m_labelled());
    const double smooth = (f.transpose() * sys.laplacian * f).trace();
    return loss + lambda / (m * m) * smooth;
}

/// Analytic gradient of objective_value with respect to F.
inline Matrix objective_gradient(const Matrix& f, const LaplacianSystem& sys, const LabelAssignment& labels,
                                 double lambda) {
    const auto m = static_cast<double>(labels.m());
    const Matrix y = detail::padded_labels(labels);
    Matrix grad = (2.0 * lambda / (m * m)) * (sys.laplacian * f);
    const double w = 2.0 / static_cast<double>(labels.m_labelled());
    for (const auto k : labels.labelled()) {
        const auto r = static_cast<Eigen::Index>(k);
        grad.row(r) += w * (f.row(r) - y.row(r));
    }
    return grad;
}

/// Closed-form minimizer of the objective above. Scores are f(:,1) - f(:,0);
/// a pair is predicted causal iff its score is strictly positive.
inline FitResult fit(const LaplacianSystem& sys, const LabelAssignment& labels, double lambda = kDefaultLambda,
                     double sigma = 0.0) {
    if (labels.m() != sys.m()) {
        throw Error(ErrorKind::Param, "label count " + std::to_string(labels.m()) + " does not match system size " +
                                          std::to_string(sys.m()));
    }
    if (labels.m_labelled() == 0) throw Error(ErrorKind::NoLabels, "no labelled pairs to fit");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw Error(ErrorKind::Param, "lambda must be >= 0");

    const auto m = static_cast<double>(labels.m());
    const double gamma = lambda * static_cast<double>(labels.m_labelled()) / (m * m);
    Matrix system = gamma * sys.laplacian;
    system.diagonal().array() += kRidge;
    for (const auto k : labels.labelled()) system(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) += 1.0;

    Eigen::LLT<Matrix> llt(system);
    if (llt.info() != Eigen::Success) throw Error(ErrorKind::Solve, "system matrix is not positive definite");

    const Matrix y = detail::padded_labels(labels);
    Matrix f(y.rows(), 2);
    // Columns are solved one at a time so that exchanging the label columns
    // exchanges the solution columns bit for bit.
    for (Eigen::Index c = 0; c < 2; ++c) {
        f.col(c) = llt.solve(Vector(y.col(c)));
    }
    if (!f.allFinite()) throw Error(ErrorKind::Solve, "solution is not finite");

    Vector scores = f.col(1) - f.col(0);
    std::vector<int> predictions(static_cast<std::size_t>(scores.size()));
    for (Eigen::Index k = 0; k < scores.size(); ++k) predictions[static_cast<std::size_t>(k)] = scores[k] > 0.0 ? 1 : 0;
    return {std::move(f), std::move(scores), std::move(predictions), lambda, sigma};
}

}  // namespace sscd
