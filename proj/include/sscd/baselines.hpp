#pragma once

// Reference scorers that ignore the labels: Pearson and Kendall correlation
// (undirected, both directions share a score) and per-response Lasso
// coefficients chosen by cross-validation.

#include "sscd/error.hpp"
#include "sscd/pairspace.hpp"
#include "sscd/parallel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

namespace sscd {

struct ScoreTable {
    Vector scores;
    std::string method;
    /// Ranked by |score| when true (correlations and coefficients).
    bool use_absolute = true;
};

namespace detail {

inline void require_variation(const DataMatrix& data, std::size_t min_n) {
    if (data.n() < min_n) {
        throw Error(ErrorKind::EmptyData, "need at least " + std::to_string(min_n) + " samples, got " +
                                              std::to_string(data.n()));
    }
    const auto& v = data.values();
    for (Eigen::Index c = 0; c < v.cols(); ++c) {
        if (v.col(c).maxCoeff() == v.col(c).minCoeff()) {
            throw Error(ErrorKind::ConstantVariable,
                        "variable '" + data.names()[static_cast<std::size_t>(c)] + "' is constant");
        }
    }
}

template <typename PairScore>
Vector symmetric_scores(std::size_t p, PairScore&& score) {
    Vector out(static_cast<Eigen::Index>(pair_count(p)));
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = i + 1; j < p; ++j) {
            const double s = score(i, j);
            out[static_cast<Eigen::Index>(pair_index(i, j, p))] = s;
            out[static_cast<Eigen::Index>(pair_index(j, i, p))] = s;
        }
    }
    return out;
}

}  // namespace detail

inline double pearson_correlation(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y) {
    const Vector xc = x.array() - x.mean();
    const Vector yc = y.array() - y.mean();
    const double denom = std::sqrt(xc.squaredNorm() * yc.squaredNorm());
    if (!(denom > 0.0)) throw Error(ErrorKind::ConstantVariable, "correlation of a constant vector");
    return std::clamp(xc.dot(yc) / denom, -1.0, 1.0);
}

inline ScoreTable pearson_scores(const DataMatrix& data) {
    detail::require_variation(data, 3);
    const auto& v = data.values();
    return {detail::symmetric_scores(data.p(),
                                     [&](std::size_t i, std::size_t j) {
                                         return pearson_correlation(v.col(static_cast<Eigen::Index>(i)),
                                                                    v.col(static_cast<Eigen::Index>(j)));
                                     }),
            "pearson", true};
}

/// Kendall tau-b in O(n log n): sort by (x, y), then count the exchanges a
/// merge sort on y needs (the discordant pairs), correcting for ties.
inline double kendall_tau_b(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y) {
    const auto n = static_cast<std::size_t>(x.size());
    if (static_cast<std::size_t>(y.size()) != n) throw Error(ErrorKind::Param, "length mismatch");
    if (n < 2) throw Error(ErrorKind::EmptyData, "Kendall tau needs at least two samples");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto ia = static_cast<Eigen::Index>(a);
        const auto ib = static_cast<Eigen::Index>(b);
        return x[ia] < x[ib] || (x[ia] == x[ib] && y[ia] < y[ib]);
    });

    auto tied_pairs = [](const std::vector<double>& sorted) {
        std::int64_t ties = 0;
        std::int64_t run = 1;
        for (std::size_t i = 1; i <= sorted.size(); ++i) {
            if (i < sorted.size() && sorted[i] == sorted[i - 1]) {
                ++run;
            } else {
                ties += run * (run - 1) / 2;
                run = 1;
            }
        }
        return ties;
    };

    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = x[static_cast<Eigen::Index>(order[i])];
        ys[i] = y[static_cast<Eigen::Index>(order[i])];
    }
    const auto n0 = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
    const std::int64_t tx = tied_pairs(xs);
    std::int64_t txy = 0;
    {
        std::int64_t run = 1;
        for (std::size_t i = 1; i <= n; ++i) {
            if (i < n && xs[i] == xs[i - 1] && ys[i] == ys[i - 1]) {
                ++run;
            } else {
                txy += run * (run - 1) / 2;
                run = 1;
            }
        }
    }

    // Bottom-up merge sort on ys counting strict inversions.
    std::int64_t swaps = 0;
    std::vector<double> buf(n);
    for (std::size_t width = 1; width < n; width *= 2) {
        for (std::size_t lo = 0; lo < n; lo += 2 * width) {
            const std::size_t mid = std::min(lo + width, n);
            const std::size_t hi = std::min(lo + 2 * width, n);
            std::size_t i = lo, j = mid, out = lo;
            while (i < mid && j < hi) {
                if (ys[j] < ys[i]) {
                    swaps += static_cast<std::int64_t>(mid - i);
                    buf[out++] = ys[j++];
                } else {
                    buf[out++] = ys[i++];
                }
            }
            while (i < mid) buf[out++] = ys[i++];
            while (j < hi) buf[out++] = ys[j++];
        }
        std::swap(ys, buf);
    }
    const std::int64_t ty = tied_pairs(ys);

    const double denom = std::sqrt(static_cast<double>(n0 - tx) * static_cast<double>(n0 - ty));
    if (!(denom > 0.0)) throw Error(ErrorKind::ConstantVariable, "Kendall tau of an all-tied vector");
    const std::int64_t concordant_minus_discordant = n0 - tx - ty + txy - 2 * swaps;
    return static_cast<double>(concordant_minus_discordant) / denom;
}

inline ScoreTable kendall_scores(const DataMatrix& data) {
    detail::require_variation(data, 3);
    const auto& v = data.values();
    return {detail::symmetric_scores(data.p(),
                                     [&](std::size_t i, std::size_t j) {
                                         return kendall_tau_b(v.col(static_cast<Eigen::Index>(i)),
                                                              v.col(static_cast<Eigen::Index>(j)));
                                     }),
            "kendall", true};
}

// ---------------------------------------------------------------------------
// Lasso
// ---------------------------------------------------------------------------

/// Sufficient statistics of a least-squares problem in covariance form:
/// gram = X'X/n, xty = X'y/n, yty = y'y/n.
struct LassoProblem {
    Matrix gram;
    Vector xty;
    double yty = 0.0;

    static LassoProblem from_data(const Matrix& x, const Vector& y) {
        const auto n = static_cast<double>(x.rows());
        return {x.transpose() * x / n, x.transpose() * y / n, y.squaredNorm() / n};
    }

    /// Smallest lambda at which every coefficient is zero.
    double lambda_max() const { return xty.size() ? xty.cwiseAbs().maxCoeff() : 0.0; }

    /// (1/2n)||y - X b||^2 + lambda ||b||_1.
    double objective(const Vector& beta, double lambda) const {
        return 0.5 * (yty - 2.0 * xty.dot(beta) + beta.dot(gram * beta)) + lambda * beta.lpNorm<1>();
    }

    /// Largest violation of the Lasso optimality conditions.
    double kkt_residual(const Vector& beta, double lambda) const {
        const Vector corr = xty - gram * beta;
        double worst = 0.0;
        for (Eigen::Index j = 0; j < beta.size(); ++j) {
            const double v = beta[j] != 0.0 ? std::abs(corr[j] - lambda * (beta[j] > 0.0 ? 1.0 : -1.0))
                                            : std::max(std::abs(corr[j]) - lambda, 0.0);
            worst = std::max(worst, v);
        }
        return worst;
    }
};

inline double soft_threshold(double z, double t) noexcept {
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

struct LassoOptions {
    double tolerance = 1e-13;
    std::size_t max_sweeps = 100000;
};

/// Cyclic coordinate descent from the warm start in `beta`; returns the
/// number of sweeps performed.
inline std::size_t lasso_coordinate_descent(const LassoProblem& prob, double lambda, Vector& beta,
                                            const LassoOptions& opts = {}) {
    const auto q = prob.gram.rows();
    if (beta.size() != q) beta = Vector::Zero(q);
    Vector grad = prob.xty - prob.gram * beta;  // X'(y - Xb)/n
    for (std::size_t sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
        double max_step = 0.0;
        for (Eigen::Index j = 0; j < q; ++j) {
            const double z = prob.gram(j, j);
            if (!(z > 0.0)) continue;
            const double old = beta[j];
            const double updated = soft_threshold(grad[j] + z * old, lambda) / z;
            const double delta = updated - old;
            if (delta != 0.0) {
                beta[j] = updated;
                grad -= prob.gram.col(j) * delta;
                max_step = std::max(max_step, std::abs(delta) * std::sqrt(z));
            }
        }
        if (max_step < opts.tolerance) return sweep;
    }
    return opts.max_sweeps;
}

/// `count` values log-spaced from lambda_max down to ratio * lambda_max.
inline std::vector<double> lasso_lambda_path(double lambda_max, std::size_t count = 50, double ratio = 1e-3) {
    std::vector<double> out(count);
    for (std::size_t k = 0; k < count; ++k) {
        const double t = count > 1 ? static_cast<double>(k) / static_cast<double>(count - 1) : 0.0;
        out[k] = lambda_max * std::pow(ratio, t);
    }
    return out;
}

struct LassoCvOptions {
    std::size_t folds = 5;
    std::size_t path_length = 50;
    double path_ratio = 1e-3;
    std::uint64_t seed = 0;
};

namespace detail {

/// Centers columns and scales them to unit mean square using the given rows.
struct ColumnScaler {
    Eigen::RowVectorXd mean;
    Eigen::RowVectorXd scale;

    static ColumnScaler fit(const Matrix& x) {
        ColumnScaler s;
        s.mean = x.colwise().mean();
        const Matrix centered = x.rowwise() - s.mean;
        s.scale = (centered.colwise().squaredNorm() / static_cast<double>(x.rows())).cwiseSqrt();
        for (Eigen::Index c = 0; c < s.scale.size(); ++c) {
            if (!(s.scale[c] > 0.0)) throw Error(ErrorKind::Cv, "constant column in a training split");
        }
        return s;
    }

    Matrix apply(const Matrix& x) const {
        return (x.rowwise() - mean).array().rowwise() / scale.array();
    }
};

inline Matrix take_rows(const Matrix& x, const std::vector<Eigen::Index>& rows) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = x.row(rows[r]);
    return out;
}

inline std::vector<Eigen::Index> others(Eigen::Index p, Eigen::Index skip) {
    std::vector<Eigen::Index> out;
    for (Eigen::Index c = 0; c < p; ++c)
        if (c != skip) out.push_back(c);
    return out;
}

/// Sub-problem regressing column `response` on every other column of a
/// standardized Gram matrix.
inline LassoProblem response_problem(const Matrix& gram, Eigen::Index response) {
    const auto idx = others(gram.rows(), response);
    const auto q = static_cast<Eigen::Index>(idx.size());
    LassoProblem prob{Matrix(q, q), Vector(q), gram(response, response)};
    for (Eigen::Index a = 0; a < q; ++a) {
        prob.xty[a] = gram(idx[static_cast<std::size_t>(a)], response);
        for (Eigen::Index b = 0; b < q; ++b) {
            prob.gram(a, b) = gram(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
        }
    }
    return prob;
}

}  // namespace detail

/// Deterministic fold id per sample: a seeded shuffle dealt round-robin.
inline std::vector<std::size_t> cv_fold_assignment(std::size_t n, std::size_t folds, std::uint64_t seed) {
    if (folds < 2 || n < 2 * folds) {
        throw Error(ErrorKind::Cv, "cannot split " + std::to_string(n) + " samples into " + std::to_string(folds) +
                                       " folds");
    }
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::size_t> fold(n);
    for (std::size_t r = 0; r < n; ++r) fold[perm[r]] = r % folds;
    return fold;
}

/// Score at k(i,j) is |coefficient of i| in the CV-selected Lasso model
/// for response j.
inline ScoreTable lasso_scores(const DataMatrix& data, const LassoCvOptions& opts = {}, unsigned threads = 1) {
    detail::require_variation(data, 2);
    const auto& x = data.values();
    const auto n = x.rows();
    const auto p = x.cols();
    const auto fold = cv_fold_assignment(static_cast<std::size_t>(n), opts.folds, opts.seed);

    const auto full_scaler = detail::ColumnScaler::fit(x);
    const Matrix full = full_scaler.apply(x);
    const Matrix full_gram = full.transpose() * full / static_cast<double>(n);

    struct Split {
        Matrix gram;
        Matrix test;
    };
    std::vector<Split> splits;
    for (std::size_t f = 0; f < opts.folds; ++f) {
        std::vector<Eigen::Index> train_rows, test_rows;
        for (Eigen::Index r = 0; r < n; ++r) (fold[static_cast<std::size_t>(r)] == f ? test_rows : train_rows).push_back(r);
        const Matrix train_raw = detail::take_rows(x, train_rows);
        const auto scaler = detail::ColumnScaler::fit(train_raw);
        const Matrix train = scaler.apply(train_raw);
        splits.push_back({train.transpose() * train / static_cast<double>(train.rows()),
                          scaler.apply(detail::take_rows(x, test_rows))});
    }

    Vector scores = Vector::Zero(static_cast<Eigen::Index>(pair_count(static_cast<std::size_t>(p))));
    parallel_for(static_cast<std::size_t>(p), threads, [&](std::size_t response_index) {
        const auto response = static_cast<Eigen::Index>(response_index);
        const auto predictors = detail::others(p, response);
        const LassoProblem full_prob = detail::response_problem(full_gram, response);
        const auto path = lasso_lambda_path(full_prob.lambda_max(), opts.path_length, opts.path_ratio);

        std::vector<double> cv_error(path.size(), 0.0);
        for (const auto& split : splits) {
            const LassoProblem prob = detail::response_problem(split.gram, response);
            Matrix test_x(split.test.rows(), static_cast<Eigen::Index>(predictors.size()));
            for (std::size_t c = 0; c < predictors.size(); ++c) test_x.col(static_cast<Eigen::Index>(c)) = split.test.col(predictors[c]);
            const Vector test_y = split.test.col(response);
            Vector beta = Vector::Zero(test_x.cols());
            for (std::size_t l = 0; l < path.size(); ++l) {
                lasso_coordinate_descent(prob, path[l], beta);
                cv_error[l] += (test_y - test_x * beta).squaredNorm() / static_cast<double>(n);
            }
        }
        const auto best = static_cast<std::size_t>(
            std::distance(cv_error.begin(), std::min_element(cv_error.begin(), cv_error.end())));

        Vector beta = Vector::Zero(full_prob.gram.rows());
        for (std::size_t l = 0; l <= best; ++l) lasso_coordinate_descent(full_prob, path[l], beta);
        for (std::size_t c = 0; c < predictors.size(); ++c) {
            const auto k = pair_index(static_cast<std::size_t>(predictors[c]), response_index,
                                      static_cast<std::size_t>(p));
            scores[static_cast<Eigen::Index>(k)] = std::abs(beta[static_cast<Eigen::Index>(c)]);
        }
    });
    return {std::move(scores), "lasso", true};
}

}  // namespace sscd
