#include "sscd/baselines.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <random>

namespace sscd {
namespace {

Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index k = 0;
    for (const double x : v) out[k++] = x;
    return out;
}

std::span<const double> view(const Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

TEST(Pearson, PerfectLinearRelations) {
    const Vector x = vec({1, 2, 3, 4, 5});
    EXPECT_NEAR(pearson_correlation(x, 2.0 * x), 1.0, 1e-15);
    EXPECT_NEAR(pearson_correlation(x, -3.0 * x + Vector::Ones(5)), -1.0, 1e-15);
}

TEST(Pearson, IndependentColumnsNearZero) {
    std::mt19937_64 rng(41);
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix v(10000, 2);
    for (Eigen::Index r = 0; r < v.rows(); ++r) v(r, 0) = g(rng), v(r, 1) = g(rng);
    EXPECT_LT(std::abs(pearson_correlation(v.col(0), v.col(1))), 0.05);
}

TEST(Pearson, ScoreTableIsSymmetricAcrossDirections) {
    std::mt19937_64 rng(42);
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix v(30, 4);
    for (Eigen::Index r = 0; r < v.rows(); ++r)
        for (Eigen::Index c = 0; c < 4; ++c) v(r, c) = g(rng) + (c > 0 ? v(r, c - 1) : 0.0);
    const auto table = pearson_scores(DataMatrix(v));
    EXPECT_EQ(table.method, "pearson");
    EXPECT_TRUE(table.use_absolute);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            if (i != j) {
                EXPECT_EQ(table.scores[static_cast<Eigen::Index>(pair_index(i, j, 4))],
                          table.scores[static_cast<Eigen::Index>(pair_index(j, i, 4))]);
            }
    EXPECT_NEAR(table.scores[static_cast<Eigen::Index>(pair_index(0, 2, 4))],
                pearson_correlation(v.col(0), v.col(2)), 1e-15);
}

TEST(Pearson, ConstantColumnIsError) {
    Matrix v(5, 2);
    v << 1, 2, 2, 2, 3, 2, 4, 2, 5, 2;
    try {
        pearson_scores(DataMatrix(v));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ConstantVariable);
    }
}

TEST(Kendall, HandEvaluatedExamples) {
    EXPECT_EQ(kendall_tau_b(vec({1, 2, 3}), vec({1, 2, 3})), 1.0);
    EXPECT_EQ(kendall_tau_b(vec({1, 2, 3}), vec({3, 2, 1})), -1.0);
    // Pairs: (1,2) concordant, (1,3) concordant, (2,3) discordant.
    EXPECT_NEAR(kendall_tau_b(vec({1, 2, 3}), vec({1, 3, 2})), 1.0 / 3.0, 1e-15);
}

TEST(Kendall, MatchesBruteForceWithTies) {
    std::mt19937_64 rng(43);
    std::uniform_int_distribution<int> len(2, 60), level(0, 6);
    std::normal_distribution<double> g(0.0, 1.0);
    std::bernoulli_distribution tied(0.5);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = len(rng);
        const bool discrete = tied(rng);
        Vector x(n), y(n);
        for (int r = 0; r < n; ++r) {
            x[r] = discrete ? level(rng) : g(rng);
            y[r] = discrete ? level(rng) : g(rng);
        }
        if ((x.array() == x[0]).all() || (y.array() == y[0]).all()) continue;
        ASSERT_NEAR(kendall_tau_b(x, y), testing::kendall_tau_b_brute(view(x), view(y)), 1e-12) << "trial " << trial;
    }
}

TEST(Kendall, InvariantUnderMonotoneTransforms) {
    std::mt19937_64 rng(44);
    std::normal_distribution<double> g(0.0, 1.0);
    Vector x(80), y(80);
    for (Eigen::Index r = 0; r < 80; ++r) x[r] = g(rng), y[r] = x[r] + g(rng);
    const double base = kendall_tau_b(x, y);
    const Vector ex = x.array().exp();
    const Vector cube = y.array().cube();
    EXPECT_EQ(kendall_tau_b(ex, cube), base);
}

TEST(Kendall, ScoresAreSymmetric) {
    std::mt19937_64 rng(45);
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix v(25, 3);
    for (Eigen::Index r = 0; r < 25; ++r)
        for (Eigen::Index c = 0; c < 3; ++c) v(r, c) = g(rng);
    const auto table = kendall_scores(DataMatrix(v));
    EXPECT_EQ(table.scores[static_cast<Eigen::Index>(pair_index(0, 1, 3))],
              table.scores[static_cast<Eigen::Index>(pair_index(1, 0, 3))]);
}

LassoProblem random_problem(std::mt19937_64& rng, Eigen::Index n, Eigen::Index q) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix x(n, q);
    Vector y(n);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < q; ++c) x(r, c) = g(rng);
        y[r] = 1.5 * x(r, 0) - 0.7 * x(r, q - 1) + g(rng);
    }
    return LassoProblem::from_data(x, y);
}

TEST(SoftThreshold, Cases) {
    EXPECT_EQ(soft_threshold(3.0, 1.0), 2.0);
    EXPECT_EQ(soft_threshold(-3.0, 1.0), -2.0);
    EXPECT_EQ(soft_threshold(0.5, 1.0), 0.0);
    EXPECT_EQ(soft_threshold(-1.0, 1.0), 0.0);
}

TEST(Lasso, LambdaMaxGivesAllZeros) {
    std::mt19937_64 rng(46);
    const auto prob = random_problem(rng, 100, 6);
    Vector beta = Vector::Constant(6, 0.3);
    lasso_coordinate_descent(prob, prob.lambda_max(), beta);
    EXPECT_EQ(beta.cwiseAbs().maxCoeff(), 0.0);
    Vector slightly_below = Vector::Zero(6);
    lasso_coordinate_descent(prob, 0.99 * prob.lambda_max(), slightly_below);
    EXPECT_GT(slightly_below.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Lasso, ZeroPenaltyIsLeastSquares) {
    std::mt19937_64 rng(47);
    const auto prob = random_problem(rng, 200, 5);
    Vector beta = Vector::Zero(5);
    lasso_coordinate_descent(prob, 0.0, beta);
    const Vector ols = prob.gram.ldlt().solve(prob.xty);
    EXPECT_LT((beta - ols).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Lasso, ObjectiveNonIncreasingPerSweep) {
    std::mt19937_64 rng(48);
    const auto prob = random_problem(rng, 60, 8);
    const double lambda = 0.05;
    Vector beta = Vector::Zero(8);
    double last = prob.objective(beta, lambda);
    for (int sweep = 0; sweep < 50; ++sweep) {
        lasso_coordinate_descent(prob, lambda, beta, {0.0, 1});
        const double now = prob.objective(beta, lambda);
        ASSERT_LE(now, last + 1e-15);
        last = now;
    }
}

TEST(Lasso, ConvergedSolutionSatisfiesKkt) {
    std::mt19937_64 rng(49);
    for (int trial = 0; trial < 20; ++trial) {
        const auto prob = random_problem(rng, 80, 10);
        for (const double frac : {0.5, 0.1, 0.01}) {
            Vector beta = Vector::Zero(10);
            lasso_coordinate_descent(prob, frac * prob.lambda_max(), beta);
            ASSERT_LE(prob.kkt_residual(beta, frac * prob.lambda_max()), 1e-8);
        }
    }
}

TEST(Lasso, PathIsLogSpaced) {
    const auto path = lasso_lambda_path(2.0, 50, 1e-3);
    ASSERT_EQ(path.size(), 50u);
    EXPECT_EQ(path.front(), 2.0);
    EXPECT_NEAR(path.back(), 2e-3, 1e-15);
    for (std::size_t k = 1; k < path.size(); ++k) EXPECT_NEAR(path[k] / path[k - 1], std::pow(1e-3, 1.0 / 49.0), 1e-12);
}

TEST(Lasso, FoldsAreBalancedAndSeeded) {
    const auto a = cv_fold_assignment(23, 5, 7);
    EXPECT_EQ(a, cv_fold_assignment(23, 5, 7));
    EXPECT_NE(a, cv_fold_assignment(23, 5, 8));
    std::vector<int> size(5, 0);
    for (const auto f : a) ++size[f];
    for (const int s : size) EXPECT_TRUE(s == 4 || s == 5);
}

TEST(Lasso, TooFewSamplesIsCvError) {
    try {
        cv_fold_assignment(7, 5, 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Cv);
    }
}

TEST(Lasso, ScoresRecoverStrongParents) {
    std::mt19937_64 rng(50);
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix v(300, 4);
    for (Eigen::Index r = 0; r < 300; ++r) {
        v(r, 0) = g(rng);
        v(r, 1) = g(rng);
        v(r, 2) = 2.0 * v(r, 0) + 0.5 * g(rng);
        v(r, 3) = g(rng);
    }
    const auto table = lasso_scores(DataMatrix(v), {5, 50, 1e-3, 3});
    EXPECT_EQ(table.method, "lasso");
    const double strong = table.scores[static_cast<Eigen::Index>(pair_index(0, 2, 4))];
    EXPECT_GT(strong, 0.5);
    EXPECT_LT(table.scores[static_cast<Eigen::Index>(pair_index(1, 3, 4))], strong / 10.0);
    EXPECT_EQ(table.scores, lasso_scores(DataMatrix(v), {5, 50, 1e-3, 3}, 3).scores);
}

}  // namespace
}  // namespace sscd
