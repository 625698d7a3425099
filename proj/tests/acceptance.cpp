// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include "sscd/sscd.hpp"
#include "support/oracles.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace sscd;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// 1 -------------------------------------------------------------------------

/// Exact L2 error between a histogram on `grid` and the truncated Gaussian:
/// ||f_hat||^2 - 2 <f_hat, f> + ||f||^2 with cell probabilities in closed form.
double histogram_l2_error(const HistogramDensity& est, const testing::TruncatedGaussian2D& truth) {
    const auto& g = est.grid;
    const double h = g.bin_width;
    double self = 0.0, cross = 0.0;
    for (std::size_t a = 0; a < g.bins; ++a) {
        const double x0 = g.lower + static_cast<double>(a) * h;
        for (std::size_t b = 0; b < g.bins; ++b) {
            const double y0 = g.lower + static_cast<double>(b) * h;
            const double mass = est.mass(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
            self += mass * mass / (h * h);
            cross += mass / (h * h) * truth.cell_probability(x0, x0 + h, y0, y0 + h);
        }
    }
    return std::sqrt(std::max(0.0, self - 2.0 * cross + truth.squared_norm()));
}

Outcome histogram_convergence() {
    const auto t0 = Clock::now();
    const testing::TruncatedGaussian2D truth{0.0, 0.0, -3.0, 3.0};
    std::mt19937_64 rng(101);
    std::vector<double> log_n, log_err;
    std::string detail;
    for (const double n : {1e2, 1e3, 1e4, 1e5}) {
        // h proportional to n^{-1/4}, snapped so the bins tile [-3, 3].
        const auto bins = static_cast<std::size_t>(std::round(6.0 / std::pow(n, -0.25)));
        const auto grid = HistogramGrid::with_bins(bins, -3.0, 3.0);
        double total = 0.0;
        for (int rep = 0; rep < 20; ++rep) {
            total += histogram_l2_error(histogram_estimate(truth.sample(static_cast<std::size_t>(n), rng), grid), truth);
        }
        log_n.push_back(std::log(n));
        log_err.push_back(std::log(total / 20.0));
        detail += "n=" + fmt(n, 1) + ":" + fmt(total / 20.0) + " ";
    }
    const double mx = std::accumulate(log_n.begin(), log_n.end(), 0.0) / 4.0;
    const double my = std::accumulate(log_err.begin(), log_err.end(), 0.0) / 4.0;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
        sxy += (log_n[k] - mx) * (log_err[k] - my);
        sxx += (log_n[k] - mx) * (log_n[k] - mx);
    }
    const double slope = sxy / sxx;
    const double secs = seconds_since(t0);
    return {slope >= -0.40 && slope <= -0.10 && secs < 120.0,
            "slope " + fmt(slope) + " (" + detail + "), " + fmt(secs, 3) + " s"};
}

// 2 -------------------------------------------------------------------------

Outcome metric_axioms() {
    std::mt19937_64 rng(202);
    std::uniform_int_distribution<int> size(1, 300);
    std::uniform_real_distribution<double> centre(-2.0, 2.0), spread(0.2, 1.5);
    const auto grid = HistogramGrid::symmetric(0.2, 3.0);
    auto scatter = [&] {
        const int n = size(rng);
        std::normal_distribution<double> gx(centre(rng), spread(rng)), gy(centre(rng), spread(rng));
        Matrix s(n, 2);
        for (int r = 0; r < n; ++r) s(r, 0) = std::clamp(gx(rng), -3.0, 3.0), s(r, 1) = std::clamp(gy(rng), -3.0, 3.0);
        return histogram_estimate(s, grid);
    };
    int failures = 0;
    double worst_slack = std::numeric_limits<double>::infinity();
    for (int t = 0; t < 1000; ++t) {
        const auto a = scatter(), b = scatter(), c = scatter();
        const double ab = density_l2_distance(a, b), ba = density_l2_distance(b, a);
        const double bc = density_l2_distance(b, c), ac = density_l2_distance(a, c);
        const double slack = std::min({ab + bc - ac, ac + bc - ab, ab + ac - bc});
        worst_slack = std::min(worst_slack, slack);
        if (ab != ba || density_l2_distance(a, a) != 0.0 || slack < -1e-12 || ab < 0.0) ++failures;
    }
    return {failures == 0, std::to_string(failures) + " failures in 1000 triples, min triangle slack " + fmt(worst_slack)};
}

// 3 -------------------------------------------------------------------------

Outcome metric_consistency() {
    const testing::TruncatedGaussian2D f{-0.5, -0.5, -3.0, 3.0};
    const testing::TruncatedGaussian2D g{0.5, 0.5, -3.0, 3.0};
    const double d_p = testing::l2_distance_quadrature([&](double x, double y) { return f.density(x, y); },
                                                       [&](double x, double y) { return g.density(x, y); }, -3.0, 3.0,
                                                       3000);
    std::mt19937_64 rng(303);
    const auto grid = HistogramGrid::symmetric(0.2, 3.0);
    const double d_s = density_l2_distance(histogram_estimate(f.sample(100000, rng), grid),
                                           histogram_estimate(g.sample(100000, rng), grid));
    const double rel = std::abs(d_s - d_p) / d_p;
    return {rel <= 0.10, "d_S " + fmt(d_s, 6) + " vs d_P " + fmt(d_p, 6) + ", relative error " + fmt(rel)};
}

// 4 -------------------------------------------------------------------------

LabelAssignment random_labels(std::size_t p, double frac, std::mt19937_64& rng) {
    std::bernoulli_distribution observe(frac), causal(0.3);
    std::vector<LabelState> states(pair_count(p), LabelState::Unlabelled);
    for (auto& s : states)
        if (observe(rng)) s = causal(rng) ? LabelState::Causal : LabelState::NonCausal;
    states[0] = LabelState::Causal;
    return LabelAssignment(std::move(states), p);
}

Outcome solver_correctness() {
    std::mt19937_64 rng(404);
    std::uniform_int_distribution<std::size_t> pick_p(3, 10);
    std::uniform_real_distribution<double> log_lambda(-3.0, 2.0), frac(0.2, 0.8), bandwidth(0.5, 2.0);
    double worst_gap = 0.0, worst_grad = 0.0, worst_recovery = 0.0;
    std::size_t max_m = 0;
    for (int inst = 0; inst < 20; ++inst) {
        const std::size_t p = pick_p(rng);
        const std::size_t m = pair_count(p);
        max_m = std::max(max_m, m);
        const auto sys = normalized_laplacian({testing::random_similarity(m, rng, bandwidth(rng)), 1.0});
        const auto labels = random_labels(p, frac(rng), rng);
        const double lambda = std::pow(10.0, log_lambda(rng));

        const auto res = fit(sys, labels, lambda);
        const Matrix gd = testing::gradient_descent_minimizer(sys.laplacian, labels, lambda, kRidge,
                                                              Matrix::Zero(static_cast<Eigen::Index>(m), 2));
        worst_gap = std::max(worst_gap, (res.f - gd).cwiseAbs().maxCoeff());
        const Matrix grad = testing::finite_difference_gradient(
            [&](const Matrix& x) { return objective_value(x, sys, labels, lambda); }, res.f, 1e-5);
        worst_grad = std::max(worst_grad, grad.cwiseAbs().maxCoeff());

        std::vector<LabelState> all(m);
        std::bernoulli_distribution coin(0.4);
        for (auto& s : all) s = coin(rng) ? LabelState::Causal : LabelState::NonCausal;
        const LabelAssignment everything(all, p);
        const auto exact = fit(sys, everything, 0.0);
        worst_recovery = std::max(worst_recovery, (exact.f - detail::padded_labels(everything)).cwiseAbs().maxCoeff());
    }
    return {worst_gap <= 1e-5 && worst_grad <= 1e-6 && worst_recovery <= 1e-6,
            "20 instances (m <= " + std::to_string(max_m) + "): max |F - F_gd| " + fmt(worst_gap) +
                ", max |grad J| " + fmt(worst_grad) + ", all-labelled recovery error " + fmt(worst_recovery)};
}

// 5 -------------------------------------------------------------------------

Outcome label_swap() {
    std::mt19937_64 rng(505);
    std::uniform_int_distribution<std::size_t> pick_p(3, 9);
    std::uniform_real_distribution<double> log_lambda(-3.0, 2.0);
    int mismatched = 0;
    for (int t = 0; t < 50; ++t) {
        const std::size_t p = pick_p(rng);
        const auto sys = normalized_laplacian({testing::random_similarity(pair_count(p), rng), 1.0});
        const auto labels = random_labels(p, 0.4, rng);
        const double lambda = std::pow(10.0, log_lambda(rng));
        const auto a = fit(sys, labels, lambda);
        const auto b = fit(sys, labels.swapped(), lambda);
        for (Eigen::Index k = 0; k < a.scores.size(); ++k)
            if (b.scores[k] != -a.scores[k]) {
                ++mismatched;
                break;
            }
    }
    return {mismatched == 0, std::to_string(mismatched) + " of 50 fits differ from exact negation"};
}

// 6 -------------------------------------------------------------------------

Outcome auc_oracle() {
    std::mt19937_64 rng(606);
    std::uniform_int_distribution<int> len(2, 100), level(0, 6);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::bernoulli_distribution coin(0.5);
    double worst = 0.0;
    int cases = 0;
    while (cases < 500) {
        const int n = len(rng);
        const bool ties = cases % 2 == 0;
        std::vector<double> s(n);
        std::vector<int> t(n);
        for (int k = 0; k < n; ++k) s[k] = ties ? level(rng) : gauss(rng), t[k] = coin(rng);
        if (std::count(t.begin(), t.end(), 1) == 0 || std::count(t.begin(), t.end(), 0) == 0) continue;
        worst = std::max(worst, std::abs(auc(s, t).auc - testing::auc_brute(s, t)));
        ++cases;
    }
    const std::vector<double> s{0.9, 0.8, 0.7, 0.6};
    const std::vector<int> t{1, 0, 1, 0};
    const double fixed = auc(s, t).auc;
    return {worst <= 1e-12 && fixed == 0.75,
            "max deviation " + fmt(worst) + " over 500 cases, fixed example " + fmt(fixed, 17)};
}

// 7 / 8 / 9 ------------------------------------------------------------------

struct BenchmarkRuns {
    ExperimentReport random;
    ExperimentReport rowwise;
    double random_secs = 0.0;
};

BenchmarkRuns run_benchmarks() {
    ExperimentConfig cfg;
    cfg.rhos = {0.1, 0.5, 0.8};
    cfg.n_trains = {500};
    cfg.methods = {"sscd", "pearson"};
    cfg.replicates = 25;
    cfg.seed = 0;
    BenchmarkRuns runs;
    const auto t0 = Clock::now();
    runs.random = run_experiment(cfg);
    runs.random_secs = seconds_since(t0);
    cfg.scheme = LabelScheme::RowWise;
    cfg.rhos = {0.5};
    cfg.methods = {"sscd"};
    runs.rowwise = run_experiment(cfg);
    return runs;
}

std::string cell(const SummaryRow& row) {
    return fmt(row.mean) + " (se " + fmt(row.standard_error, 2) + ", " + std::to_string(row.completed) + "/" +
           std::to_string(row.completed + row.failed) + " replicates)";
}

Outcome benchmark_ordering(const BenchmarkRuns& runs) {
    const auto& sscd_row = runs.random.find("sscd", 0.5, 500);
    const auto& pearson_row = runs.random.find("pearson", 0.5, 500);
    return {sscd_row.mean >= 0.60 && sscd_row.mean >= pearson_row.mean && runs.random_secs < 300.0,
            "SSCD " + cell(sscd_row) + " vs Pearson " + cell(pearson_row) + ", " + fmt(runs.random_secs, 3) + " s"};
}

Outcome rho_trend(const BenchmarkRuns& runs) {
    const auto& low = runs.random.find("sscd", 0.1, 500);
    const auto& high = runs.random.find("sscd", 0.8, 500);
    return {high.mean >= low.mean - 0.02, "rho=0.8 " + cell(high) + " vs rho=0.1 " + cell(low)};
}

Outcome rowwise_hardness(const BenchmarkRuns& runs) {
    const auto& row = runs.rowwise.find("sscd", 0.5, 500);
    const auto& rnd = runs.random.find("sscd", 0.5, 500);
    return {row.mean <= rnd.mean + 0.05, "row-wise " + cell(row) + " vs random " + cell(rnd)};
}

// 10 ------------------------------------------------------------------------

Outcome gold_standard_rule() {
    // Each case: a two-variable hold-out whose columns are shuffled arithmetic
    // progressions a, a+s, ..., a+4s, so median = a+2s and IQR = 2s exactly.
    // Dyadic a, s and z keep every intervention value exactly representable.
    std::mt19937_64 rng(1010);
    std::uniform_int_distribution<int> offset(-64, 64), step_exp(-3, 3), z_quarter(0, 48);
    std::bernoulli_distribution coin(0.5);
    int cases = 0, wrong = 0, boundary = 0;
    for (; cases < 100; ++cases) {
        Matrix holdout(5, 2);
        double median[2], iqr[2];
        for (int c = 0; c < 2; ++c) {
            const double a = offset(rng) / 4.0;
            const double s = std::ldexp(1.0, step_exp(rng));
            std::vector<double> col{a, a + s, a + 2 * s, a + 3 * s, a + 4 * s};
            std::shuffle(col.begin(), col.end(), rng);
            for (int r = 0; r < 5; ++r) holdout(r, c) = col[static_cast<std::size_t>(r)];
            median[c] = a + 2 * s;
            iqr[c] = 2 * s;
        }
        // z on a quarter grid 0..12, forced to the boundary every fourth case.
        double z[2];
        Matrix iv = Matrix::Zero(2, 2);
        for (int i = 0; i < 2; ++i) {
            const int effect = 1 - i;
            z[i] = cases % 4 == 0 ? 5.0 : z_quarter(rng) / 4.0;
            if (z[i] == 5.0) ++boundary;
            const double sign = coin(rng) ? 1.0 : -1.0;
            iv(i, effect) = median[effect] + sign * z[i] * iqr[effect];
            iv(i, i) = 1000.0;  // diagonal is never an edge
        }
        const auto gold = zscore_gold_standard(iv, holdout, 5.0);
        if (gold.adjacency(0, 1) != (z[0] > 5.0) || gold.adjacency(1, 0) != (z[1] > 5.0)) ++wrong;
    }
    return {wrong == 0 && boundary > 0, std::to_string(wrong) + " wrong decisions in " + std::to_string(cases) +
                                            " cases (" + std::to_string(boundary) + " decisions at Z = 5)"};
}

// 11 ------------------------------------------------------------------------

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome evaluate_determinism() {
    const auto dir = fs::temp_directory_path() / ("sscd_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    auto run = [&](const std::string& name) {
        const std::string cmd = "'" SSCD_CLI_PATH "' evaluate --seed 11 --replicates 3 --rho 0.2,0.5 --n-train 200 "
                                "--methods sscd,pearson,kendall --out-json '" +
                                (dir / (name + ".json")).string() + "' --out-csv '" + (dir / (name + ".csv")).string() +
                                "' > /dev/null 2>&1";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    };
    const int c1 = run("first");
    const int c2 = run("second");
    const auto a = slurp(dir / "first.json");
    const auto b = slurp(dir / "second.json");
    fs::remove_all(dir);
    const bool same = !a.empty() && a == b;
    return {same && c1 == c2,
            std::string(same ? "identical" : "different") + " report JSON (" + std::to_string(a.size()) +
                " bytes), exit codes " + std::to_string(c1) + "/" + std::to_string(c2)};
}

}  // namespace

int main() {
    int failed = 0;
    auto report = [&](int id, const std::string& name, const Outcome& o) {
        std::cout << (o.pass ? "[PASS]" : "[FAIL]") << " criterion " << id << ": " << name << " -- " << o.detail
                  << std::endl;
        if (!o.pass) ++failed;
    };
    auto guarded = [](const std::function<Outcome()>& fn) -> Outcome {
        try {
            return fn();
        } catch (const std::exception& e) {
            return {false, std::string("threw ") + e.what()};
        }
    };

    report(1, "histogram L2 error rate under h ~ n^-1/4", guarded(histogram_convergence));
    report(2, "pair metric axioms", guarded(metric_axioms));
    report(3, "histogram distance approximates the density distance", guarded(metric_consistency));
    report(4, "closed-form solver matches iterative minimizer", guarded(solver_correctness));
    report(5, "label swap negates scores exactly", guarded(label_swap));
    report(6, "AUC matches brute force", guarded(auc_oracle));

    BenchmarkRuns runs;
    std::string bench_error;
    try {
        runs = run_benchmarks();
    } catch (const std::exception& e) {
        bench_error = e.what();
    }
    auto bench = [&](auto fn) { return bench_error.empty() ? guarded([&] { return fn(runs); }) : Outcome{false, "threw " + bench_error}; };
    report(7, "SSCD beats Pearson on the synthetic benchmark", bench(benchmark_ordering));
    report(8, "SSCD improves with more labels", bench(rho_trend));
    report(9, "row-wise labelling is not easier", bench(rowwise_hardness));

    report(10, "z-score gold standard decisions", guarded(gold_standard_rule));
    report(11, "evaluate report is byte-identical across runs", guarded(evaluate_determinism));

    std::cout << (failed == 0 ? "all acceptance criteria passed" : std::to_string(failed) + " criteria failed")
              << std::endl;
    return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
