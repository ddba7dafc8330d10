#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "effbench/cli.hpp"
#include "effbench/selftest.hpp"

using namespace effbench;

namespace {

// Reduced trial counts keep the unit test quick; the acceptance binary runs
// the full-size suites.
SelftestOptions small(std::uint64_t seed = 20240601) {
    SelftestOptions o;
    o.seed = seed;
    o.oracle_lists = 60;
    o.binary_triples = 200;
    o.unbiased_trials = 4000;
    o.variance_trials = 3000;
    return o;
}

// eff_at_k with the recurrence shifted by one rank: the classic off-by-one.
double shifted_estimator(std::span<const double> scores, int k) {
    std::vector<double> s(scores.begin(), scores.end());
    std::sort(s.begin(), s.end());
    const int n = static_cast<int>(s.size());
    std::vector<double> lambda(static_cast<std::size_t>(n + 1), 0.0);
    lambda[static_cast<std::size_t>(n)] = static_cast<double>(k) / n;
    for (int r = n - 1; r >= k; --r) lambda[static_cast<std::size_t>(r)] = lambda[static_cast<std::size_t>(r + 1)] * (1.0 - (k - 1.0) / (r + 1));
    double acc = 0.0;
    for (int r = k; r <= n; ++r) acc += lambda[static_cast<std::size_t>(r)] * s[static_cast<std::size_t>(r - 1)];
    return acc;
}

}  // namespace

TEST(Selftest, PassesOnTheRealEstimator) {
    auto report = run_selftest(small());
    EXPECT_TRUE(report.passed()) << report.summary();
    EXPECT_EQ(report.suites.size(), 5u);
}

TEST(Selftest, CatchesOffByOneMutation) {
    SelftestHooks hooks;
    hooks.estimator = shifted_estimator;
    hooks.coefficients = [](int n, int k) {
        CoefficientVector cv = eff_coefficients(n, k);
        // lambda_r computed with r + 1 in the recurrence.
        for (int r = n - 1; r >= k; --r) {
            cv.lambda[static_cast<std::size_t>(r - k)] = cv.lambda[static_cast<std::size_t>(r + 1 - k)] * (1.0 - (k - 1.0) / (r + 1));
        }
        return cv;
    };
    auto report = run_selftest(small(), hooks);
    EXPECT_FALSE(report.passed());
    EXPECT_FALSE(check_oracle_equivalence(small(), hooks).passed);
    EXPECT_FALSE(check_coefficients(hooks).passed);
}

TEST(Selftest, CatchesBiasedEstimator) {
    SelftestHooks hooks;
    // Plain mean ignores k: biased for k > 1.
    hooks.estimator = [](std::span<const double> s, int) {
        double acc = 0.0;
        for (double x : s) acc += x;
        return acc / static_cast<double>(s.size());
    };
    EXPECT_FALSE(check_unbiasedness(small(), hooks).passed);
    EXPECT_FALSE(check_oracle_equivalence(small(), hooks).passed);
}

TEST(Selftest, CatchesHighVarianceEstimator) {
    SelftestHooks hooks;
    // Max over the first k scores: unbiased but not variance reduced.
    hooks.estimator = [](std::span<const double> s, int k) {
        return *std::max_element(s.begin(), s.begin() + k);
    };
    EXPECT_TRUE(check_unbiasedness(small(), hooks).passed);
    EXPECT_FALSE(check_variance_reduction(small(), hooks).passed);
}

TEST(Selftest, SameSeedSameSummary) {
    EXPECT_EQ(run_selftest(small(7)).summary(), run_selftest(small(7)).summary());
    EXPECT_NE(run_selftest(small(7)).summary(), run_selftest(small(8)).summary());
}

TEST(Selftest, CliCommandUsesSeed) {
    std::ostringstream a, b, err;
    EXPECT_EQ(cli::cmd_selftest(99, a, err), cli::kSuccess) << a.str();
    EXPECT_EQ(cli::cmd_selftest(99, b, err), cli::kSuccess);
    EXPECT_EQ(a.str(), b.str());
    EXPECT_NE(a.str().find("seed 99"), std::string::npos);
}
