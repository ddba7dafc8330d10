#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "effbench/metrics.hpp"

namespace effbench {

// Statistical checks of the eff@k estimator, runnable from the CLI.
//
// The estimator and coefficient builder are injectable so that a deliberately
// broken implementation can be fed through the suites to show they catch it.
struct SelftestHooks {
    std::function<double(std::span<const double>, int)> estimator = [](std::span<const double> s, int k) {
        return eff_at_k(s, k);
    };
    std::function<CoefficientVector(int, int)> coefficients = [](int n, int k) { return eff_coefficients(n, k); };
};

struct SelftestOptions {
    std::uint64_t seed = 20240601;
    int oracle_lists = 1000;          // random lists per n for the oracle check
    int binary_triples = 500;
    int unbiased_trials = 20000;
    int variance_trials = 10000;
};

struct SuiteResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct SelftestReport {
    std::vector<SuiteResult> suites;

    bool passed() const;
    std::string summary() const;
};

// eff@k against subset enumeration for every n <= 12 and every k.
SuiteResult check_oracle_equivalence(const SelftestOptions& opts, const SelftestHooks& hooks = {});
// Weights are finite, non-negative, non-decreasing and sum to 1.
SuiteResult check_coefficients(const SelftestHooks& hooks = {});
// eff@k on 0/1 scores equals pass@k.
SuiteResult check_binary_reduction(const SelftestOptions& opts, const SelftestHooks& hooks = {});
// Mean over Uniform(0,1) draws (n=20, k=5) within 3 standard errors of 5/6.
SuiteResult check_unbiasedness(const SelftestOptions& opts, const SelftestHooks& hooks = {});
// Var(eff@k, n=100) <= 1.05 * (k/n) * Var(max of k draws) for k in {1, 10}.
SuiteResult check_variance_reduction(const SelftestOptions& opts, const SelftestHooks& hooks = {});

SelftestReport run_selftest(const SelftestOptions& opts, const SelftestHooks& hooks = {});

}  // namespace effbench
