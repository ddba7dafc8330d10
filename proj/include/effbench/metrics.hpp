#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "effbench/timing.hpp"
#include "effbench/value.hpp"

namespace effbench {

// Weights of the order statistics in the eff@k estimator:
// lambda_r = C(r-1, k-1) / C(n, k) for r = k..n.
struct CoefficientVector {
    int k = 0;
    int n = 0;
    std::vector<double> lambda;  // lambda[i] is the weight of rank r = k + i

    double at(int r) const { return lambda.at(static_cast<std::size_t>(r - k)); }
};

// Builds the weights by the backward product
//   lambda_n = k/n,  lambda_r = lambda_{r+1} * (1 - (k-1)/r),
// which never forms a binomial coefficient. Throws ParameterError unless
// 1 <= k <= n.
CoefficientVector eff_coefficients(int n, int k);

// Unbiased estimate of the expected best score among k of the n samples:
// the mean of max over every size-k subset, evaluated in O(n log n) as
// sum_r lambda_r * e_(r) with e_(r) the r-th smallest score.
// Throws ParameterError on k > n, k < 1, or an invalid score list.
double eff_at_k(std::span<const double> scores, int k);

// The same quantity by enumerating all C(n, k) subsets. Only for n <= 20.
double eff_at_k_bruteforce(std::span<const double> scores, int k);

inline constexpr int kBruteforceMaxN = 20;

// 1 - C(n-c, k) / C(n, k), evaluated as a product of ratios.
double pass_at_k(int n, int c, int k);

// Censoring-blind speedup of one sample: per case t* / min(t, T), averaged
// within each level, then hardness-weighted over levels 1..L. Censored
// entries count as min(t, T) = T, which overestimates slow code.
// Outer vectors are indexed by level 1..L.
double speedup_at_1(const std::vector<std::vector<CensoredTime>>& case_times,
                    const std::vector<std::vector<double>>& reference_times, double time_limit,
                    std::span<const double> hardness);

// Running sum with Neumaier compensation.
class CompensatedSum {
public:
    void add(double x) noexcept;
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Everything the report needs about one problem's samples.
struct ProblemScores {
    std::vector<double> scores;  // e_{i,1..n}
    int correct = 0;             // c: samples that passed correctness
    std::vector<double> speedups;
};

struct ProblemMetrics {
    int n = 0;
    std::map<int, double> eff_at;
    std::map<int, double> pass_at;
    double speedup = 0.0;
};

struct MetricReport {
    std::vector<int> ks;
    std::map<std::string, ProblemMetrics> per_problem;
    ProblemMetrics aggregate;  // unweighted mean over problems; n unused

    Value to_value() const;
    // Plain-text table: eff@k beside pass@k for every k, then speedup.
    std::string table() const;
};

// Throws ParameterError naming the first problem with fewer than max(ks)
// samples ("insufficient samples").
MetricReport aggregate_report(const std::map<std::string, ProblemScores>& problems, std::span<const int> ks);

}  // namespace effbench
