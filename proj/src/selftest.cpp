#include "effbench/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

namespace effbench {

namespace {

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

struct Moments {
    double mean = 0.0;
    double var = 0.0;  // unbiased sample variance
};

Moments moments(const std::vector<double>& xs) {
    Moments m;
    CompensatedSum s;
    for (double x : xs) s.add(x);
    m.mean = s.value() / static_cast<double>(xs.size());
    CompensatedSum q;
    for (double x : xs) q.add((x - m.mean) * (x - m.mean));
    m.var = q.value() / static_cast<double>(xs.size() - 1);
    return m;
}

// Random score list; every third list draws from a tiny support to force ties.
std::vector<double> random_scores(std::mt19937_64& rng, int n, int variant) {
    std::vector<double> v(static_cast<std::size_t>(n));
    if (variant % 3 == 2) {
        std::uniform_int_distribution<int> pick(0, 3);
        for (auto& x : v) x = pick(rng) * 0.25;
    } else {
        std::uniform_real_distribution<double> u(0.0, variant % 3 == 0 ? 1.0 : 1.5);
        for (auto& x : v) x = u(rng);
    }
    return v;
}

}  // namespace

bool SelftestReport::passed() const {
    return std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.passed; });
}

std::string SelftestReport::summary() const {
    std::ostringstream out;
    for (const auto& s : suites) out << (s.passed ? "PASS " : "FAIL ") << s.name << ": " << s.detail << "\n";
    out << (passed() ? "all suites passed" : "selftest FAILED") << "\n";
    return out.str();
}

SuiteResult check_oracle_equivalence(const SelftestOptions& opts, const SelftestHooks& hooks) {
    SuiteResult r{"oracle_equivalence", true, ""};
    std::mt19937_64 rng(opts.seed);
    double worst = 0.0;
    long long checks = 0;
    for (int n = 1; n <= 12; ++n) {
        for (int t = 0; t < opts.oracle_lists; ++t) {
            auto scores = random_scores(rng, n, t);
            for (int k = 1; k <= n; ++k) {
                double diff = std::abs(hooks.estimator(scores, k) - eff_at_k_bruteforce(scores, k));
                worst = std::max(worst, diff);
                ++checks;
            }
        }
    }
    r.passed = worst <= 1e-10;
    r.detail = std::to_string(checks) + " (list, k) pairs, max |diff| = " + fmt("%.3g", worst) + " (tol 1e-10)";
    return r;
}

SuiteResult check_coefficients(const SelftestHooks& hooks) {
    SuiteResult r{"coefficients", true, ""};
    int configs = 0;
    for (int n : {3, 10, 100, 1000, 10000}) {
        for (int k : {1, 10, std::min(100, n)}) {
            if (k > n) continue;
            ++configs;
            auto cv = hooks.coefficients(n, k);
            CompensatedSum sum;
            double prev = 0.0;
            bool ok = cv.lambda.size() == static_cast<std::size_t>(n - k + 1);
            for (double l : cv.lambda) {
                if (!std::isfinite(l) || l < 0.0 || l < prev) ok = false;
                prev = l;
                sum.add(l);
            }
            if (!ok || std::abs(sum.value() - 1.0) > 1e-9) {
                r.passed = false;
                r.detail = "n=" + std::to_string(n) + " k=" + std::to_string(k) + ": sum = " + fmt("%.17g", sum.value()) +
                           (ok ? "" : ", non-finite, negative or decreasing weight");
                return r;
            }
        }
    }
    r.detail = std::to_string(configs) + " (n, k) configurations up to n = 10000";
    return r;
}

SuiteResult check_binary_reduction(const SelftestOptions& opts, const SelftestHooks& hooks) {
    SuiteResult r{"binary_reduction", true, ""};
    std::mt19937_64 rng(opts.seed ^ 0x9e3779b97f4a7c15ULL);
    double worst = 0.0;
    for (int t = 0; t < opts.binary_triples; ++t) {
        int n = std::uniform_int_distribution<int>(1, 100)(rng);
        int c = std::uniform_int_distribution<int>(0, n)(rng);
        int k = std::uniform_int_distribution<int>(1, n)(rng);
        std::vector<double> scores(static_cast<std::size_t>(n), 0.0);
        std::fill(scores.begin(), scores.begin() + c, 1.0);
        std::shuffle(scores.begin(), scores.end(), rng);
        worst = std::max(worst, std::abs(hooks.estimator(scores, k) - pass_at_k(n, c, k)));
    }
    r.passed = worst <= 1e-9;
    r.detail = std::to_string(opts.binary_triples) + " triples, max |eff@k - pass@k| = " + fmt("%.3g", worst) +
               " (tol 1e-9)";
    return r;
}

SuiteResult check_unbiasedness(const SelftestOptions& opts, const SelftestHooks& hooks) {
    SuiteResult r{"unbiasedness", true, ""};
    constexpr int n = 20, k = 5;
    const double truth = static_cast<double>(k) / (k + 1);
    std::mt19937_64 rng(opts.seed + 1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> estimates;
    estimates.reserve(static_cast<std::size_t>(opts.unbiased_trials));
    std::vector<double> scores(n);
    for (int t = 0; t < opts.unbiased_trials; ++t) {
        for (auto& x : scores) x = u(rng);
        estimates.push_back(hooks.estimator(scores, k));
    }
    auto m = moments(estimates);
    double se = std::sqrt(m.var / static_cast<double>(estimates.size()));
    double z = (m.mean - truth) / se;
    r.passed = std::abs(z) <= 3.0;
    r.detail = fmt("mean %.6f vs 5/6 = %.6f, %.2f standard errors", m.mean, truth, z);
    return r;
}

SuiteResult check_variance_reduction(const SelftestOptions& opts, const SelftestHooks& hooks) {
    SuiteResult r{"variance_reduction", true, ""};
    constexpr int n = 100;
    std::mt19937_64 rng(opts.seed + 2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::ostringstream detail;
    for (int k : {1, 10}) {
        std::vector<double> rb, vanilla;
        std::vector<double> scores(n);
        for (int t = 0; t < opts.variance_trials; ++t) {
            for (auto& x : scores) x = u(rng);
            rb.push_back(hooks.estimator(scores, k));
            double best = 0.0;
            for (int j = 0; j < k; ++j) best = std::max(best, u(rng));
            vanilla.push_back(best);
        }
        double var_rb = moments(rb).var;
        double var_vanilla = moments(vanilla).var;
        double bound = static_cast<double>(k) / n * var_vanilla * 1.05;
        double ratio = std::sqrt(var_rb / var_vanilla);
        bool ok = var_rb <= bound;
        if (k == 1) ok = ok && ratio >= 0.07 && ratio <= 0.13;
        r.passed = r.passed && ok;
        detail << "k=" << k << fmt(": var %.3e <= bound %.3e, std ratio %.3f; ", var_rb, bound, ratio);
    }
    r.detail = detail.str();
    return r;
}

SelftestReport run_selftest(const SelftestOptions& opts, const SelftestHooks& hooks) {
    SelftestReport report;
    report.suites.push_back(check_oracle_equivalence(opts, hooks));
    report.suites.push_back(check_coefficients(hooks));
    report.suites.push_back(check_binary_reduction(opts, hooks));
    report.suites.push_back(check_unbiasedness(opts, hooks));
    report.suites.push_back(check_variance_reduction(opts, hooks));
    return report;
}

}  // namespace effbench
