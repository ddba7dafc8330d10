#include "effbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "effbench/errors.hpp"

namespace effbench {

namespace {

void check_k(int n, int k) {
    if (k < 1 || k > n) {
        throw ParameterError("k = " + std::to_string(k) + " must satisfy 1 <= k <= n = " + std::to_string(n));
    }
}

void check_scores(std::span<const double> scores) {
    if (scores.empty()) throw ParameterError("score list is empty");
    for (double s : scores) {
        if (!std::isfinite(s) || s < 0.0) throw ParameterError("scores must be finite and >= 0");
    }
}

}  // namespace

void CompensatedSum::add(double x) noexcept {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
        comp_ += (sum_ - t) + x;
    } else {
        comp_ += (x - t) + sum_;
    }
    sum_ = t;
}

CoefficientVector eff_coefficients(int n, int k) {
    check_k(n, k);
    CoefficientVector cv;
    cv.n = n;
    cv.k = k;
    cv.lambda.assign(static_cast<std::size_t>(n - k + 1), 0.0);
    double lambda = static_cast<double>(k) / static_cast<double>(n);
    cv.lambda.back() = lambda;
    for (int r = n - 1; r >= k; --r) {
        lambda *= 1.0 - static_cast<double>(k - 1) / static_cast<double>(r);
        cv.lambda[static_cast<std::size_t>(r - k)] = lambda;
    }
    return cv;
}

double eff_at_k(std::span<const double> scores, int k) {
    check_scores(scores);
    const int n = static_cast<int>(scores.size());
    check_k(n, k);
    std::vector<double> sorted(scores.begin(), scores.end());
    std::sort(sorted.begin(), sorted.end());
    const auto cv = eff_coefficients(n, k);
    CompensatedSum sum;
    for (int r = k; r <= n; ++r) sum.add(cv.at(r) * sorted[static_cast<std::size_t>(r - 1)]);
    // The weights sum to one, so the result is a convex combination; clamp the
    // last-ulp drift to keep it inside [min, max].
    return std::clamp(sum.value(), sorted.front(), sorted.back());
}

double eff_at_k_bruteforce(std::span<const double> scores, int k) {
    check_scores(scores);
    const int n = static_cast<int>(scores.size());
    if (n > kBruteforceMaxN) {
        throw ParameterError("brute-force eff@k is limited to n <= " + std::to_string(kBruteforceMaxN) + " (got " +
                             std::to_string(n) + ")");
    }
    check_k(n, k);
    std::vector<int> idx(static_cast<std::size_t>(k));
    std::iota(idx.begin(), idx.end(), 0);
    long double total = 0.0L;
    long long subsets = 0;
    while (true) {
        double best = scores[static_cast<std::size_t>(idx[0])];
        for (int i = 1; i < k; ++i) best = std::max(best, scores[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])]);
        total += best;
        ++subsets;
        // Next combination in lexicographic order.
        int i = k - 1;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
        if (i < 0) break;
        ++idx[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
    return static_cast<double>(total / static_cast<long double>(subsets));
}

double pass_at_k(int n, int c, int k) {
    if (n < 1) throw ParameterError("pass@k needs n >= 1");
    if (c < 0 || c > n) {
        throw ParameterError("c = " + std::to_string(c) + " must satisfy 0 <= c <= n = " + std::to_string(n));
    }
    check_k(n, k);
    if (n - c < k) return 1.0;
    // C(n-c, k) / C(n, k) = prod_{i=n-c+1}^{n} (1 - k/i)
    double miss = 1.0;
    for (int i = n - c + 1; i <= n; ++i) miss *= 1.0 - static_cast<double>(k) / static_cast<double>(i);
    return std::clamp(1.0 - miss, 0.0, 1.0);
}

double speedup_at_1(const std::vector<std::vector<CensoredTime>>& case_times,
                    const std::vector<std::vector<double>>& reference_times, double time_limit,
                    std::span<const double> hardness) {
    if (case_times.size() != reference_times.size() || case_times.size() != hardness.size()) {
        throw ParameterError("speedup_at_1: per-level shapes differ");
    }
    if (!(time_limit > 0.0)) throw ParameterError("speedup_at_1: time limit must be positive");
    double num = 0.0, den = 0.0;
    for (std::size_t l = 0; l < case_times.size(); ++l) {
        const auto& times = case_times[l];
        const auto& refs = reference_times[l];
        if (times.size() != refs.size() || times.empty()) {
            throw ParameterError("speedup_at_1: level " + std::to_string(l + 1) + " has " +
                                 std::to_string(times.size()) + " times for " + std::to_string(refs.size()) +
                                 " reference times");
        }
        double level_sum = 0.0;
        for (std::size_t m = 0; m < times.size(); ++m) {
            double t = times[m].censored ? time_limit : std::min(times[m].value, time_limit);
            level_sum += refs[m] / t;
        }
        num += hardness[l] * (level_sum / static_cast<double>(times.size()));
        den += hardness[l];
    }
    if (!(den > 0.0)) throw ParameterError("speedup_at_1: hardness weights must be positive");
    return num / den;
}

// ---------------------------------------------------------------- report

MetricReport aggregate_report(const std::map<std::string, ProblemScores>& problems, std::span<const int> ks) {
    if (ks.empty()) throw ParameterError("no k requested");
    MetricReport report;
    report.ks.assign(ks.begin(), ks.end());
    std::sort(report.ks.begin(), report.ks.end());
    report.ks.erase(std::unique(report.ks.begin(), report.ks.end()), report.ks.end());
    const int k_max = report.ks.back();
    if (report.ks.front() < 1) throw ParameterError("k must be >= 1");

    for (const auto& [id, ps] : problems) {
        const int n = static_cast<int>(ps.scores.size());
        if (n < k_max) {
            throw ParameterError("insufficient samples for problem '" + id + "': n = " + std::to_string(n) +
                                 " < k = " + std::to_string(k_max));
        }
        ProblemMetrics pm;
        pm.n = n;
        for (int k : report.ks) {
            pm.eff_at[k] = eff_at_k(ps.scores, k);
            pm.pass_at[k] = pass_at_k(n, ps.correct, k);
        }
        if (!ps.speedups.empty()) {
            pm.speedup = std::accumulate(ps.speedups.begin(), ps.speedups.end(), 0.0) /
                         static_cast<double>(ps.speedups.size());
        }
        report.per_problem.emplace(id, std::move(pm));
    }

    if (!report.per_problem.empty()) {
        const double count = static_cast<double>(report.per_problem.size());
        for (int k : report.ks) {
            double eff = 0.0, pass = 0.0;
            for (const auto& [id, pm] : report.per_problem) {
                eff += pm.eff_at.at(k);
                pass += pm.pass_at.at(k);
            }
            report.aggregate.eff_at[k] = eff / count;
            report.aggregate.pass_at[k] = pass / count;
        }
        double sp = 0.0;
        for (const auto& [id, pm] : report.per_problem) sp += pm.speedup;
        report.aggregate.speedup = sp / count;
    }
    return report;
}

namespace {

Value metrics_value(const ProblemMetrics& pm, const std::vector<int>& ks, bool with_n) {
    Map m;
    if (with_n) m.emplace_back("n_samples", pm.n);
    Map eff, pass;
    for (int k : ks) {
        eff.emplace_back(std::to_string(k), pm.eff_at.at(k));
        pass.emplace_back(std::to_string(k), pm.pass_at.at(k));
    }
    m.emplace_back("eff_at_k", std::move(eff));
    m.emplace_back("pass_at_k", std::move(pass));
    m.emplace_back("speedup", pm.speedup);
    return Value(std::move(m));
}

}  // namespace

Value MetricReport::to_value() const {
    Map doc;
    List kl;
    for (int k : ks) kl.emplace_back(k);
    doc.emplace_back("ks", std::move(kl));
    Map per;
    for (const auto& [id, pm] : per_problem) per.emplace_back(id, metrics_value(pm, ks, true));
    doc.emplace_back("per_problem", std::move(per));
    if (!per_problem.empty()) {
        doc.emplace_back("aggregate", metrics_value(aggregate, ks, false));
    } else {
        doc.emplace_back("aggregate", Value());
    }
    doc.emplace_back("speedup_note", "speedup overestimates under censoring; reported for comparison only");
    return Value(std::move(doc));
}

std::string MetricReport::table() const {
    std::size_t id_width = 9;
    for (const auto& [id, pm] : per_problem) id_width = std::max(id_width, id.size());

    std::ostringstream out;
    char buf[64];
    auto cell = [&](const char* fmt, auto v) {
        std::snprintf(buf, sizeof buf, fmt, v);
        out << buf;
    };
    auto pad = [&](const std::string& s) {
        out << s << std::string(id_width + 2 - std::min(id_width + 2, s.size()), ' ');
    };

    pad("problem");
    out << "     n";
    for (int k : ks) {
        cell(" %10s", ("eff@" + std::to_string(k)).c_str());
        cell(" %10s", ("pass@" + std::to_string(k)).c_str());
    }
    out << "   speedup*\n";

    auto row = [&](const std::string& name, const ProblemMetrics& pm, bool show_n) {
        pad(name);
        if (show_n) cell("%6d", pm.n);
        else out << "      ";
        for (int k : ks) {
            cell(" %10.3f", pm.eff_at.at(k));
            cell(" %10.3f", pm.pass_at.at(k));
        }
        cell(" %10.3f\n", pm.speedup);
    };
    for (const auto& [id, pm] : per_problem) row(id, pm, true);
    if (!per_problem.empty()) row("aggregate", aggregate, false);
    out << "* speedup overestimates efficiency under censoring; shown for comparison only\n";
    return out.str();
}

}  // namespace effbench
