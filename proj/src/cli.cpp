#include "effbench/cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "effbench/metrics.hpp"
#include "effbench/selftest.hpp"

namespace effbench::cli {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string trim(std::string s) {
    auto b = s.find_first_not_of(" \t\r\n");
    auto e = s.find_last_not_of(" \t\r\n");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

}  // namespace

// ---------------------------------------------------------------- helpers

std::optional<fs::path> ReferenceSources::find(const std::string& problem_id) const {
    if (auto it = explicit_paths.find(problem_id); it != explicit_paths.end()) return it->second;
    if (directory.empty() || !fs::is_directory(directory)) return std::nullopt;
    std::vector<fs::path> hits;
    for (const auto& entry : fs::directory_iterator(directory)) {
        if (entry.is_regular_file() && entry.path().stem() == problem_id) hits.push_back(entry.path());
    }
    if (hits.empty()) return std::nullopt;
    std::sort(hits.begin(), hits.end());
    return hits.front();
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        int v = 0;
        auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (item.empty() || ec != std::errc() || p != item.data() + item.size()) {
            throw ConfigError("invalid integer '" + item + "' in list '" + text + "'");
        }
        out.push_back(v);
    }
    if (out.empty()) throw ConfigError("empty list");
    return out;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        double v = 0;
        auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (item.empty() || ec != std::errc() || p != item.data() + item.size()) {
            throw ConfigError("invalid number '" + item + "' in list '" + text + "'");
        }
        out.push_back(v);
    }
    if (out.empty()) throw ConfigError("empty list");
    return out;
}

int report_error(const std::exception& e, std::ostream& err) {
    err << "error: " << e.what() << "\n";
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ValidationError*>(&e) ||
        dynamic_cast<const ParseError*>(&e) || dynamic_cast<const ParameterError*>(&e) ||
        dynamic_cast<const DataError*>(&e) || dynamic_cast<const GeneratorError*>(&e)) {
        return kConfigError;
    }
    return kFatal;
}

std::vector<CodeSample> load_samples(const fs::path& dir, std::vector<std::string>& warnings) {
    std::vector<CodeSample> samples;
    if (!fs::is_directory(dir)) throw ConfigError("samples directory '" + dir.string() + "' does not exist");
    for (const auto& pdir : fs::directory_iterator(dir)) {
        if (!pdir.is_directory()) {
            warnings.push_back("ignoring stray file " + pdir.path().string());
            continue;
        }
        const std::string problem_id = pdir.path().filename().string();
        std::set<int> seen;
        for (const auto& f : fs::directory_iterator(pdir.path())) {
            if (!f.is_regular_file()) continue;
            const std::string stem = f.path().stem().string();
            int index = 0;
            auto [p, ec] = std::from_chars(stem.data(), stem.data() + stem.size(), index);
            if (stem.empty() || ec != std::errc() || p != stem.data() + stem.size() || index < 0) {
                warnings.push_back("ignoring " + f.path().string() + ": name is not a sample index");
                continue;
            }
            if (!seen.insert(index).second) {
                warnings.push_back("ignoring " + f.path().string() + ": duplicate sample index " + stem);
                continue;
            }
            CodeSample s;
            s.problem_id = problem_id;
            s.sample_index = index;
            s.source = read_file(f.path());
            Map origin;
            origin.emplace_back("path", f.path().string());
            s.origin = Value(std::move(origin));
            if (s.source.find_first_not_of(" \t\r\n") == std::string::npos) {
                warnings.push_back("ignoring " + f.path().string() + ": empty source");
                continue;
            }
            samples.push_back(std::move(s));
        }
    }
    std::sort(samples.begin(), samples.end(), [](const CodeSample& a, const CodeSample& b) {
        return std::tie(a.problem_id, a.sample_index) < std::tie(b.problem_id, b.sample_index);
    });
    return samples;
}

std::vector<SampleEvaluation> load_results(const fs::path& path) {
    std::vector<SampleEvaluation> out;
    if (!fs::exists(path)) return out;
    std::string text = read_file(path);
    auto last_nl = text.rfind('\n');
    std::size_t complete = last_nl == std::string::npos ? 0 : last_nl + 1;
    if (complete < text.size()) {
        fs::resize_file(path, complete);
        text.resize(complete);
    }
    std::istringstream lines(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        try {
            out.push_back(SampleEvaluation::from_value(parse_value(line)));
        } catch (const ParseError& e) {
            throw ParseError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

// ---------------------------------------------------------------- calibrate

int cmd_calibrate(const CalibrateOptions& opts, std::ostream& out, std::ostream& err) {
    try {
        opts.config.validate();
        ProblemSet problems = parse_problemset(opts.problemset);

        std::vector<std::string> missing;
        std::map<std::string, std::string> sources;
        for (const auto& p : problems) {
            if (auto path = opts.references.find(p.id)) {
                sources[p.id] = read_file(*path);
            } else {
                missing.push_back(p.id);
            }
        }
        if (!missing.empty()) {
            err << "error: no reference solution for problem(s):";
            for (const auto& id : missing) err << " " << id;
            err << "\n";
            return kConfigError;
        }
        if (!opts.runner) throw ConfigError("no runner configured");
        auto runner = opts.runner();

        ProblemSet calibrated;
        for (const auto& p : problems) {
            try {
                calibrated.push_back(measure_reference(p, sources.at(p.id), opts.config, *runner));
            } catch (const Error& e) {
                err << "error: calibrating problem '" << p.id << "' failed: " << e.what() << "\n";
                return dynamic_cast<const ConfigError*>(&e) ? kConfigError : kFatal;
            }
            const auto& c = calibrated.back();
            char line[256];
            std::snprintf(line, sizeof line, "%-24s T = %.6f s  (slowest reference %.6f s, alpha %.2f)\n",
                          c.id.c_str(), c.time_limit, c.max_reference_time(), opts.config.timeout_factor);
            out << line;
        }
        write_problemset(opts.out, calibrated);
        out << "wrote " << opts.out.string() << "\n";
        return kSuccess;
    } catch (const std::exception& e) {
        return report_error(e, err);
    }
}

// ---------------------------------------------------------------- evaluate

int cmd_evaluate(const EvaluateOptions& opts, std::ostream& out, std::ostream& err) {
    try {
        opts.config.validate();
        if (opts.parallel < 1) throw ConfigError("--parallel must be >= 1");
        ProblemSet problems = parse_problemset(opts.problemset);
        std::map<std::string, const Problem*> by_id;
        for (const auto& p : problems) {
            if (!p.calibrated()) throw DataError("problem '" + p.id + "' is not calibrated; run calibrate first");
            by_id[p.id] = &p;
        }

        std::vector<std::string> warnings;
        auto samples = load_samples(opts.samples, warnings);
        bool issues = !warnings.empty();

        std::set<std::pair<std::string, int>> done;
        for (const auto& r : load_results(opts.out)) done.insert({r.problem_id, r.sample_index});

        // Group pending samples by problem.
        std::map<std::string, std::vector<const CodeSample*>> pending;
        std::size_t skipped_done = 0;
        for (const auto& s : samples) {
            if (!by_id.count(s.problem_id)) {
                warnings.push_back("sample " + s.problem_id + "/" + std::to_string(s.sample_index) +
                                   " names an unknown problem");
                issues = true;
                continue;
            }
            if (done.count({s.problem_id, s.sample_index})) {
                ++skipped_done;
                continue;
            }
            pending[s.problem_id].push_back(&s);
        }
        for (const auto& w : warnings) err << "warning: " << w << "\n";
        if (samples.empty()) err << "warning: no samples found under " << opts.samples.string() << "\n";
        if (opts.parallel > 1) {
            err << "warning: --parallel " << opts.parallel
                << " runs candidates concurrently; timings will be noisier than serialized evaluation\n";
        }

        std::ofstream results(opts.out, std::ios::app | std::ios::binary);
        if (!results) throw Error("cannot open '" + opts.out.string() + "' for appending");
        if (!opts.runner) throw ConfigError("no runner configured");

        std::vector<std::string> order;
        for (const auto& [id, list] : pending) order.push_back(id);
        std::mutex mu;
        std::atomic<std::size_t> next{0};
        std::atomic<std::size_t> evaluated{0};
        std::atomic<bool> any_failure{false};
        std::exception_ptr fatal;

        auto worker = [&] {
            auto runner = opts.runner();
            while (true) {
                {
                    std::lock_guard lock(mu);
                    if (fatal) return;
                }
                std::size_t i = next.fetch_add(1);
                if (i >= order.size()) return;
                const Problem& problem = *by_id.at(order[i]);
                try {
                    double ratio = 1.0;
                    if (auto ref = opts.references.find(problem.id)) {
                        ratio = calibration_ratio(problem, read_file(*ref), opts.config, *runner);
                        std::lock_guard lock(mu);
                        char line[160];
                        std::snprintf(line, sizeof line, "%s: calibration ratio %.4f\n", problem.id.c_str(), ratio);
                        out << line;
                    }
                    for (const CodeSample* s : pending.at(order[i])) {
                        SampleEvaluation e = evaluate_sample(problem, *s, opts.config, *runner, ratio);
                        if (e.failure_reason != FailureReason::none) any_failure = true;
                        std::lock_guard lock(mu);
                        results << dump(e.to_value()) << '\n';
                        results.flush();
                        ++evaluated;
                        char line[200];
                        std::snprintf(line, sizeof line, "%s/%d: correct=%s e=%.4f%s%s\n", e.problem_id.c_str(),
                                      e.sample_index, e.correct ? "yes" : "no", e.efficiency_score,
                                      e.correct ? "" : " reason=", e.correct ? "" : std::string(to_string(e.failure_reason)).c_str());
                        out << line;
                    }
                } catch (...) {
                    std::lock_guard lock(mu);
                    if (!fatal) fatal = std::current_exception();
                    return;
                }
            }
        };

        const int threads = std::min<int>(opts.parallel, std::max<int>(1, static_cast<int>(order.size())));
        if (threads <= 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
            for (auto& th : pool) th.join();
        }
        if (fatal) std::rethrow_exception(fatal);

        out << "evaluated " << evaluated.load() << " sample(s), " << skipped_done << " already present in "
            << opts.out.string() << "\n";
        return (issues || any_failure) ? kRecordedIssues : kSuccess;
    } catch (const std::exception& e) {
        return report_error(e, err);
    }
}

// ---------------------------------------------------------------- score

int cmd_score(const ScoreOptions& opts, std::ostream& out, std::ostream& err) {
    try {
        if (!fs::exists(opts.results)) throw ConfigError("results file '" + opts.results.string() + "' does not exist");
        auto records = load_results(opts.results);
        std::map<std::string, ProblemScores> grouped;
        std::set<std::pair<std::string, int>> seen;
        for (const auto& r : records) {
            if (!seen.insert({r.problem_id, r.sample_index}).second) {
                err << "warning: duplicate record for " << r.problem_id << "/" << r.sample_index << " ignored\n";
                continue;
            }
            auto& g = grouped[r.problem_id];
            g.scores.push_back(r.efficiency_score);
            g.speedups.push_back(r.speedup);
            if (r.correct) ++g.correct;
        }
        MetricReport report = aggregate_report(grouped, opts.ks);
        out << report.table();
        if (!opts.out.empty()) {
            std::ofstream f(opts.out, std::ios::binary | std::ios::trunc);
            DumpOptions d;
            d.indent = 2;
            f << dump(report.to_value(), d) << "\n";
            if (!f.flush()) throw Error("cannot write '" + opts.out.string() + "'");
        }
        return kSuccess;
    } catch (const std::exception& e) {
        return report_error(e, err);
    }
}

// ---------------------------------------------------------------- selftest

int cmd_selftest(std::uint64_t seed, std::ostream& out, std::ostream& err) {
    try {
        SelftestOptions opts;
        opts.seed = seed;
        auto report = run_selftest(opts);
        out << "seed " << seed << "\n" << report.summary();
        return report.passed() ? kSuccess : kRecordedIssues;
    } catch (const std::exception& e) {
        return report_error(e, err);
    }
}

// ---------------------------------------------------------------- import

int cmd_import_cases(const ImportOptions& opts, std::ostream& out, std::ostream& err) {
    try {
        if (opts.generator.empty()) throw ConfigError("no generator command given");
        ProblemSet problems = parse_problemset(opts.problemset);
        auto it = std::find_if(problems.begin(), problems.end(), [&](const Problem& p) { return p.id == opts.problem_id; });
        if (it == problems.end()) throw ConfigError("problem '" + opts.problem_id + "' is not in the problemset");
        std::size_t before = 0;
        for (const auto& l : it->levels) before += l.cases.size();
        *it = import_generated_cases(*it, opts.generator, opts.seed);
        std::size_t after = 0;
        for (const auto& l : it->levels) after += l.cases.size();
        write_problemset(opts.out, problems);
        out << "imported " << (after - before) << " case(s) into '" << opts.problem_id << "'; recalibrate before evaluating\n";
        return kSuccess;
    } catch (const std::exception& e) {
        return report_error(e, err);
    }
}

}  // namespace effbench::cli
