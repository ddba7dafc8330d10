#include "effbench/harness.hpp"

#include <algorithm>

#include "effbench/metrics.hpp"

namespace effbench {

std::string case_id(int level, std::size_t case_index) {
    return "L" + std::to_string(level) + "C" + std::to_string(case_index);
}

namespace {

RunnerJob level_job(const Problem& problem, const Level& level, const std::string& job_id, const std::string& source,
                    double soft_limit, int repeats) {
    RunnerJob job;
    job.job_id = job_id;
    job.candidate_source = source;
    job.entry_point = problem.entry_point;
    job.soft_limit = soft_limit;
    job.repeats = repeats;
    job.checker = problem.checker;
    for (std::size_t m = 0; m < level.cases.size(); ++m) {
        job.cases.push_back({case_id(level.index, m), level.cases[m].input});
    }
    return job;
}

std::vector<double> resolve_hardness(const Problem& problem, const HarnessConfig& config) {
    std::vector<double> h = config.hardness_weights.empty() ? problem.hardness() : config.hardness_weights;
    if (h.size() != static_cast<std::size_t>(problem.max_level())) {
        throw ConfigError("problem '" + problem.id + "' has " + std::to_string(problem.max_level()) +
                          " scored levels but " + std::to_string(h.size()) + " hardness weights were given");
    }
    return h;
}

double level_reference_max(const Level& level) {
    double m = 0.0;
    for (const auto& c : level.cases) m = std::max(m, c.reference_time);
    return m;
}

}  // namespace

SampleEvaluation evaluate_sample(const Problem& problem, const CodeSample& sample, const HarnessConfig& config,
                                 Runner& runner, double calibration_ratio) {
    config.validate();
    if (!problem.calibrated()) throw DataError("problem '" + problem.id + "' is not calibrated");
    if (!(calibration_ratio > 0.0)) throw ParameterError("calibration ratio must be positive");
    if (sample.source.empty()) throw ParameterError("sample " + std::to_string(sample.sample_index) + " of '" +
                                                    problem.id + "' has no source");
    const auto hardness = resolve_hardness(problem, config);
    const double limit = problem.time_limit;
    const int L = problem.max_level();

    SampleEvaluation eval;
    eval.problem_id = problem.id;
    eval.sample_index = sample.sample_index;
    eval.correct = true;

    std::vector<LevelOutcome> outcomes;
    Progression verdict = Progression::proceed;
    bool runtime_failure = false;

    for (const auto& level : problem.levels) {
        if (verdict != Progression::proceed) {
            LevelOutcome skipped;
            skipped.level_index = level.index;
            skipped.executed = false;
            outcomes.push_back(std::move(skipped));
            continue;
        }

        RunnerJob job = level_job(problem, level, problem.id + "/" + std::to_string(sample.sample_index) + "/L" +
                                                      std::to_string(level.index),
                                  sample.source, limit, config.repeats);
        std::vector<Value> expected;
        for (const auto& c : level.cases) expected.push_back(*c.expected_output);
        job.expected_outputs = std::move(expected);
        job.stop_on_failure = true;

        RunResult run = runner.run(job);

        LevelOutcome outcome;
        outcome.level_index = level.index;
        outcome.executed = true;
        for (const auto& rec : run.records) {
            if (rec.status == RecordStatus::wrong_output || rec.status == RecordStatus::runtime_error) {
                outcome.outputs_correct = false;
                if (rec.status == RecordStatus::runtime_error) runtime_failure = true;
                if (!rec.diagnostics.empty()) eval.diagnostics += rec.case_id + ": " + rec.diagnostics + "\n";
                break;
            }
            if (rec.status == RecordStatus::timeout) {
                outcome.case_times.push_back(CensoredTime::killed_at(limit));
                break;
            }
            // Scaling commutes with the Hodges-Lehmann estimate, so the
            // ratio is applied once to the per-case estimate.
            const CensoredTime raw = CensoredTime::observed(hodges_lehmann(rec.timings));
            const double t = apply_calibration(std::span(&raw, 1), calibration_ratio, 1.0).front().value;
            outcome.case_times.push_back(t < limit ? CensoredTime::observed(t) : CensoredTime::killed_at(limit));
            if (t >= limit) break;
        }
        if (outcome.outputs_correct && !outcome.timed_out() && outcome.case_times.size() != level.cases.size()) {
            throw ProtocolError("job " + job.job_id + ": runner returned " + std::to_string(run.records.size()) +
                                " records for " + std::to_string(level.cases.size()) + " cases");
        }
        if (run.hard_killed && !run.diagnostics.empty()) eval.diagnostics += run.diagnostics;
        outcomes.push_back(std::move(outcome));
        std::span<const LevelOutcome> executed(outcomes.data(), outcomes.size());
        verdict = level_progression(executed);
    }

    eval.levels = outcomes;
    eval.level_scores.assign(static_cast<std::size_t>(L), 0.0);

    if (verdict == Progression::stop_incorrect) {
        eval.correct = false;
        const auto failed = std::find_if(outcomes.begin(), outcomes.end(), [](const LevelOutcome& o) {
            return o.executed && (!o.outputs_correct || (o.level_index == 0 && o.timed_out()));
        });
        if (runtime_failure) {
            eval.failure_reason = FailureReason::runtime_error;
        } else if (failed != outcomes.end() && failed->level_index == 0) {
            eval.failure_reason = FailureReason::level0_fail;
        } else {
            eval.failure_reason = FailureReason::wrong_output;
        }
        eval.efficiency_score = 0.0;
        eval.speedup = 0.0;
        return eval;
    }

    std::vector<std::vector<CensoredTime>> speed_times;
    std::vector<std::vector<double>> speed_refs;
    for (int l = 1; l <= L; ++l) {
        const auto& level = problem.levels[static_cast<std::size_t>(l)];
        const auto& o = outcomes[static_cast<std::size_t>(l)];
        if (o.executed && !o.timed_out() && o.case_times.size() == level.cases.size()) {
            eval.level_scores[static_cast<std::size_t>(l - 1)] =
                level_score(worst_time(o.case_times), level_reference_max(level), limit);
        }
        // Cases never reached are treated as running into the limit.
        std::vector<CensoredTime> times = o.case_times;
        times.resize(level.cases.size(), CensoredTime::killed_at(limit));
        std::vector<double> refs;
        for (const auto& c : level.cases) refs.push_back(c.reference_time);
        speed_times.push_back(std::move(times));
        speed_refs.push_back(std::move(refs));
    }
    eval.efficiency_score = sample_score(eval.level_scores, hardness, true);
    eval.speedup = speedup_at_1(speed_times, speed_refs, limit, hardness);
    return eval;
}

Problem measure_reference(const Problem& problem, const std::string& reference_source, const HarnessConfig& config,
                          Runner& runner) {
    config.validate();
    if (reference_source.empty()) throw ParameterError("reference solution for '" + problem.id + "' is empty");
    Problem out = problem;
    std::vector<double> all_times;

    for (auto& level : out.levels) {
        const std::string base = problem.id + "/reference/L" + std::to_string(level.index);
        RunnerJob timed = level_job(problem, level, base, reference_source, config.reference_ceiling, config.repeats);
        timed.capture_output = true;
        RunResult first = runner.run(timed);
        if (first.records.size() != level.cases.size()) {
            throw ProtocolError("job " + timed.job_id + ": runner returned " + std::to_string(first.records.size()) +
                                " records for " + std::to_string(level.cases.size()) + " cases");
        }

        auto where = [&](std::size_t m) {
            return "problem '" + problem.id + "' level " + std::to_string(level.index) + " case " + std::to_string(m);
        };
        for (std::size_t m = 0; m < level.cases.size(); ++m) {
            const auto& rec = first.records.at(m);
            if (rec.status == RecordStatus::timeout) {
                throw AuthoringError("reference timed out on " + where(m) + " under the " +
                                     std::to_string(config.reference_ceiling) + " s ceiling");
            }
            if (rec.status != RecordStatus::ok) {
                throw AuthoringError("reference failed on " + where(m) + " (" + std::string(to_string(rec.status)) +
                                     "): " + rec.diagnostics);
            }
        }

        RunnerJob check = timed;
        check.job_id = base + "/check";
        check.repeats = 1;
        RunResult second = runner.run(check);
        if (second.records.size() != level.cases.size()) {
            throw AuthoringError("nondeterministic reference on problem '" + problem.id + "' level " +
                                 std::to_string(level.index) + ": check run returned " +
                                 std::to_string(second.records.size()) + " records");
        }

        for (std::size_t m = 0; m < level.cases.size(); ++m) {
            const auto& rec = first.records.at(m);
            const auto& again = second.records.at(m);
            if (again.status != RecordStatus::ok || !(again.output == rec.output)) {
                throw AuthoringError("nondeterministic reference on " + where(m));
            }
            auto& c = level.cases[m];
            if (c.expected_output && !(*c.expected_output == *rec.output)) {
                throw AuthoringError("reference output disagrees with the declared expected output on " + where(m));
            }
            c.expected_output = *rec.output;
            c.reference_time = hodges_lehmann(rec.timings);
            if (!(c.reference_time > 0.0)) {
                throw AuthoringError("reference time on " + where(m) + " is zero; clock resolution too coarse");
            }
            all_times.push_back(c.reference_time);
        }
    }
    out.time_limit = compute_time_limit(all_times, config.timeout_factor);

    auto violations = validate_problem(out);
    if (!violations.empty()) throw ValidationError(std::move(violations));
    return out;
}

double calibration_ratio(const Problem& problem, const std::string& reference_source, const HarnessConfig& config,
                         Runner& runner) {
    config.validate();
    if (!problem.calibrated()) throw DataError("problem '" + problem.id + "' is not calibrated");
    const Level* slow_level = nullptr;
    std::size_t slow_case = 0;
    double stored = -1.0;
    for (const auto& level : problem.levels) {
        for (std::size_t m = 0; m < level.cases.size(); ++m) {
            if (level.cases[m].reference_time > stored) {
                stored = level.cases[m].reference_time;
                slow_level = &level;
                slow_case = m;
            }
        }
    }
    RunnerJob job;
    job.job_id = problem.id + "/probe";
    job.candidate_source = reference_source;
    job.entry_point = problem.entry_point;
    job.cases = {{case_id(slow_level->index, slow_case), slow_level->cases[slow_case].input}};
    job.soft_limit = config.reference_ceiling;
    job.repeats = config.repeats;
    job.checker = problem.checker;
    job.expected_outputs = std::vector<Value>{*slow_level->cases[slow_case].expected_output};
    RunResult run = runner.run(job);
    if (run.records.empty()) throw ProtocolError("job " + job.job_id + ": runner returned no record");
    const auto& rec = run.records.front();
    if (rec.status != RecordStatus::ok) {
        throw AuthoringError("calibration probe for '" + problem.id + "' failed (" + std::string(to_string(rec.status)) +
                             "): " + rec.diagnostics);
    }
    double fresh = hodges_lehmann(rec.timings);
    if (!(fresh > 0.0)) throw AuthoringError("calibration probe for '" + problem.id + "' measured zero time");
    return stored / fresh;
}

}  // namespace effbench
