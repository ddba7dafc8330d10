#include <gtest/gtest.h>

#include "effbench/errors.hpp"
#include "effbench/harness.hpp"
#include "test_support.hpp"

using namespace effbench;
using namespace testing_support;

namespace {

CodeSample sample(int index = 0) { return CodeSample{"p", index, "def f(n): return n * 10", Value()}; }

}  // namespace

TEST(EvaluateSample, ReplayingReferenceScoresOne) {
    Problem p = calibrated_problem();
    MockRunner runner(replay_reference(p));
    SampleEvaluation e = evaluate_sample(p, sample(), HarnessConfig{}, runner);
    EXPECT_TRUE(e.correct);
    EXPECT_EQ(e.failure_reason, FailureReason::none);
    EXPECT_NEAR(e.efficiency_score, 1.0, 1e-9);
    for (double f : e.level_scores) EXPECT_NEAR(f, 1.0, 1e-9);
    EXPECT_NEAR(e.speedup, 1.0, 1e-9);
    EXPECT_EQ(runner.levels_dispatched(), (std::vector<int>{0, 1, 2, 3}));
}

TEST(EvaluateSample, JobsCarryLimitRepeatsAndExpectations) {
    Problem p = calibrated_problem();
    MockRunner runner(replay_reference(p));
    HarnessConfig cfg;
    cfg.repeats = 3;
    evaluate_sample(p, sample(), cfg, runner);
    for (const auto& job : runner.calls) {
        EXPECT_EQ(job.soft_limit, p.time_limit);
        EXPECT_EQ(job.repeats, 3);
        EXPECT_EQ(job.entry_point, "f");
        ASSERT_TRUE(job.expected_outputs.has_value());
        EXPECT_EQ(job.expected_outputs->size(), job.cases.size());
        EXPECT_TRUE(job.stop_on_failure);
        EXPECT_FALSE(job.capture_output);
    }
}

TEST(EvaluateSample, WrongOutputOnLevelZero) {
    Problem p = calibrated_problem();
    MockRunner runner([&](const RunnerJob& job, std::size_t i) {
        return level_of(job.cases[i].case_id) == 0 && i == 2 ? wrong_record() : ok_record(job.repeats, 1e-4);
    });
    SampleEvaluation e = evaluate_sample(p, sample(), HarnessConfig{}, runner);
    EXPECT_FALSE(e.correct);
    EXPECT_EQ(e.efficiency_score, 0.0);
    EXPECT_EQ(e.failure_reason, FailureReason::level0_fail);
    for (double f : e.level_scores) EXPECT_EQ(f, 0.0);
    EXPECT_EQ(runner.levels_dispatched(), std::vector<int>{0});
}

TEST(EvaluateSample, LevelOneTimeoutSkipsTheRest) {
    Problem p = calibrated_problem();
    MockRunner runner([&](const RunnerJob& job, std::size_t i) {
        return level_of(job.cases[i].case_id) == 1 ? timeout_record(job.soft_limit) : ok_record(job.repeats, 1e-4);
    });
    SampleEvaluation e = evaluate_sample(p, sample(), HarnessConfig{}, runner);
    EXPECT_TRUE(e.correct);
    EXPECT_EQ(e.failure_reason, FailureReason::none);
    EXPECT_EQ(e.efficiency_score, 0.0);
    EXPECT_EQ(e.level_scores, (std::vector<double>{0.0, 0.0, 0.0}));
    EXPECT_EQ(runner.levels_dispatched(), (std::vector<int>{0, 1}));
    ASSERT_EQ(e.levels.size(), 4u);
    EXPECT_FALSE(e.levels[2].executed);
    EXPECT_FALSE(e.levels[3].executed);
    EXPECT_TRUE(e.levels[1].timed_out());
    // Unreached cases count as t = T for the speedup baseline.
    EXPECT_GT(e.speedup, 0.0);
}

TEST(EvaluateSample, LaterTimeoutKeepsEarlierScores) {
    Problem p = calibrated_problem();
    MockRunner runner([&](const RunnerJob& job, std::size_t i) {
        const int l = level_of(job.cases[i].case_id);
        if (l == 3) return timeout_record(job.soft_limit);
        return ok_record(job.repeats, p.levels[static_cast<std::size_t>(l)].cases[i].reference_time);
    });
    SampleEvaluation e = evaluate_sample(p, sample(), HarnessConfig{}, runner);
    EXPECT_TRUE(e.correct);
    EXPECT_NEAR(e.level_scores[0], 1.0, 1e-9);
    EXPECT_NEAR(e.level_scores[1], 1.0, 1e-9);
    EXPECT_EQ(e.level_scores[2], 0.0);
    EXPECT_NEAR(e.efficiency_score, 0.6, 1e-9);
}

TEST(EvaluateSample, WrongOutputOnHigherLevel) {
    Problem p = calibrated_problem();
    MockRunner runner([&](const RunnerJob& job, std::size_t i) {
        return level_of(job.cases[i].case_id) == 2 ? wrong_record() : ok_record(job.repeats, 1e-4);
    });
    SampleEvaluation e = evaluate_sample(p, sample(), HarnessConfig{}, runner);
    EXPECT_FALSE(e.correct);
    EXPECT_EQ(e.failure_reason, FailureReason::wrong_output);
    EXPECT_EQ(e.efficiency_score, 0.0);
    EXPECT_EQ(e.speedup, 0.0);
    EXPECT_EQ(runner.levels_dispatched(), (std::vector<int>{0, 1, 2}));
}

TEST(EvaluateSample, RuntimeErrorIsDistinct) {
    Problem p = calibrated_problem();
    MockRunner runner([&](const RunnerJob&, std::size_t) {
        RunnerRecord r;
        r.status = RecordStatus::runtime_error;
        r.diagnostics = "ZeroDivisionError";
        return r;
    });
    SampleEvaluation e = evaluate_sample(p, sample(), HarnessConfig{}, runner);
    EXPECT_FALSE(e.correct);
    EXPECT_EQ(e.failure_reason, FailureReason::runtime_error);
    EXPECT_NE(e.diagnostics.find("ZeroDivisionError"), std::string::npos);
}

TEST(EvaluateSample, LevelZeroTimeoutIsIncorrect) {
    Problem p = calibrated_problem();
    MockRunner runner([&](const RunnerJob& job, std::size_t) { return timeout_record(job.soft_limit); });
    SampleEvaluation e = evaluate_sample(p, sample(), HarnessConfig{}, runner);
    EXPECT_FALSE(e.correct);
    EXPECT_EQ(e.failure_reason, FailureReason::level0_fail);
}

TEST(EvaluateSample, SlowTimesBecomeCensoredAtTheLimit) {
    Problem p = calibrated_problem();
    MockRunner runner([&](const RunnerJob& job, std::size_t i) {
        return level_of(job.cases[i].case_id) == 2 ? ok_record(job.repeats, job.soft_limit * 1.5)
                                                   : ok_record(job.repeats, 1e-4);
    });
    SampleEvaluation e = evaluate_sample(p, sample(), HarnessConfig{}, runner);
    EXPECT_TRUE(e.correct);
    EXPECT_TRUE(e.levels[2].timed_out());
    for (const auto& lvl : e.levels) {
        for (const auto& t : lvl.case_times) {
            if (!t.censored) EXPECT_LT(t.value, p.time_limit);
        }
    }
    EXPECT_EQ(runner.levels_dispatched(), (std::vector<int>{0, 1, 2}));
}

TEST(EvaluateSample, CalibrationRatioRescales) {
    Problem p = calibrated_problem();
    // Machine runs 2x slow: every timing doubled, ratio 0.5 restores parity.
    MockRunner runner([&](const RunnerJob& job, std::size_t i) {
        const int l = level_of(job.cases[i].case_id);
        return ok_record(job.repeats, 2.0 * p.levels[static_cast<std::size_t>(l)].cases[i].reference_time);
    });
    SampleEvaluation e = evaluate_sample(p, sample(), HarnessConfig{}, runner, 0.5);
    EXPECT_NEAR(e.efficiency_score, 1.0, 1e-9);
}

TEST(EvaluateSample, HardnessOverride) {
    Problem p = calibrated_problem();
    MockRunner runner([&](const RunnerJob& job, std::size_t i) {
        const int l = level_of(job.cases[i].case_id);
        if (l == 3) return timeout_record(job.soft_limit);
        return ok_record(job.repeats, p.levels[static_cast<std::size_t>(l)].cases[i].reference_time);
    });
    HarnessConfig cfg;
    cfg.hardness_weights = {1.0, 1.0, 2.0};
    EXPECT_NEAR(evaluate_sample(p, sample(), cfg, runner).efficiency_score, 0.5, 1e-9);
    cfg.hardness_weights = {1.0, 1.0};
    EXPECT_THROW(evaluate_sample(p, sample(), cfg, runner), ConfigError);
}

TEST(EvaluateSample, DeterministicGivenDeterministicRunner) {
    Problem p = calibrated_problem();
    auto respond = [&](const RunnerJob& job, std::size_t i) {
        const int l = level_of(job.cases[i].case_id);
        RunnerRecord r = ok_record(job.repeats, 0.0);
        for (int k = 0; k < job.repeats; ++k) r.timings[static_cast<std::size_t>(k)] = 0.0005 * (l + 1) + 0.0001 * k;
        return r;
    };
    MockRunner a(respond), b(respond);
    EXPECT_EQ(dump(evaluate_sample(p, sample(), HarnessConfig{}, a).to_value()),
              dump(evaluate_sample(p, sample(), HarnessConfig{}, b).to_value()));
}

TEST(EvaluateSample, ShortRecordListIsProtocolError) {
    Problem p = calibrated_problem();
    class Truncating : public Runner {
    public:
        RunResult run(const RunnerJob& job) override {
            RunResult r;
            RunnerRecord rec = ok_record(job.repeats, 1e-4);
            rec.case_id = job.cases[0].case_id;
            r.records.push_back(rec);
            return r;
        }
    } runner;
    EXPECT_THROW(evaluate_sample(p, sample(), HarnessConfig{}, runner), ProtocolError);
}

TEST(EvaluateSample, RejectsUncalibratedProblems) {
    Problem p = calibrated_problem();
    p.levels[1].cases[0].reference_time = 0.0;
    MockRunner runner(replay_reference(p));
    EXPECT_THROW(evaluate_sample(p, sample(), HarnessConfig{}, runner), DataError);
    EXPECT_TRUE(runner.calls.empty());
}

// ---------------------------------------------------------------- reference

namespace {

Problem uncalibrated(const Problem& p) {
    Problem q = p;
    q.time_limit = 60.0;
    for (auto& l : q.levels) {
        for (auto& c : l.cases) {
            c.reference_time = 0.0;
            c.expected_output.reset();
        }
    }
    return q;
}

// Answers n * 10 with a time that grows with n.
RunnerRecord reference_answer(const RunnerJob& job, std::size_t i) {
    const auto n = job.cases[i].input.as_list().at(0).as_int64();
    return ok_record(job.repeats, 0.01 * static_cast<double>(n + 1), job.capture_output ? std::optional<Value>(Value(n * 10)) : std::nullopt);
}

}  // namespace

TEST(MeasureReference, PopulatesTimesOutputsAndLimit) {
    Problem raw = uncalibrated(calibrated_problem());
    MockRunner runner(reference_answer);
    HarnessConfig cfg;
    Problem cal = measure_reference(raw, "ref", cfg, runner);
    EXPECT_TRUE(cal.calibrated());
    EXPECT_TRUE(validate_problem(cal).empty());
    // 20 cases numbered 0..19, the last takes 0.20 s.
    EXPECT_NEAR(cal.max_reference_time(), 0.20, 1e-12);
    EXPECT_NEAR(cal.time_limit, 0.40, 1e-12);
    EXPECT_EQ(*cal.levels[2].cases[1].expected_output, Value(std::int64_t{130}));
    for (const auto& job : runner.calls) EXPECT_EQ(job.soft_limit, cfg.reference_ceiling);
    // A timed job and an untimed check job per level.
    EXPECT_EQ(runner.calls.size(), 8u);
    EXPECT_EQ(runner.calls[1].repeats, 1);
}

TEST(MeasureReference, TimeLimitFollowsAlpha) {
    Problem raw = uncalibrated(calibrated_problem());
    MockRunner runner([](const RunnerJob& job, std::size_t i) {
        const auto n = job.cases[i].input.as_list().at(0).as_int64();
        return ok_record(job.repeats, n == 19 ? 0.9 : 0.1, Value(n * 10));
    });
    Problem cal = measure_reference(raw, "ref", HarnessConfig{}, runner);
    EXPECT_NEAR(cal.time_limit, 1.8, 1e-12);
}

TEST(MeasureReference, NondeterministicOutputIsRejected) {
    Problem raw = uncalibrated(calibrated_problem());
    int calls = 0;
    MockRunner runner([&](const RunnerJob& job, std::size_t i) {
        RunnerRecord r = reference_answer(job, i);
        r.output = Value(static_cast<std::int64_t>(++calls));
        return r;
    });
    try {
        measure_reference(raw, "ref", HarnessConfig{}, runner);
        FAIL() << "expected AuthoringError";
    } catch (const AuthoringError& e) {
        EXPECT_NE(std::string(e.what()).find("nondeterministic reference"), std::string::npos) << e.what();
    }
}

TEST(MeasureReference, TimeoutAndFailureAreAuthoringErrors) {
    Problem raw = uncalibrated(calibrated_problem());
    MockRunner slow([](const RunnerJob& job, std::size_t i) {
        return level_of(job.cases[i].case_id) == 3 ? timeout_record(job.soft_limit) : reference_answer(job, i);
    });
    EXPECT_THROW(measure_reference(raw, "ref", HarnessConfig{}, slow), AuthoringError);
    MockRunner broken([](const RunnerJob&, std::size_t) { return wrong_record(); });
    EXPECT_THROW(measure_reference(raw, "ref", HarnessConfig{}, broken), AuthoringError);
}

TEST(MeasureReference, DisagreeingDeclaredOutputIsRejected) {
    Problem raw = uncalibrated(calibrated_problem());
    raw.levels[1].cases[0].expected_output = Value(-1);
    MockRunner runner(reference_answer);
    EXPECT_THROW(measure_reference(raw, "ref", HarnessConfig{}, runner), AuthoringError);
}

TEST(CalibrationRatio, ProbesSlowestCase) {
    Problem p = calibrated_problem();
    const double stored = p.max_reference_time();
    MockRunner runner([&](const RunnerJob& job, std::size_t) { return ok_record(job.repeats, stored * 4.0); });
    EXPECT_NEAR(calibration_ratio(p, "ref", HarnessConfig{}, runner), 0.25, 1e-12);
    ASSERT_EQ(runner.calls.size(), 1u);
    EXPECT_EQ(runner.calls[0].cases.size(), 1u);
    EXPECT_EQ(runner.calls[0].cases[0].case_id, "L3C3");
}

// ---------------------------------------------------------------- protocol

TEST(Protocol, JobRoundTripsOnTheWire) {
    RunnerJob job;
    job.job_id = "p/0/L1";
    job.candidate_source = "def f(n):\n    return n\n";
    job.entry_point = "f";
    job.cases = {{"L1C0", parse_value("[1]")}, {"L1C1", parse_value("[" + std::string(50, '9') + "]")}};
    job.soft_limit = 0.25;
    job.repeats = 6;
    job.expected_outputs = std::vector<Value>{Value(1), Value(nullptr)};
    job.capture_output = true;
    job.stop_on_failure = true;
    Value wire = job.to_value();
    for (const char* key : {"job_id", "candidate_source", "entry_point", "cases", "soft_limit", "repeats", "checker",
                            "expected_outputs", "capture_output"}) {
        EXPECT_NE(wire.find(key), nullptr) << key;
    }
    EXPECT_EQ(wire.find("stop_on_failure"), nullptr);
    RunnerJob back = RunnerJob::from_value(parse_value(dump(wire)));
    EXPECT_EQ(dump(back.to_value()), dump(wire));
    EXPECT_FALSE(back.stop_on_failure);

    job.soft_limit = 0.0;
    EXPECT_THROW(job.validate(), ParameterError);
    job.soft_limit = 1.0;
    job.repeats = 0;
    EXPECT_THROW(job.validate(), ParameterError);
}

TEST(Protocol, RecordRoundTrip) {
    RunnerRecord r;
    r.case_id = "L0C1";
    r.status = RecordStatus::timeout;
    r.timings = {0.1, 0.25};
    r.diagnostics = "soft limit";
    RunnerRecord back = RunnerRecord::from_value(parse_value(dump(r.to_value())));
    EXPECT_EQ(back.case_id, r.case_id);
    EXPECT_EQ(back.status, r.status);
    EXPECT_EQ(back.timings, r.timings);
    EXPECT_FALSE(back.output.has_value());
    for (auto s : {RecordStatus::ok, RecordStatus::wrong_output, RecordStatus::timeout, RecordStatus::runtime_error}) {
        EXPECT_EQ(record_status_from_string(to_string(s)), s);
    }
    EXPECT_THROW(RunnerRecord::from_value(parse_value(R"({"case_id":"x","status":"bogus","timings":[]})")), ParseError);
    EXPECT_EQ(case_id(2, 3), "L2C3");
}

TEST(Protocol, Budget) {
    RunnerJob job;
    job.cases.resize(4);
    job.soft_limit = 0.5;
    job.repeats = 6;
    EXPECT_DOUBLE_EQ(job_budget(job, 10.0), 4 * 6 * 0.5 + 10.0);
}
