#include <gtest/gtest.h>

#include <chrono>

#include "effbench/errors.hpp"
#include "effbench/harness.hpp"
#include "test_support.hpp"

using namespace effbench;
using namespace testing_support;
using Clock = std::chrono::steady_clock;

namespace {

RunnerJob fib_job(const std::string& directive, int cases, double soft_limit = 1.0, int repeats = 2) {
    RunnerJob job;
    job.job_id = "test/" + directive;
    job.candidate_source = directive;
    job.entry_point = "fib";
    job.soft_limit = soft_limit;
    job.repeats = repeats;
    for (int i = 0; i < cases; ++i) job.cases.push_back({case_id(1, static_cast<std::size_t>(i)), List{Value(i + 10)}});
    return job;
}

SupervisionOptions quick(double margin = 0.5) {
    SupervisionOptions o;
    o.hard_kill_margin = margin;
    o.isolate_network = false;
    return o;
}

const CommandSpec kFixture{{FIXTURE_RUNNER}};

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

}  // namespace

TEST(Supervision, EarlyFinishPassesRecordsThrough) {
    auto job = fib_job("fib", 3);
    job.capture_output = true;
    RunResult r = supervise_job(kFixture, job, quick());
    EXPECT_FALSE(r.hard_killed);
    ASSERT_EQ(r.records.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(r.records[i].case_id, job.cases[i].case_id);
        EXPECT_EQ(r.records[i].status, RecordStatus::ok);
        EXPECT_EQ(r.records[i].timings.size(), 2u);
    }
    EXPECT_EQ(*r.records[0].output, Value(std::int64_t{55}));
}

TEST(Supervision, SpinningWorkerIsKilledAndEveryCaseCensored) {
    auto job = fib_job("loop_forever", 3, 0.1, 1);
    auto start = Clock::now();
    RunResult r = supervise_job(kFixture, job, quick(0.5));
    double took = seconds_since(start);
    EXPECT_TRUE(r.hard_killed);
    ASSERT_EQ(r.records.size(), 3u);
    for (const auto& rec : r.records) {
        EXPECT_EQ(rec.status, RecordStatus::timeout);
        EXPECT_EQ(rec.timings, std::vector<double>{0.1});
    }
    const double budget = job_budget(job, 0.5);
    EXPECT_GE(took, budget - 0.05);
    EXPECT_LT(took, budget + 3.0);
}

TEST(Supervision, PartialReportThenHang) {
    auto job = fib_job("hang_after after=2", 4, 0.05, 2);
    RunResult r = supervise_job(kFixture, job, quick(0.5));
    EXPECT_TRUE(r.hard_killed);
    ASSERT_EQ(r.records.size(), 4u);
    EXPECT_EQ(r.records[0].status, RecordStatus::ok);
    EXPECT_EQ(r.records[1].status, RecordStatus::ok);
    EXPECT_EQ(r.records[2].status, RecordStatus::timeout);
    EXPECT_EQ(r.records[3].status, RecordStatus::timeout);
    EXPECT_EQ(r.records[3].timings.back(), 0.05);
}

TEST(Supervision, CooperativeSoftLimitTimeout) {
    auto job = fib_job("fib cost=const scale=5", 2, 0.05, 3);
    RunResult r = supervise_job(kFixture, job, quick());
    EXPECT_FALSE(r.hard_killed);
    ASSERT_EQ(r.records.size(), 2u);
    for (const auto& rec : r.records) {
        EXPECT_EQ(rec.status, RecordStatus::timeout);
        EXPECT_EQ(rec.timings.back(), 0.05);
    }
}

TEST(Supervision, StopOnFailureEndsTheWorker) {
    auto job = fib_job("raise", 5);
    job.stop_on_failure = true;
    RunResult r = supervise_job(kFixture, job, quick());
    ASSERT_EQ(r.records.size(), 1u);
    EXPECT_EQ(r.records[0].status, RecordStatus::runtime_error);
    EXPECT_FALSE(r.hard_killed);
}

TEST(Supervision, WrongOutputsAreReported) {
    auto job = fib_job("fib_plus_one", 2);
    job.expected_outputs = std::vector<Value>{Value(55), Value(89)};
    RunResult r = supervise_job(kFixture, job, quick());
    ASSERT_EQ(r.records.size(), 2u);
    EXPECT_EQ(r.records[0].status, RecordStatus::wrong_output);
}

TEST(Supervision, MissingEntryPointIsRuntimeError) {
    auto job = fib_job("fib", 1);
    job.entry_point = "fibonacci";
    RunResult r = supervise_job(kFixture, job, quick());
    ASSERT_EQ(r.records.size(), 1u);
    EXPECT_EQ(r.records[0].status, RecordStatus::runtime_error);
    EXPECT_NE(r.records[0].diagnostics.find("fibonacci"), std::string::npos);
}

TEST(Supervision, GarbageOutputIsProtocolError) {
    EXPECT_THROW(supervise_job(kFixture, fib_job("garbage", 2), quick()), ProtocolError);
}

TEST(Supervision, NonzeroExitIsProtocolError) {
    try {
        supervise_job(kFixture, fib_job("exit_nonzero", 2), quick());
        FAIL() << "expected ProtocolError";
    } catch (const ProtocolError& e) {
        EXPECT_NE(std::string(e.what()).find("test/exit_nonzero"), std::string::npos) << e.what();
    }
}

TEST(Supervision, UnstartableRunnerThrows) {
    EXPECT_THROW(supervise_job(CommandSpec{{"/nonexistent/runner"}}, fib_job("fib", 1), quick()), Error);
}

TEST(Supervision, JobFileIsLastArgumentInsideScratchDir) {
    // A shell runner that checks its last argument is ./job.json and echoes
    // one record built from it.
    const std::string script =
        "for last; do :; done; "
        "[ \"$last\" = \"$PWD/job.json\" ] || exit 9; "
        "[ -s \"$last\" ] || exit 8; "
        "echo '{\"case_id\": \"L1C0\", \"status\": \"ok\", \"timings\": [0.001, 0.002], \"diagnostics\": \"\"}'";
    CommandSpec runner{{"/bin/sh", "-c", script, "runner", "--extra-flag"}};
    RunResult r = supervise_job(runner, fib_job("fib", 1), quick());
    ASSERT_EQ(r.records.size(), 1u);
    EXPECT_EQ(r.records[0].timings, (std::vector<double>{0.001, 0.002}));
}

TEST(Supervision, OutOfOrderRecordIsProtocolError) {
    const std::string script =
        "echo '{\"case_id\": \"L1C1\", \"status\": \"ok\", \"timings\": [0.1], \"diagnostics\": \"\"}'";
    auto job = fib_job("fib", 2, 1.0, 1);
    EXPECT_THROW(supervise_job(CommandSpec{{"/bin/sh", "-c", script, "runner"}}, job, quick()), ProtocolError);
}

TEST(Supervision, ShortOkRecordIsProtocolError) {
    const std::string script =
        "echo '{\"case_id\": \"L1C0\", \"status\": \"ok\", \"timings\": [0.1], \"diagnostics\": \"\"}'";
    auto job = fib_job("fib", 1, 1.0, 3);
    EXPECT_THROW(supervise_job(CommandSpec{{"/bin/sh", "-c", script, "runner"}}, job, quick()), ProtocolError);
}

TEST(Supervision, EvaluateWithProcessRunner) {
    // Level-2 cases cost 2^n * scale, so a "exp" candidate passes small levels
    // and hits the soft limit later.
    Problem p;
    p.id = "fib";
    p.entry_point = "fib";
    p.checker.mode = OutputChecker::Mode::exact;
    const std::vector<std::vector<int>> inputs{{1, 2, 3}, {10, 11}, {24, 25}};
    for (std::size_t l = 0; l < inputs.size(); ++l) {
        Level level;
        level.index = static_cast<int>(l);
        level.hardness = l == 0 ? 0.0 : 1.0;
        for (int n : inputs[l]) {
            // fib(n) for the small n used here.
            std::uint64_t a = 0, b = 1;
            for (int i = 0; i < n; ++i) {
                std::uint64_t t = a + b;
                a = b;
                b = t;
            }
            level.cases.push_back({List{Value(n)}, Value(a), 0.05});
        }
        p.levels.push_back(level);
    }
    p.time_limit = 0.1;

    ProcessRunner runner(kFixture, quick(1.0));
    HarnessConfig cfg;
    cfg.repeats = 2;
    CodeSample fast{"fib", 0, "fib cost=const scale=0.000001", Value()};
    auto e = evaluate_sample(p, fast, cfg, runner);
    EXPECT_TRUE(e.correct);
    EXPECT_GT(e.efficiency_score, 0.9);

    CodeSample expo{"fib", 1, "fib cost=exp scale=0.0000001", Value()};
    auto slow = evaluate_sample(p, expo, cfg, runner);
    EXPECT_TRUE(slow.correct);
    EXPECT_GT(slow.level_scores[0], 0.0);
    EXPECT_EQ(slow.level_scores[1], 0.0);
    EXPECT_TRUE(slow.levels[2].timed_out());

    CodeSample loop{"fib", 2, "loop_forever", Value()};
    auto looped = evaluate_sample(p, loop, cfg, runner);
    EXPECT_FALSE(looped.correct);
    EXPECT_EQ(looped.failure_reason, FailureReason::level0_fail);
    EXPECT_EQ(looped.efficiency_score, 0.0);
}
