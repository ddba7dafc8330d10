#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "effbench/problem.hpp"
#include "effbench/process.hpp"
#include "effbench/scoring.hpp"
#include "effbench/timing.hpp"
#include "effbench/value.hpp"

namespace effbench {

// ---------------------------------------------------------------- protocol
//
// A job is written as one document to a file whose path is appended to the
// runner command line. The runner prints one record per line on stdout and
// exits 0 whenever it followed the protocol, even if the candidate failed.

struct RunnerCase {
    std::string case_id;
    Value input;  // argument list
};

struct RunnerJob {
    std::string job_id;
    std::string candidate_source;
    std::string entry_point;
    std::vector<RunnerCase> cases;
    double soft_limit = 0.0;  // seconds per case
    int repeats = 1;
    OutputChecker checker;
    std::optional<std::vector<Value>> expected_outputs;  // aligned with cases
    // Ask the runner to echo the entry point's return value in each record.
    bool capture_output = false;

    // Harness-side only, not sent: stop the worker after the first record
    // whose status is not ok.
    bool stop_on_failure = false;

    Value to_value() const;
    static RunnerJob from_value(const Value& v);
    // Throws ParameterError.
    void validate() const;
};

enum class RecordStatus { ok, wrong_output, timeout, runtime_error };

std::string_view to_string(RecordStatus s);
RecordStatus record_status_from_string(std::string_view text);

struct RunnerRecord {
    std::string case_id;
    RecordStatus status = RecordStatus::ok;
    std::vector<double> timings;  // seconds, at most `repeats` entries
    std::string diagnostics;
    std::optional<Value> output;  // present when the job asked for it

    Value to_value() const;
    static RunnerRecord from_value(const Value& v);
};

struct RunResult {
    std::vector<RunnerRecord> records;  // in case order
    bool hard_killed = false;           // worker exceeded its budget
    std::string diagnostics;            // worker stderr
};

// Executes jobs. Implementations must return records in case order and may
// omit trailing cases only when the job asked to stop on failure.
class Runner {
public:
    virtual ~Runner() = default;
    virtual RunResult run(const RunnerJob& job) = 0;
};

// Wall-clock budget of a worker: cases * repeats * soft_limit + margin.
double job_budget(const RunnerJob& job, double hard_kill_margin);

struct SupervisionOptions {
    double hard_kill_margin = 10.0;
    std::optional<std::uint64_t> memory_limit_bytes = 4ULL << 30;
    bool isolate_network = true;
    // Parent of the per-job scratch directories; empty uses the system temp.
    std::filesystem::path scratch_root;
};

// Runs one job in a fresh worker process and enforces its budget. A worker
// that outlives the budget is SIGKILLed with its process group, and every
// case it had not reported becomes a timeout censored at the soft limit.
// Throws ProtocolError on malformed output or a failing exit status, and
// HarnessError (naming the job) when the worker cannot be reaped.
RunResult supervise_job(const CommandSpec& runner, const RunnerJob& job, const SupervisionOptions& options);

class ProcessRunner : public Runner {
public:
    ProcessRunner(CommandSpec runner, SupervisionOptions options)
        : runner_(std::move(runner)), options_(std::move(options)) {}

    RunResult run(const RunnerJob& job) override { return supervise_job(runner_, job, options_); }

private:
    CommandSpec runner_;
    SupervisionOptions options_;
};

// ---------------------------------------------------------------- evaluation

// Case id used in jobs, e.g. "L2C3".
std::string case_id(int level, std::size_t case_index);

// Runs level 0, then levels 1..L while the progression rule allows, one
// worker per level. Per-case time is the Hodges-Lehmann estimate over the
// repeats, rescaled by `calibration_ratio` (stored / fresh reference time);
// any time that lands at or above the limit is recorded as censored.
// Throws DataError on an uncalibrated problem and ConfigError on a bad
// config; runner protocol failures propagate.
SampleEvaluation evaluate_sample(const Problem& problem, const CodeSample& sample, const HarnessConfig& config,
                                 Runner& runner, double calibration_ratio = 1.0);

// Times the reference solution on every case, records its outputs as the
// expected outputs, and sets time_limit = timeout_factor * slowest case.
// Each reference run is capped at config.reference_ceiling. A second
// untimed pass checks that the outputs are deterministic.
// Throws AuthoringError when the reference times out, fails, or disagrees
// with itself.
Problem measure_reference(const Problem& problem, const std::string& reference_source, const HarnessConfig& config,
                          Runner& runner);

// Re-times the reference on the problem's slowest case and returns
// stored / fresh, the factor that maps this machine's timings back onto the
// stored reference scale.
double calibration_ratio(const Problem& problem, const std::string& reference_source, const HarnessConfig& config,
                         Runner& runner);

}  // namespace effbench
