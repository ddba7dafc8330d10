#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "effbench/harness.hpp"
#include "effbench/timing.hpp"

namespace effbench::cli {

enum ExitCode : int {
    kSuccess = 0,
    kRecordedIssues = 1,  // evaluation finished but some samples failed or were skipped
    kConfigError = 2,     // bad flags, manifest or data
    kFatal = 3,           // harness or runner breakdown
};

inline const std::vector<int> kDefaultKs{1, 10, 100};

using RunnerFactory = std::function<std::unique_ptr<Runner>()>;

// Where reference solutions live: explicit id=path pairs win over a
// directory searched for a file whose stem is the problem id.
struct ReferenceSources {
    std::map<std::string, std::filesystem::path> explicit_paths;
    std::filesystem::path directory;

    bool empty() const { return explicit_paths.empty() && directory.empty(); }
    std::optional<std::filesystem::path> find(const std::string& problem_id) const;
};

struct CalibrateOptions {
    std::filesystem::path problemset;
    std::filesystem::path out;
    ReferenceSources references;
    HarnessConfig config;
    RunnerFactory runner;
};

struct EvaluateOptions {
    std::filesystem::path problemset;
    std::filesystem::path samples;  // <samples>/<problem_id>/<sample_index>[.ext]
    std::filesystem::path out;      // one SampleEvaluation per line, appended
    HarnessConfig config;
    RunnerFactory runner;
    int parallel = 1;
    // Optional: re-time the reference once per problem to rescale timings.
    ReferenceSources references;
};

struct ScoreOptions {
    std::filesystem::path results;
    std::vector<int> ks = kDefaultKs;
    std::filesystem::path out;  // report document; empty skips writing
};

struct ImportOptions {
    std::filesystem::path problemset;
    std::string problem_id;
    CommandSpec generator;
    std::uint64_t seed = 0;
    std::filesystem::path out;
};

int cmd_calibrate(const CalibrateOptions& opts, std::ostream& out, std::ostream& err);
int cmd_evaluate(const EvaluateOptions& opts, std::ostream& out, std::ostream& err);
int cmd_score(const ScoreOptions& opts, std::ostream& out, std::ostream& err);
int cmd_selftest(std::uint64_t seed, std::ostream& out, std::ostream& err);
int cmd_import_cases(const ImportOptions& opts, std::ostream& out, std::ostream& err);

// Samples found under a samples directory, sorted by (problem, index).
// Unusable entries are reported through `warnings`.
std::vector<CodeSample> load_samples(const std::filesystem::path& dir, std::vector<std::string>& warnings);

// Completed evaluations in a results file. A trailing partial line left by
// an interrupted run is cut off the file.
std::vector<SampleEvaluation> load_results(const std::filesystem::path& path);

// "1,10,100" -> {1, 10, 100}; "3,3,4" -> {3.0, 3.0, 4.0}.
std::vector<int> parse_int_list(const std::string& text);
std::vector<double> parse_double_list(const std::string& text);

// Maps a caught exception onto an exit code and prints it.
int report_error(const std::exception& e, std::ostream& err);

}  // namespace effbench::cli
