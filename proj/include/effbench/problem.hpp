#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "effbench/errors.hpp"
#include "effbench/process.hpp"
#include "effbench/value.hpp"

namespace effbench {

// How a runner decides whether a candidate's return value matches.
struct OutputChecker {
    enum class Mode { exact, float_tolerant, custom };

    Mode mode = Mode::float_tolerant;
    double epsilon = 1e-6;             // float_tolerant only
    std::vector<std::string> command;  // custom only

    Value to_value() const;
    static OutputChecker from_value(const Value& v);

    friend bool operator==(const OutputChecker&, const OutputChecker&) = default;
};

struct TestCase {
    Value input;  // argument list passed to the entry point
    // Filled in by calibration from the reference solution's output. Absent
    // (the field is omitted on disk) until then; a JSON null is a real value.
    std::optional<Value> expected_output;
    double reference_time = 0.0;  // seconds; 0 until calibrated
};

struct Level {
    int index = 0;
    double hardness = 0.0;  // always 0 on level 0, which only filters correctness
    std::vector<TestCase> cases;
};

struct Problem {
    std::string id;
    std::string prompt;
    std::string entry_point;
    std::vector<Level> levels;  // levels[i].index == i once validated
    double time_limit = 0.0;    // seconds
    OutputChecker checker;

    // Highest level index L.
    int max_level() const { return levels.empty() ? -1 : levels.back().index; }
    // Hardness weights of levels 1..L.
    std::vector<double> hardness() const;
    // max reference time over every case of every level.
    double max_reference_time() const;
    // Reference times positive and expected outputs present everywhere.
    bool calibrated() const;
};

using ProblemSet = std::vector<Problem>;

struct CodeSample {
    std::string problem_id;
    int sample_index = 0;
    std::string source;
    Value origin;  // free-form provenance (model, decoding mode, file path)
};

// Empty iff every invariant holds. Never throws.
std::vector<Violation> validate_problem(const Problem& problem);

Value problem_to_value(const Problem& problem);
// Structural decoding only; does not validate invariants.
Problem problem_from_value(const Value& v);

// Parses and validates a problemset document. Problems come back sorted by
// id. Throws ParseError on malformed text and ValidationError listing every
// violation across all problems.
ProblemSet parse_problemset_text(std::string_view text);
ProblemSet parse_problemset(const std::filesystem::path& path);

// Byte-stable: serialize(parse(serialize(x))) == serialize(x).
std::string serialize_problemset(const ProblemSet& problems);
void write_problemset(const std::filesystem::path& path, const ProblemSet& problems);

// Runs `generator --seed <seed>` and appends every emitted case to the level
// named in its record. One record per output line:
//   {"level": 1, "input": [...]}              (expected_output optional)
// Appended cases carry reference_time 0 until recalibrated.
Problem import_generated_cases(const Problem& problem, const CommandSpec& generator, std::uint64_t seed,
                               double timeout_s = 120.0);

}  // namespace effbench
