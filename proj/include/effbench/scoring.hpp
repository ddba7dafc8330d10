#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "effbench/timing.hpp"
#include "effbench/value.hpp"

namespace effbench {

// What happened to one sample on one level.
struct LevelOutcome {
    int level_index = 0;
    // Per-case time after reducing the repeats; empty when not executed.
    std::vector<CensoredTime> case_times;
    bool outputs_correct = true;
    bool executed = false;

    bool timed_out() const;
};

enum class FailureReason { none, wrong_output, level0_fail, runtime_error };

std::string_view to_string(FailureReason reason);
FailureReason failure_reason_from_string(std::string_view text);

struct SampleEvaluation {
    std::string problem_id;
    int sample_index = 0;
    bool correct = false;
    std::vector<double> level_scores;  // f_1..f_L
    double efficiency_score = 0.0;
    FailureReason failure_reason = FailureReason::none;
    // Classic censoring-blind speedup, kept for comparison only.
    double speedup = 0.0;
    std::vector<LevelOutcome> levels;  // 0..L, skipped levels have executed=false
    std::string diagnostics;

    Value to_value() const;
    static SampleEvaluation from_value(const Value& v);
};

enum class Progression { proceed, stop_timeout, stop_incorrect };

std::string_view to_string(Progression p);

// Largest case time of a level; censored if any case was censored.
CensoredTime worst_time(std::span<const CensoredTime> case_times);

// (T - t)^+ / (T - t*), and exactly 0 for a censored time. May exceed 1 when
// the candidate beats the reference. Throws ParameterError unless
// worst_reference_time < time_limit.
double level_score(CensoredTime worst_case_time, double worst_reference_time, double time_limit);

// Decides whether evaluation moves on to the next level. `outcomes` are the
// executed levels in ascending order starting at 0. A timeout on level 0
// counts as incorrect. Throws ParameterError when out of order.
Progression level_progression(std::span<const LevelOutcome> outcomes);

// Hardness-weighted mean of f_1..f_L when correct, otherwise 0.
// Throws ParameterError on mismatched lengths or non-positive weights.
double sample_score(std::span<const double> level_scores, std::span<const double> hardness, bool correct);

}  // namespace effbench
