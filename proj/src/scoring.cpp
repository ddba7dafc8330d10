#include "effbench/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "effbench/errors.hpp"

namespace effbench {

bool LevelOutcome::timed_out() const {
    return std::any_of(case_times.begin(), case_times.end(), [](const CensoredTime& t) { return t.censored; });
}

std::string_view to_string(FailureReason reason) {
    switch (reason) {
        case FailureReason::none: return "none";
        case FailureReason::wrong_output: return "wrong_output";
        case FailureReason::level0_fail: return "level0_fail";
        case FailureReason::runtime_error: return "runtime_error";
    }
    return "none";
}

FailureReason failure_reason_from_string(std::string_view text) {
    if (text == "none") return FailureReason::none;
    if (text == "wrong_output") return FailureReason::wrong_output;
    if (text == "level0_fail") return FailureReason::level0_fail;
    if (text == "runtime_error") return FailureReason::runtime_error;
    throw ParseError("unknown failure_reason '" + std::string(text) + "'");
}

std::string_view to_string(Progression p) {
    switch (p) {
        case Progression::proceed: return "continue";
        case Progression::stop_timeout: return "stop_timeout";
        case Progression::stop_incorrect: return "stop_incorrect";
    }
    return "continue";
}

// ---------------------------------------------------------------- serialization

Value SampleEvaluation::to_value() const {
    Map m;
    m.emplace_back("problem_id", problem_id);
    m.emplace_back("sample_index", sample_index);
    m.emplace_back("correct", correct);
    m.emplace_back("failure_reason", std::string(to_string(failure_reason)));
    List scores;
    for (double f : level_scores) scores.emplace_back(f);
    m.emplace_back("level_scores", std::move(scores));
    m.emplace_back("efficiency_score", efficiency_score);
    m.emplace_back("speedup", speedup);
    List lv;
    for (const auto& l : levels) {
        Map lm;
        lm.emplace_back("index", l.level_index);
        lm.emplace_back("executed", l.executed);
        lm.emplace_back("outputs_correct", l.outputs_correct);
        List times;
        for (const auto& t : l.case_times) {
            Map tm;
            tm.emplace_back("value_s", t.value);
            tm.emplace_back("censored", t.censored);
            times.emplace_back(std::move(tm));
        }
        lm.emplace_back("case_times", std::move(times));
        lv.emplace_back(std::move(lm));
    }
    m.emplace_back("levels", std::move(lv));
    m.emplace_back("diagnostics", diagnostics);
    return Value(std::move(m));
}

SampleEvaluation SampleEvaluation::from_value(const Value& v) {
    SampleEvaluation e;
    e.problem_id = v.at("problem_id").as_string();
    e.sample_index = static_cast<int>(v.at("sample_index").as_int64());
    e.correct = v.at("correct").as_bool();
    e.failure_reason = failure_reason_from_string(v.at("failure_reason").as_string());
    for (const auto& f : v.at("level_scores").as_list()) e.level_scores.push_back(f.as_double());
    e.efficiency_score = v.at("efficiency_score").as_double();
    if (const Value* s = v.find("speedup")) e.speedup = s->as_double();
    if (const Value* lv = v.find("levels")) {
        for (const auto& l : lv->as_list()) {
            LevelOutcome o;
            o.level_index = static_cast<int>(l.at("index").as_int64());
            o.executed = l.at("executed").as_bool();
            o.outputs_correct = l.at("outputs_correct").as_bool();
            for (const auto& t : l.at("case_times").as_list()) {
                o.case_times.push_back({t.at("value_s").as_double(), t.at("censored").as_bool()});
            }
            e.levels.push_back(std::move(o));
        }
    }
    if (const Value* d = v.find("diagnostics")) e.diagnostics = d->as_string();
    return e;
}

// ---------------------------------------------------------------- scores

CensoredTime worst_time(std::span<const CensoredTime> case_times) {
    CensoredTime worst{};
    for (const auto& t : case_times) {
        if (t.censored && !worst.censored) {
            worst = t;
        } else if (t.censored == worst.censored && t.value > worst.value) {
            worst = t;
        }
    }
    return worst;
}

double level_score(CensoredTime worst_case_time, double worst_reference_time, double time_limit) {
    if (!(worst_reference_time < time_limit)) {
        throw ParameterError("reference time " + std::to_string(worst_reference_time) +
                             " s must be below the time limit " + std::to_string(time_limit) + " s");
    }
    if (worst_case_time.censored) return 0.0;
    return std::max(time_limit - worst_case_time.value, 0.0) / (time_limit - worst_reference_time);
}

Progression level_progression(std::span<const LevelOutcome> outcomes) {
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        if (outcomes[i].level_index != static_cast<int>(i)) {
            throw ParameterError("level outcomes out of order: position " + std::to_string(i) + " holds level " +
                                 std::to_string(outcomes[i].level_index));
        }
    }
    for (const auto& o : outcomes) {
        if (o.executed && !o.outputs_correct) return Progression::stop_incorrect;
    }
    if (outcomes.empty()) return Progression::proceed;
    const auto& latest = outcomes.back();
    if (latest.executed && latest.timed_out()) {
        return latest.level_index == 0 ? Progression::stop_incorrect : Progression::stop_timeout;
    }
    return Progression::proceed;
}

double sample_score(std::span<const double> level_scores, std::span<const double> hardness, bool correct) {
    if (level_scores.size() != hardness.size()) {
        throw ParameterError("sample_score: " + std::to_string(level_scores.size()) + " level scores but " +
                             std::to_string(hardness.size()) + " hardness weights");
    }
    for (double h : hardness) {
        if (!(h > 0.0)) throw ParameterError("sample_score: hardness weights must be positive");
    }
    if (!correct) return 0.0;
    double num = 0.0, den = 0.0;
    for (std::size_t l = 0; l < hardness.size(); ++l) {
        num += hardness[l] * level_scores[l];
        den += hardness[l];
    }
    return den > 0.0 ? num / den : 0.0;
}

}  // namespace effbench
