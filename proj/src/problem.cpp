#include "effbench/problem.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace effbench {

// ---------------------------------------------------------------- OutputChecker

Value OutputChecker::to_value() const {
    Map m;
    switch (mode) {
        case Mode::exact:
            m.emplace_back("mode", "exact");
            break;
        case Mode::float_tolerant:
            m.emplace_back("mode", "float_tolerant");
            m.emplace_back("epsilon", epsilon);
            break;
        case Mode::custom: {
            m.emplace_back("mode", "custom");
            List argv;
            for (const auto& a : command) argv.emplace_back(a);
            m.emplace_back("command", std::move(argv));
            break;
        }
    }
    return Value(std::move(m));
}

OutputChecker OutputChecker::from_value(const Value& v) {
    OutputChecker c;
    const std::string& mode = v.at("mode").as_string();
    if (mode == "exact") {
        c.mode = Mode::exact;
    } else if (mode == "float_tolerant") {
        c.mode = Mode::float_tolerant;
        if (const Value* eps = v.find("epsilon")) c.epsilon = eps->as_double();
    } else if (mode == "custom") {
        c.mode = Mode::custom;
        for (const auto& a : v.at("command").as_list()) c.command.push_back(a.as_string());
    } else {
        throw ParseError("unknown output_checker mode '" + mode + "'");
    }
    return c;
}

// ---------------------------------------------------------------- Problem

std::vector<double> Problem::hardness() const {
    std::vector<double> h;
    for (const auto& level : levels) {
        if (level.index >= 1) h.push_back(level.hardness);
    }
    return h;
}

double Problem::max_reference_time() const {
    double m = 0.0;
    for (const auto& level : levels) {
        for (const auto& c : level.cases) m = std::max(m, c.reference_time);
    }
    return m;
}

bool Problem::calibrated() const {
    if (levels.empty()) return false;
    for (const auto& level : levels) {
        for (const auto& c : level.cases) {
            if (!(c.reference_time > 0.0) || !c.expected_output) return false;
        }
    }
    return time_limit > max_reference_time();
}

// ---------------------------------------------------------------- validation

namespace {

bool is_identifier(const std::string& s) {
    if (s.empty()) return false;
    if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

std::string at_level(int index) { return "@level" + std::to_string(index); }

}  // namespace

std::vector<Violation> validate_problem(const Problem& problem) {
    std::vector<Violation> out;
    auto add = [&out](std::string code, std::string message) { out.push_back({std::move(code), std::move(message)}); };

    if (problem.id.empty()) add("empty_id", "problem id is empty");
    if (!is_identifier(problem.entry_point)) {
        add("bad_entry_point", "entry_point '" + problem.entry_point + "' is not a non-empty identifier");
    }
    if (!(problem.time_limit > 0.0)) add("time_limit_nonpositive", "time_limit must be positive");
    if (problem.checker.mode == OutputChecker::Mode::float_tolerant && !(problem.checker.epsilon > 0.0)) {
        add("checker_epsilon_nonpositive", "float_tolerant checker needs epsilon > 0");
    }
    if (problem.checker.mode == OutputChecker::Mode::custom && problem.checker.command.empty()) {
        add("checker_command_empty", "custom checker needs a command");
    }

    bool contiguous = true;
    for (std::size_t i = 0; i < problem.levels.size(); ++i) {
        if (problem.levels[i].index != static_cast<int>(i)) contiguous = false;
    }
    if (!contiguous) {
        std::string seen;
        for (const auto& l : problem.levels) seen += (seen.empty() ? "" : ",") + std::to_string(l.index);
        add("non_contiguous_levels", "non-contiguous levels: indices {" + seen + "} must be 0,1,...,L");
    }
    if (std::none_of(problem.levels.begin(), problem.levels.end(), [](const Level& l) { return l.index >= 1; })) {
        add("no_scored_level", "at least one level with index >= 1 is required");
    }

    for (const auto& level : problem.levels) {
        if (level.index < 0) add("negative_level" + at_level(level.index), "level index must be >= 0");
        if (level.index == 0 && level.hardness != 0.0) {
            add("level0_hardness_nonzero" + at_level(0), "level 0 hardness must be 0");
        }
        if (level.index >= 1 && !(level.hardness > 0.0)) {
            add("hardness_nonpositive" + at_level(level.index),
                "hardness of level " + std::to_string(level.index) + " must be positive");
        }
        if (level.cases.empty()) {
            add("empty_level" + at_level(level.index), "level " + std::to_string(level.index) + " has no cases");
        }
        for (std::size_t m = 0; m < level.cases.size(); ++m) {
            const auto& c = level.cases[m];
            std::string where = at_level(level.index) + ".case" + std::to_string(m);
            if (!c.input.is_list()) add("input_not_list" + where, "case input must be an argument list");
            if (!(c.reference_time >= 0.0)) add("reference_time_negative" + where, "reference_time must be >= 0");
            if (problem.time_limit > 0.0 && !(c.reference_time < problem.time_limit)) {
                add("reference_time_exceeds_limit" + where,
                    "reference_time " + std::to_string(c.reference_time) + " s of level " +
                        std::to_string(level.index) + " case " + std::to_string(m) + " is not below time_limit " +
                        std::to_string(problem.time_limit) + " s");
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------- encoding

namespace {

// Re-throws decoding errors with the path of the offending node.
template <typename F>
auto with_context(const std::string& where, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const ParseError& e) {
        throw ParseError(where + ": " + e.what());
    }
}

}  // namespace

Value problem_to_value(const Problem& problem) {
    Map p;
    p.emplace_back("id", problem.id);
    p.emplace_back("prompt", problem.prompt);
    p.emplace_back("entry_point", problem.entry_point);
    p.emplace_back("time_limit_s", problem.time_limit);
    p.emplace_back("output_checker", problem.checker.to_value());
    List levels;
    for (const auto& level : problem.levels) {
        Map l;
        l.emplace_back("index", level.index);
        l.emplace_back("hardness", level.hardness);
        List cases;
        for (const auto& c : level.cases) {
            Map cm;
            cm.emplace_back("input", c.input);
            if (c.expected_output) cm.emplace_back("expected_output", *c.expected_output);
            cm.emplace_back("reference_time_s", c.reference_time);
            cases.emplace_back(std::move(cm));
        }
        l.emplace_back("cases", std::move(cases));
        levels.emplace_back(std::move(l));
    }
    p.emplace_back("levels", std::move(levels));
    return Value(std::move(p));
}

Problem problem_from_value(const Value& v) {
    Problem p;
    p.id = v.at("id").as_string();
    std::string where = "problem '" + p.id + "'";
    with_context(where, [&] {
        if (const Value* prompt = v.find("prompt")) p.prompt = prompt->as_string();
        p.entry_point = v.at("entry_point").as_string();
        p.time_limit = v.at("time_limit_s").as_double();
        if (const Value* checker = v.find("output_checker"); checker && !checker->is_null()) {
            p.checker = OutputChecker::from_value(*checker);
        }
        const auto& levels = v.at("levels").as_list();
        for (std::size_t li = 0; li < levels.size(); ++li) {
            with_context("levels[" + std::to_string(li) + "]", [&] {
                const Value& lv = levels[li];
                Level level;
                level.index = static_cast<int>(lv.at("index").as_int64());
                if (const Value* h = lv.find("hardness")) level.hardness = h->as_double();
                const auto& cases = lv.at("cases").as_list();
                for (std::size_t ci = 0; ci < cases.size(); ++ci) {
                    with_context("cases[" + std::to_string(ci) + "]", [&] {
                        const Value& cv = cases[ci];
                        TestCase c;
                        c.input = cv.at("input");
                        if (const Value* e = cv.find("expected_output")) c.expected_output = *e;
                        if (const Value* t = cv.find("reference_time_s")) c.reference_time = t->as_double();
                        level.cases.push_back(std::move(c));
                    });
                }
                p.levels.push_back(std::move(level));
            });
        }
    });
    return p;
}

ProblemSet parse_problemset_text(std::string_view text) {
    Value doc = parse_value(text);
    ProblemSet problems;
    const auto& list = with_context("problemset", [&]() -> const List& { return doc.at("problems").as_list(); });
    for (std::size_t i = 0; i < list.size(); ++i) {
        problems.push_back(with_context("problems[" + std::to_string(i) + "]", [&] { return problem_from_value(list[i]); }));
    }

    std::vector<Violation> all;
    std::set<std::string> ids;
    for (const auto& p : problems) {
        if (!ids.insert(p.id).second) all.push_back({"duplicate_problem_id", "problem id '" + p.id + "' appears twice"});
        for (auto& v : validate_problem(p)) {
            all.push_back({p.id + ":" + v.code, "problem '" + p.id + "': " + v.message});
        }
    }
    if (!all.empty()) throw ValidationError(std::move(all));

    std::sort(problems.begin(), problems.end(), [](const Problem& a, const Problem& b) { return a.id < b.id; });
    return problems;
}

ProblemSet parse_problemset(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read problemset '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_problemset_text(ss.str());
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

std::string serialize_problemset(const ProblemSet& problems) {
    List list;
    for (const auto& p : problems) list.push_back(problem_to_value(p));
    Map doc;
    doc.emplace_back("problems", std::move(list));
    DumpOptions opts;
    opts.indent = 2;
    opts.compact_keys = {"input", "expected_output", "output_checker"};
    return dump(Value(std::move(doc)), opts) + "\n";
}

void write_problemset(const std::filesystem::path& path, const ProblemSet& problems) {
    std::string text = serialize_problemset(problems);
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write '" + tmp.string() + "'");
        out << text;
        if (!out.flush()) throw Error("cannot write '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

// ---------------------------------------------------------------- generators

Problem import_generated_cases(const Problem& problem, const CommandSpec& generator, std::uint64_t seed,
                               double timeout_s) {
    CommandSpec cmd = generator;
    cmd.argv.push_back("--seed");
    cmd.argv.push_back(std::to_string(seed));

    CaptureResult run = run_capture(cmd, timeout_s);
    if (run.timed_out) {
        throw GeneratorError("generator '" + generator.to_string() + "' timed out after " + std::to_string(timeout_s) +
                             " s");
    }
    if (!run.status.success()) {
        throw GeneratorError("generator '" + generator.to_string() + "' failed (" + run.status.describe() +
                             "): " + run.err);
    }

    Problem out = problem;
    std::size_t emitted = 0;
    std::istringstream lines(run.out);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            Value rec = parse_value(line);
            std::int64_t level_index = rec.at("level").as_int64();
            TestCase c;
            c.input = rec.at("input");
            if (!c.input.is_list()) throw ParseError("input must be an argument list");
            if (const Value* e = rec.find("expected_output")) c.expected_output = *e;
            auto it = std::find_if(out.levels.begin(), out.levels.end(),
                                   [&](const Level& l) { return l.index == level_index; });
            if (it == out.levels.end()) {
                throw ParseError("level " + std::to_string(level_index) + " does not exist in problem '" +
                                 problem.id + "'");
            }
            it->cases.push_back(std::move(c));
            ++emitted;
        } catch (const ParseError& e) {
            throw GeneratorError("malformed generator record on line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (emitted == 0) throw GeneratorError("no cases emitted by generator '" + generator.to_string() + "'");
    return out;
}

}  // namespace effbench
