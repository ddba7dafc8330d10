#include <unistd.h>

#include <cmath>
#include <fstream>
#include <random>

#include "effbench/harness.hpp"

namespace effbench {

// ---------------------------------------------------------------- encoding

Value RunnerJob::to_value() const {
    Map m;
    m.emplace_back("job_id", job_id);
    m.emplace_back("candidate_source", candidate_source);
    m.emplace_back("entry_point", entry_point);
    List cl;
    for (const auto& c : cases) {
        Map cm;
        cm.emplace_back("case_id", c.case_id);
        cm.emplace_back("input", c.input);
        cl.emplace_back(std::move(cm));
    }
    m.emplace_back("cases", std::move(cl));
    m.emplace_back("soft_limit", soft_limit);
    m.emplace_back("repeats", repeats);
    m.emplace_back("checker", checker.to_value());
    if (expected_outputs) {
        m.emplace_back("expected_outputs", List(expected_outputs->begin(), expected_outputs->end()));
    } else {
        m.emplace_back("expected_outputs", Value());
    }
    m.emplace_back("capture_output", capture_output);
    return Value(std::move(m));
}

RunnerJob RunnerJob::from_value(const Value& v) {
    RunnerJob job;
    job.job_id = v.at("job_id").as_string();
    job.candidate_source = v.at("candidate_source").as_string();
    job.entry_point = v.at("entry_point").as_string();
    for (const auto& c : v.at("cases").as_list()) job.cases.push_back({c.at("case_id").as_string(), c.at("input")});
    job.soft_limit = v.at("soft_limit").as_double();
    job.repeats = static_cast<int>(v.at("repeats").as_int64());
    job.checker = OutputChecker::from_value(v.at("checker"));
    if (const Value* e = v.find("expected_outputs"); e && !e->is_null()) job.expected_outputs = e->as_list();
    if (const Value* c = v.find("capture_output")) job.capture_output = c->as_bool();
    return job;
}

void RunnerJob::validate() const {
    if (!(soft_limit > 0.0)) throw ParameterError("job " + job_id + ": soft_limit must be positive");
    if (repeats < 1) throw ParameterError("job " + job_id + ": repeats must be >= 1");
    if (cases.empty()) throw ParameterError("job " + job_id + ": no cases");
    if (expected_outputs && expected_outputs->size() != cases.size()) {
        throw ParameterError("job " + job_id + ": expected_outputs not aligned with cases");
    }
}

std::string_view to_string(RecordStatus s) {
    switch (s) {
        case RecordStatus::ok: return "ok";
        case RecordStatus::wrong_output: return "wrong_output";
        case RecordStatus::timeout: return "timeout";
        case RecordStatus::runtime_error: return "runtime_error";
    }
    return "ok";
}

RecordStatus record_status_from_string(std::string_view text) {
    if (text == "ok") return RecordStatus::ok;
    if (text == "wrong_output") return RecordStatus::wrong_output;
    if (text == "timeout") return RecordStatus::timeout;
    if (text == "runtime_error") return RecordStatus::runtime_error;
    throw ParseError("unknown record status '" + std::string(text) + "'");
}

Value RunnerRecord::to_value() const {
    Map m;
    m.emplace_back("case_id", case_id);
    m.emplace_back("status", std::string(to_string(status)));
    List t;
    for (double x : timings) t.emplace_back(x);
    m.emplace_back("timings", std::move(t));
    m.emplace_back("diagnostics", diagnostics);
    if (output) m.emplace_back("output", *output);
    return Value(std::move(m));
}

RunnerRecord RunnerRecord::from_value(const Value& v) {
    RunnerRecord r;
    r.case_id = v.at("case_id").as_string();
    r.status = record_status_from_string(v.at("status").as_string());
    for (const auto& t : v.at("timings").as_list()) {
        double x = t.as_double();
        if (!std::isfinite(x) || x < 0.0) throw ParseError("timing must be finite and >= 0");
        r.timings.push_back(x);
    }
    if (const Value* d = v.find("diagnostics"); d && !d->is_null()) r.diagnostics = d->as_string();
    if (const Value* o = v.find("output")) r.output = *o;
    return r;
}

// ---------------------------------------------------------------- supervision

double job_budget(const RunnerJob& job, double hard_kill_margin) {
    return static_cast<double>(job.cases.size()) * job.repeats * job.soft_limit + hard_kill_margin;
}

namespace {

class ScratchDir {
public:
    explicit ScratchDir(const std::filesystem::path& root) {
        auto base = root.empty() ? std::filesystem::temp_directory_path() : root;
        std::string tmpl = (base / "effbench-job-XXXXXX").string();
        if (::mkdtemp(tmpl.data()) == nullptr) throw HarnessError("cannot create scratch directory under " + base.string());
        path_ = tmpl;
    }
    ~ScratchDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    ScratchDir(const ScratchDir&) = delete;
    ScratchDir& operator=(const ScratchDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

// Brings a record in line with the job: timeout records end with exactly one
// timing equal to the soft limit, ok records carry all repeats.
void normalize_record(RunnerRecord& rec, const RunnerJob& job) {
    if (rec.timings.size() > static_cast<std::size_t>(job.repeats)) {
        throw ProtocolError("job " + job.job_id + ": case " + rec.case_id + " reported " +
                            std::to_string(rec.timings.size()) + " timings for " + std::to_string(job.repeats) +
                            " repeats");
    }
    if (rec.status == RecordStatus::ok && rec.timings.size() != static_cast<std::size_t>(job.repeats)) {
        throw ProtocolError("job " + job.job_id + ": ok record for case " + rec.case_id + " has " +
                            std::to_string(rec.timings.size()) + " timings, expected " + std::to_string(job.repeats));
    }
    if (rec.status == RecordStatus::timeout) {
        if (rec.timings.empty()) rec.timings.push_back(job.soft_limit);
        else rec.timings.back() = job.soft_limit;
    }
    if (job.capture_output && rec.status == RecordStatus::ok && !rec.output) {
        throw ProtocolError("job " + job.job_id + ": case " + rec.case_id + " is missing the requested output");
    }
}

}  // namespace

RunResult supervise_job(const CommandSpec& runner, const RunnerJob& job, const SupervisionOptions& options) {
    job.validate();
    ScratchDir scratch(options.scratch_root);
    auto job_file = scratch.path() / "job.json";
    {
        std::ofstream out(job_file, std::ios::binary);
        out << dump(job.to_value()) << '\n';
        if (!out.flush()) throw HarnessError("job " + job.job_id + ": cannot write job file");
    }

    CommandSpec cmd = runner;
    cmd.argv.push_back(job_file.string());
    SpawnOptions spawn;
    spawn.working_dir = scratch.path();
    spawn.memory_limit_bytes = options.memory_limit_bytes;
    spawn.isolate_network = options.isolate_network;

    using Clock = ChildProcess::Clock;
    const double budget = job_budget(job, options.hard_kill_margin);
    const auto deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(budget));

    auto child = ChildProcess::spawn(cmd, spawn);
    RunResult result;
    bool stopped = false;
    std::string line;
    while (result.records.size() < job.cases.size()) {
        auto st = child.read_line(line, deadline);
        if (st == ChildProcess::ReadStatus::deadline) {
            result.hard_killed = true;
            break;
        }
        if (st == ChildProcess::ReadStatus::eof) break;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

        RunnerRecord rec;
        try {
            rec = RunnerRecord::from_value(parse_value(line));
        } catch (const ParseError& e) {
            child.kill_group();
            child.wait_for(std::chrono::milliseconds(2000));
            throw ProtocolError("job " + job.job_id + ": malformed record: " + e.what());
        }
        const auto& want = job.cases[result.records.size()].case_id;
        if (rec.case_id != want) {
            child.kill_group();
            child.wait_for(std::chrono::milliseconds(2000));
            throw ProtocolError("job " + job.job_id + ": expected record for case " + want + ", got " + rec.case_id);
        }
        normalize_record(rec, job);
        bool failed = rec.status != RecordStatus::ok;
        result.records.push_back(std::move(rec));
        if (failed && job.stop_on_failure) {
            stopped = true;
            break;
        }
    }

    std::optional<ExitStatus> status;
    if (result.hard_killed || stopped) {
        child.kill_group();
        status = child.wait_for(std::chrono::milliseconds(5000));
        if (!status) {
            throw HarnessError("job " + job.job_id + ": worker " + std::to_string(child.pid()) +
                               " survived SIGKILL");
        }
    } else {
        // All records in (or stdout closed): the worker should exit promptly.
        auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
        status = child.wait_for(std::max(remaining, std::chrono::milliseconds(0)));
        if (!status) {
            result.hard_killed = true;
            child.kill_group();
            status = child.wait_for(std::chrono::milliseconds(5000));
            if (!status) {
                throw HarnessError("job " + job.job_id + ": worker " + std::to_string(child.pid()) +
                                   " survived SIGKILL");
            }
        }
    }
    result.diagnostics = child.stderr_text();

    if (result.hard_killed) {
        for (std::size_t i = result.records.size(); i < job.cases.size(); ++i) {
            RunnerRecord r;
            r.case_id = job.cases[i].case_id;
            r.status = RecordStatus::timeout;
            r.timings = {job.soft_limit};
            r.diagnostics = "worker killed after exceeding its " + std::to_string(budget) + " s budget";
            result.records.push_back(std::move(r));
        }
        return result;
    }
    if (stopped) return result;

    if (!status->success()) {
        throw ProtocolError("job " + job.job_id + ": runner failed (" + status->describe() + ")" +
                            (result.diagnostics.empty() ? "" : ": " + result.diagnostics));
    }
    if (result.records.size() != job.cases.size()) {
        throw ProtocolError("job " + job.job_id + ": runner exited after " + std::to_string(result.records.size()) +
                            " of " + std::to_string(job.cases.size()) + " records");
    }
    return result;
}

}  // namespace effbench
