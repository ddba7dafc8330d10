// effbench command-line driver.

#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "effbench/cli.hpp"

using namespace effbench;

namespace {

struct CommonFlags {
    std::string runner;
    double alpha = 2.0;
    int repeats = 6;
    std::string hardness;
    double hard_kill_margin = 10.0;
    double reference_ceiling = 60.0;
    std::uint64_t memory_limit_mb = 4096;
    bool no_network_isolation = false;
    std::vector<std::string> references;
    std::string reference_dir;
};

void add_runner_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--runner", f.runner, "Runner command; the job file path is appended (default: $EFFBENCH_RUNNER)");
    cmd->add_option("--repeats", f.repeats, "Timed repeats per test case")->capture_default_str();
    cmd->add_option("--hard-kill-margin", f.hard_kill_margin, "Seconds added to each worker's budget")
        ->capture_default_str();
    cmd->add_option("--memory-limit-mb", f.memory_limit_mb, "Address-space ceiling of a worker")->capture_default_str();
    cmd->add_flag("--no-network-isolation", f.no_network_isolation, "Do not try to unshare the network namespace");
    cmd->add_option("--reference", f.references, "Reference solution as ID=PATH (repeatable)");
    cmd->add_option("--reference-dir", f.reference_dir, "Directory with one reference file per problem id (by stem)");
}

HarnessConfig make_config(const CommonFlags& f) {
    HarnessConfig c;
    c.timeout_factor = f.alpha;
    c.repeats = f.repeats;
    if (!f.hardness.empty()) c.hardness_weights = cli::parse_double_list(f.hardness);
    c.hard_kill_margin = f.hard_kill_margin;
    c.reference_ceiling = f.reference_ceiling;
    c.memory_limit_bytes = f.memory_limit_mb << 20;
    return c;
}

cli::ReferenceSources make_references(const CommonFlags& f) {
    cli::ReferenceSources refs;
    for (const auto& item : f.references) {
        auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) throw ConfigError("--reference expects ID=PATH, got '" + item + "'");
        refs.explicit_paths[item.substr(0, eq)] = item.substr(eq + 1);
    }
    refs.directory = f.reference_dir;
    return refs;
}

cli::RunnerFactory make_runner(const CommonFlags& f, const HarnessConfig& config) {
    std::string text = f.runner;
    if (text.empty()) {
        if (const char* env = std::getenv("EFFBENCH_RUNNER")) text = env;
    }
    if (text.empty()) throw ConfigError("no runner command: pass --runner or set EFFBENCH_RUNNER");
    CommandSpec cmd = CommandSpec::parse(text);
    SupervisionOptions sup;
    sup.hard_kill_margin = config.hard_kill_margin;
    sup.memory_limit_bytes = config.memory_limit_bytes;
    sup.isolate_network = !f.no_network_isolation;
    return [cmd, sup] { return std::make_unique<ProcessRunner>(cmd, sup); };
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"effbench: efficiency evaluation of generated code with eff@k"};
    app.require_subcommand(1);

    CommonFlags cal_flags;
    std::string cal_problemset, cal_out;
    auto* cal = app.add_subcommand("calibrate", "Time reference solutions and fill in reference times and time limits");
    cal->add_option("--problemset", cal_problemset, "Problemset manifest")->required();
    cal->add_option("--out", cal_out, "Calibrated manifest to write")->required();
    cal->add_option("--alpha", cal_flags.alpha, "Timeout factor (time limit = alpha * slowest reference)")
        ->capture_default_str();
    cal->add_option("--reference-ceiling", cal_flags.reference_ceiling, "Per-case limit for reference runs (s)")
        ->capture_default_str();
    add_runner_flags(cal, cal_flags);

    CommonFlags ev_flags;
    std::string ev_problemset, ev_samples, ev_out;
    int ev_parallel = 1;
    auto* ev = app.add_subcommand("evaluate", "Evaluate code samples against a calibrated problemset");
    ev->add_option("--problemset", ev_problemset, "Calibrated problemset manifest")->required();
    ev->add_option("--samples", ev_samples, "Directory of <problem_id>/<sample_index> files")->required();
    ev->add_option("--out", ev_out, "Results file (one record per line, appended)")->required();
    ev->add_option("--hardness", ev_flags.hardness, "Override level hardness, e.g. 3,3,4");
    ev->add_option("--parallel", ev_parallel, "Problems evaluated concurrently (degrades timing quality)")
        ->capture_default_str();
    add_runner_flags(ev, ev_flags);

    std::string sc_results, sc_out, sc_ks = "1,10,100";
    auto* sc = app.add_subcommand("score", "Compute eff@k, pass@k and speedup from a results file");
    sc->add_option("--results", sc_results, "Results file written by evaluate")->required();
    sc->add_option("--k", sc_ks, "Comma-separated k values")->capture_default_str();
    sc->add_option("--out", sc_out, "Write the report document here");

    std::uint64_t st_seed = 20240601;
    auto* st = app.add_subcommand("selftest", "Run the estimator's statistical property suites");
    st->add_option("--seed", st_seed, "Monte Carlo seed")->capture_default_str();

    std::string im_problemset, im_problem, im_generator, im_out;
    std::uint64_t im_seed = 0;
    auto* im = app.add_subcommand("import-cases", "Append generator-emitted cases to one problem");
    im->add_option("--problemset", im_problemset, "Problemset manifest")->required();
    im->add_option("--problem", im_problem, "Problem id")->required();
    im->add_option("--generator", im_generator, "Generator command; '--seed N' is appended")->required();
    im->add_option("--seed", im_seed, "Generator seed")->capture_default_str();
    im->add_option("--out", im_out, "Manifest to write")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? cli::kSuccess : cli::kConfigError;
    }

    try {
        if (*cal) {
            cli::CalibrateOptions o;
            o.problemset = cal_problemset;
            o.out = cal_out;
            o.config = make_config(cal_flags);
            o.config.validate();
            o.references = make_references(cal_flags);
            o.runner = make_runner(cal_flags, o.config);
            return cli::cmd_calibrate(o, std::cout, std::cerr);
        }
        if (*ev) {
            cli::EvaluateOptions o;
            o.problemset = ev_problemset;
            o.samples = ev_samples;
            o.out = ev_out;
            o.config = make_config(ev_flags);
            o.config.validate();
            o.references = make_references(ev_flags);
            o.runner = make_runner(ev_flags, o.config);
            o.parallel = ev_parallel;
            return cli::cmd_evaluate(o, std::cout, std::cerr);
        }
        if (*sc) {
            cli::ScoreOptions o;
            o.results = sc_results;
            o.ks = cli::parse_int_list(sc_ks);
            o.out = sc_out;
            return cli::cmd_score(o, std::cout, std::cerr);
        }
        if (*st) return cli::cmd_selftest(st_seed, std::cout, std::cerr);
        if (*im) {
            cli::ImportOptions o;
            o.problemset = im_problemset;
            o.problem_id = im_problem;
            o.generator = CommandSpec::parse(im_generator);
            o.seed = im_seed;
            o.out = im_out;
            return cli::cmd_import_cases(o, std::cout, std::cerr);
        }
    } catch (const std::exception& e) {
        return cli::report_error(e, std::cerr);
    }
    return cli::kConfigError;
}
