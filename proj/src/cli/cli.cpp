#include <presched/cli/cli.hpp>

#include <presched/bench/algorithms.hpp>
#include <presched/bench/bench.hpp>
#include <presched/core/error.hpp>
#include <presched/core/io.hpp>
#include <presched/core/validate.hpp>
#include <presched/optimum/optimum.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

namespace presched {

namespace {

struct GenArgs {
    GenConfig cfg;
    std::string out;
};

struct RunArgs {
    std::string algo;
    std::string instance;
    std::string trace_out;
    std::string epochs_out;
    AlgoParams params;
};

struct SweepArgs {
    std::string config;
    std::string out;
    std::size_t jobs = 1;
    std::optional<std::uint64_t> seed;
};

struct OptArgs {
    std::string instance;
};

struct ValidateArgs {
    std::string instance;
    std::string trace;
};

bool usage_error(Errc code) {
    return code == Errc::InvalidParameter || code == Errc::InvalidConfig || code == Errc::WrongEnvironment;
}

void emit(std::ostream& out, const Json& doc) { out << doc.dump(2) << '\n'; }

void write_text(const std::string& path, const std::string& text) {
    std::ofstream file(path);
    if (!file) {
        throw SchedError(Errc::ParseError, "cannot write " + path);
    }
    file << text;
}

// PRESCHED_SEED wins over --seed.
std::optional<std::uint64_t> seed_override(std::ostream& err) {
    const char* env = std::getenv("PRESCHED_SEED");
    if (env == nullptr || *env == '\0') {
        return std::nullopt;
    }
    try {
        std::size_t used = 0;
        const auto value = std::stoull(env, &used);
        if (used != std::string(env).size()) {
            throw std::invalid_argument(env);
        }
        err << "using seed " << value << " from PRESCHED_SEED\n";
        return value;
    } catch (const std::exception&) {
        throw SchedError(Errc::InvalidParameter, std::string("PRESCHED_SEED is not an unsigned integer: ") + env);
    }
}

// Exact optimum with a certificate where one of the exact methods applies.
std::optional<OptSolution> exact_optimum(const Instance& instance) {
    if (!instance.all_released_at_zero()) {
        return std::nullopt;
    }
    if (instance.machine_count() == 1) {
        return solve_opt_single_machine(instance);
    }
    for (const Job& job : instance.jobs()) {
        if (job.w != 1.0) {
            return std::nullopt;
        }
    }
    return solve_opt_unrelated(instance);
}

int do_gen(const GenArgs& args, std::ostream& out, std::ostream& err) {
    GenConfig cfg = args.cfg;
    if (auto s = seed_override(err)) {
        cfg.seed = *s;
    }
    const Json doc = instance_to_json(gen_instance(cfg));
    if (args.out.empty()) {
        emit(out, doc);
    } else {
        write_json_file(args.out, doc);
        err << "wrote " << args.out << '\n';
    }
    return kExitOk;
}

int do_run(const RunArgs& args, std::ostream& out, std::ostream& err) {
    const Instance instance = instance_from_json(read_json_file(args.instance));
    std::optional<double> opt;
    if (auto sol = exact_optimum(instance)) {
        opt = sol->value;
    }
    const RunOutcome run = run_algorithm(instance, args.algo, args.params, opt);
    Json doc = metrics_to_json(instance, run.metrics);
    doc["algorithm"] = args.algo;
    doc["opt"] = opt ? Json(*opt) : Json(nullptr);
    if (!args.trace_out.empty()) {
        write_json_file(args.trace_out, trace_to_json(instance, run.result.trace));
        err << "wrote " << args.trace_out << '\n';
    }
    if (!args.epochs_out.empty()) {
        std::ostringstream csv;
        write_epoch_csv(csv, run.result.stats.epochs);
        write_text(args.epochs_out, csv.str());
        err << "wrote " << args.epochs_out << '\n';
    }
    err << args.algo << ": " << run.runtime_ms << " ms\n";
    emit(out, doc);
    return kExitOk;
}

int do_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err) {
    SweepConfig cfg = sweep_from_json(read_json_file(args.config));
    if (args.seed) {
        cfg.base.seed = *args.seed;
    }
    if (auto s = seed_override(err)) {
        cfg.base.seed = *s;
    }
    const auto t0 = std::chrono::steady_clock::now();
    const auto rows = run_sweep(cfg, std::max<std::size_t>(args.jobs, 1));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::size_t failed = 0;
    for (const auto& row : rows) {
        if (row.error) {
            ++failed;
            err << "error: " << row.algorithm << " at " << row.axis_value << " seed " << row.seed << ": "
                << *row.error << '\n';
        }
    }
    std::ostringstream csv;
    write_csv(csv, rows);
    if (args.out.empty()) {
        out << csv.str();
    } else {
        write_text(args.out, csv.str());
    }
    err << rows.size() << " rows (" << failed << " failed) in " << secs << " s\n";
    return kExitOk;
}

int do_opt(const OptArgs& args, std::ostream& out, std::ostream&) {
    const Instance instance = instance_from_json(read_json_file(args.instance));
    if (auto sol = exact_optimum(instance)) {
        emit(out, Json{{"value", sol->value}, {"certificate", trace_to_json(instance, sol->certificate)}});
        return kExitOk;
    }
    // Small instances outside the exact methods: value only.
    emit(out, Json{{"value", brute_force_opt(instance)}, {"certificate", nullptr}});
    return kExitOk;
}

int do_validate(const ValidateArgs& args, std::ostream& out, std::ostream&) {
    const Instance instance = instance_from_json(read_json_file(args.instance));
    const Trace trace = trace_from_json(instance, read_json_file(args.trace));
    const ValidationReport report = validate_trace(instance, trace);
    emit(out, report_to_json(report));
    return report.ok() ? kExitOk : kExitInfeasible;
}

void add_algo_flags(CLI::App* cmd, AlgoParams& p) {
    cmd->add_option("--delta", p.delta, "Geometric base minus one")->capture_default_str();
    cmd->add_option("--beta", p.beta, "Exhaustion fraction per SNAP epoch")->capture_default_str();
    cmd->add_option("--g", p.g, "Overestimated job budget (pmlf-adapted, snap-2stage)")->capture_default_str();
    cmd->add_option("--epsilon", p.epsilon, "Reset threshold for snap-2stage")->capture_default_str();
    cmd->add_option("--gamma", p.gamma, "Reset threshold for pmlf-adapted")->capture_default_str();
    cmd->add_option("--quantum", p.quantum, "Round-robin quantum")->capture_default_str();
    cmd->add_option("--milestones", p.milestones, "Milestones before a hybrid job joins SNAP")
        ->capture_default_str();
    cmd->add_option("--tol", p.tol, "Proportional fairness solver tolerance")->capture_default_str();
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Non-clairvoyant scheduling with predictions: generate, simulate, optimize, sweep.", "presched"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Print help for every subcommand");

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen", "Generate a random instance (JSON)");
    gen_cmd->add_option("--m", gen.cfg.m, "Machines")->capture_default_str();
    gen_cmd->add_option("--n", gen.cfg.n, "Jobs")->capture_default_str();
    gen_cmd->add_option("--special-frac", gen.cfg.special_job_frac, "Fraction of special jobs")
        ->capture_default_str();
    gen_cmd->add_option("--special-machines", gen.cfg.special_machine_count, "Machines a special job may use")
        ->capture_default_str();
    gen_cmd->add_flag("--per-job-special", gen.cfg.per_job_special_machines,
                      "Draw the special machines per job instead of sharing them");
    gen_cmd->add_option("--R", gen.cfg.R, "Prediction error parameter (>= 1)")->capture_default_str();
    gen_cmd->add_option("--seed", gen.cfg.seed, "Random seed; PRESCHED_SEED overrides it")->capture_default_str();
    gen_cmd->add_option("--out", gen.out, "Output file (default: standard output)");

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Simulate one algorithm and print metrics (JSON)");
    run_cmd->add_option("--algo", run.algo, "pmlf, pmlf-adapted, snap, snap-greedy, snap-2stage, hybrid:C, blind, doubling, rr")
        ->required();
    run_cmd->add_option("--instance", run.instance, "Instance JSON file")->required();
    add_algo_flags(run_cmd, run.params);
    run_cmd->add_option("--trace-out", run.trace_out, "Write the schedule trace (JSON)");
    run_cmd->add_option("--epochs-out", run.epochs_out, "Write the SNAP epoch log (CSV)");

    SweepArgs sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a parameter sweep and write CSV");
    sweep_cmd->add_option("--config", sweep.config, "Sweep configuration JSON file")->required();
    sweep_cmd->add_option("--out", sweep.out, "Output CSV file (default: standard output)");
    sweep_cmd->add_option("--jobs", sweep.jobs, "Worker threads")->capture_default_str();
    sweep_cmd->add_option("--seed", sweep.seed, "Base seed, replacing the config's; PRESCHED_SEED overrides it");

    OptArgs opt;
    auto* opt_cmd = app.add_subcommand("opt", "Print the optimum total completion time and a certificate (JSON)");
    opt_cmd->add_option("--instance", opt.instance, "Instance JSON file")->required();

    ValidateArgs val;
    auto* val_cmd = app.add_subcommand("validate", "Check a trace against an instance (JSON report)");
    val_cmd->add_option("--instance", val.instance, "Instance JSON file")->required();
    val_cmd->add_option("--trace", val.trace, "Trace JSON file")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        // A subcommand's --help lands here too.
        if (e.get_exit_code() == 0) {
            for (const auto* sub : app.get_subcommands()) {
                out << sub->help();
            }
            return kExitOk;
        }
        err << "error: " << e.what() << "\n\n";
        const auto subs = app.get_subcommands();
        err << (subs.empty() ? app.help() : subs.front()->help());
        return kExitUsage;
    }

    try {
        if (gen_cmd->parsed()) {
            return do_gen(gen, out, err);
        }
        if (run_cmd->parsed()) {
            return do_run(run, out, err);
        }
        if (sweep_cmd->parsed()) {
            return do_sweep(sweep, out, err);
        }
        if (opt_cmd->parsed()) {
            return do_opt(opt, out, err);
        }
        return do_validate(val, out, err);
    } catch (const SchedError& e) {
        emit(out, Json{{"error", {{"kind", std::string(to_string(e.code()))}, {"message", e.what()}}}});
        err << "error: " << e.what() << '\n';
        return usage_error(e.code()) ? kExitUsage : kExitInfeasible;
    }
}

} // namespace presched
