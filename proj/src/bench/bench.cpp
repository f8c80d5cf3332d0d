#include <presched/bench/bench.hpp>

#include <presched/core/error.hpp>
#include <presched/optimum/optimum.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

namespace presched {

std::uint64_t prediction_seed(std::uint64_t instance_seed) {
    // splitmix64 finalizer
    std::uint64_t z = instance_seed + 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double prediction_from_xi(double p, double xi) { return std::max(1.0, std::ceil(p / xi)); }

std::vector<double> gen_predictions(const Instance& instance, double R, std::uint64_t seed) {
    if (!(R >= 1.0) || !std::isfinite(R)) {
        throw SchedError(Errc::InvalidParameter, "R must be at least 1");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> out;
    out.reserve(instance.job_count());
    for (const Job& job : instance.jobs()) {
        const double xi = 1.0 + (R - 1.0) * unit(rng);
        out.push_back(prediction_from_xi(job.p, xi));
    }
    return out;
}

Instance gen_instance(const GenConfig& cfg) {
    if (cfg.m == 0 || cfg.n == 0) {
        throw SchedError(Errc::InvalidConfig, "m and n must be positive");
    }
    if (!(cfg.special_job_frac >= 0.0 && cfg.special_job_frac <= 1.0)) {
        throw SchedError(Errc::InvalidConfig, "special_job_frac must lie in [0, 1]");
    }
    if (cfg.special_machine_count > cfg.m) {
        throw SchedError(Errc::InvalidConfig, "special_machine_count exceeds m");
    }
    if (cfg.regular_min < 1 || cfg.regular_max < cfg.regular_min || cfg.special_min < 1 ||
        cfg.special_max < cfg.special_min) {
        throw SchedError(Errc::InvalidConfig, "size ranges must be positive and ordered");
    }
    const auto specials = static_cast<std::size_t>(std::floor(cfg.special_job_frac * static_cast<double>(cfg.n) + 1e-9));
    if (specials > 0 && cfg.special_machine_count == 0) {
        throw SchedError(Errc::InvalidConfig, "special jobs need at least one special machine");
    }

    std::mt19937_64 rng(cfg.seed);
    std::vector<std::size_t> order(cfg.n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<bool> special(cfg.n, false);
    for (std::size_t k = 0; k < specials; ++k) {
        special[order[k]] = true;
    }

    std::uniform_int_distribution<int> regular(cfg.regular_min, cfg.regular_max);
    std::uniform_int_distribution<int> big(cfg.special_min, cfg.special_max);
    std::vector<std::size_t> machines(cfg.m);
    std::iota(machines.begin(), machines.end(), std::size_t{0});
    Matrix rates(cfg.m, cfg.n, 1.0);
    std::vector<Job> jobs(cfg.n);
    for (std::size_t j = 0; j < cfg.n; ++j) {
        jobs[j].id = static_cast<std::int64_t>(j);
        if (!special[j]) {
            jobs[j].p = regular(rng);
            continue;
        }
        jobs[j].p = big(rng);
        for (std::size_t i = 0; i < cfg.m; ++i) {
            rates(i, j) = 0.0;
        }
        if (cfg.per_job_special_machines) {
            std::shuffle(machines.begin(), machines.end(), rng);
            for (std::size_t k = 0; k < cfg.special_machine_count; ++k) {
                rates(machines[k], j) = 1.0;
            }
        } else {
            for (std::size_t i = 0; i < cfg.special_machine_count; ++i) {
                rates(i, j) = 1.0;
            }
        }
    }
    for (Job& job : jobs) {
        job.p_hat = job.p;
    }
    const Environment env = specials == 0 ? (cfg.m == 1 ? Environment::Single : Environment::Identical)
                                          : Environment::Unrelated;
    Instance instance(std::move(jobs), std::move(rates), env);
    return instance.with_predictions(gen_predictions(instance, cfg.R, prediction_seed(cfg.seed)));
}

std::string to_string(SweepAxis axis) {
    switch (axis) {
    case SweepAxis::R: return "R";
    case SweepAxis::Beta: return "beta";
    case SweepAxis::Delta: return "delta";
    case SweepAxis::SpecialFrac: return "special_frac";
    case SweepAxis::HybridC: return "hybrid_c";
    }
    return "R";
}

SweepAxis parse_axis(const std::string& name) {
    for (SweepAxis a : {SweepAxis::R, SweepAxis::Beta, SweepAxis::Delta, SweepAxis::SpecialFrac, SweepAxis::HybridC}) {
        if (to_string(a) == name) {
            return a;
        }
    }
    throw SchedError(Errc::InvalidConfig, "unknown sweep axis \"" + name + "\"");
}

SweepConfig sweep_from_json(const Json& doc) {
    SweepConfig cfg;
    try {
        cfg.axis = parse_axis(doc.value("axis", std::string("R")));
        cfg.values = doc.at("values").get<std::vector<double>>();
        cfg.algorithms = doc.at("algorithms").get<std::vector<std::string>>();
        cfg.trials = doc.value("trials", std::size_t{1});
        cfg.timing = doc.value("timing", true);
        cfg.base.seed = doc.value("seed", std::uint64_t{0});
        if (doc.contains("base")) {
            const Json& b = doc.at("base");
            cfg.base.m = b.value("m", cfg.base.m);
            cfg.base.n = b.value("n", cfg.base.n);
            cfg.base.special_job_frac = b.value("special_job_frac", cfg.base.special_job_frac);
            cfg.base.special_machine_count = b.value("special_machine_count", cfg.base.special_machine_count);
            cfg.base.regular_min = b.value("regular_min", cfg.base.regular_min);
            cfg.base.regular_max = b.value("regular_max", cfg.base.regular_max);
            cfg.base.special_min = b.value("special_min", cfg.base.special_min);
            cfg.base.special_max = b.value("special_max", cfg.base.special_max);
            cfg.base.R = b.value("R", cfg.base.R);
            cfg.base.per_job_special_machines = b.value("per_job_special_machines", false);
        }
        if (doc.contains("params")) {
            const Json& p = doc.at("params");
            cfg.params.delta = p.value("delta", cfg.params.delta);
            cfg.params.beta = p.value("beta", cfg.params.beta);
            cfg.params.g = p.value("g", cfg.params.g);
            cfg.params.epsilon = p.value("epsilon", cfg.params.epsilon);
            cfg.params.gamma = p.value("gamma", cfg.params.gamma);
            cfg.params.quantum = p.value("quantum", cfg.params.quantum);
            cfg.params.milestones = p.value("milestones", cfg.params.milestones);
            cfg.params.tol = p.value("tol", cfg.params.tol);
            cfg.hybrid_c = p.value("c", cfg.hybrid_c);
        }
    } catch (const nlohmann::json::exception& e) {
        throw SchedError(Errc::InvalidConfig, e.what());
    }
    if (cfg.values.empty()) {
        throw SchedError(Errc::InvalidConfig, "sweep needs at least one axis value");
    }
    if (cfg.algorithms.empty()) {
        throw SchedError(Errc::InvalidConfig, "sweep needs at least one algorithm");
    }
    if (cfg.trials == 0) {
        throw SchedError(Errc::InvalidConfig, "trials must be at least 1");
    }
    return cfg;
}

namespace {

struct Cell {
    GenConfig gen;
    AlgoParams params;
    std::string algorithm;
};

// Applies the axis value to the generator, parameters and algorithm name.
Cell configure(const SweepConfig& cfg, double value, const std::string& algorithm, std::size_t trial) {
    Cell cell{cfg.base, cfg.params, algorithm};
    cell.gen.seed = cfg.base.seed + trial;
    double c = cfg.hybrid_c;
    switch (cfg.axis) {
    case SweepAxis::R: cell.gen.R = value; break;
    case SweepAxis::Beta: cell.params.beta = value; break;
    case SweepAxis::Delta: cell.params.delta = value; break;
    case SweepAxis::SpecialFrac: cell.gen.special_job_frac = value; break;
    case SweepAxis::HybridC: c = value; break;
    }
    if (algorithm == "hybrid" || (cfg.axis == SweepAxis::HybridC && algorithm.rfind("hybrid", 0) == 0)) {
        std::ostringstream name;
        name << "hybrid:" << c;
        cell.algorithm = name.str();
    }
    return cell;
}

std::string format_number(double v) {
    std::ostringstream out;
    out << std::setprecision(12) << v;
    return out.str();
}

} // namespace

std::vector<ResultRow> run_sweep(const SweepConfig& cfg, std::size_t threads) {
    const std::size_t algos = cfg.algorithms.size();
    std::vector<ResultRow> rows(cfg.values.size() * algos * cfg.trials);
    // One task per (axis value, trial): the optimum is shared by its algorithms.
    const std::size_t tasks = cfg.values.size() * cfg.trials;
    std::atomic<std::size_t> next{0};
    std::mutex log_mutex;

    auto work = [&] {
        for (;;) {
            const std::size_t task = next.fetch_add(1);
            if (task >= tasks) {
                return;
            }
            const std::size_t v = task / cfg.trials;
            const std::size_t trial = task % cfg.trials;
            std::optional<Instance> instance;
            std::optional<double> opt;
            std::string setup_error;
            try {
                const Cell base = configure(cfg, cfg.values[v], cfg.algorithms.front(), trial);
                instance = gen_instance(base.gen);
                opt = opt_unrelated_matching(*instance);
            } catch (const std::exception& e) {
                setup_error = e.what();
            }
            for (std::size_t a = 0; a < algos; ++a) {
                const Cell cell = configure(cfg, cfg.values[v], cfg.algorithms[a], trial);
                ResultRow& row = rows[(v * algos + a) * cfg.trials + trial];
                row.algorithm = cell.algorithm;
                row.axis = cfg.axis;
                row.axis_value = cfg.values[v];
                row.seed = cell.gen.seed;
                if (!instance) {
                    row.error = setup_error;
                    continue;
                }
                try {
                    const RunOutcome out = run_algorithm(*instance, cell.algorithm, cell.params, opt);
                    const double n = static_cast<double>(instance->job_count());
                    row.total = out.metrics.total_completion;
                    row.opt = *opt;
                    row.ratio = *out.metrics.ratio;
                    row.preempt_per_job = static_cast<double>(out.metrics.preemptions) / n;
                    row.migrate_per_job = static_cast<double>(out.metrics.migrations) / n;
                    row.queue_moves_per_job = static_cast<double>(out.metrics.queue_moves) / n;
                    row.d_bench = out.metrics.d_benchmark;
                    row.runtime_ms = cfg.timing ? out.runtime_ms : 0.0;
                } catch (const std::exception& e) {
                    row.error = e.what();
                    const std::lock_guard<std::mutex> lock(log_mutex);
                    std::cerr << "sweep: " << cell.algorithm << " seed " << cell.gen.seed << ": " << e.what() << '\n';
                }
            }
        }
    };

    const std::size_t workers = std::max<std::size_t>(1, std::min(threads, tasks));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < workers; ++t) {
            pool.emplace_back(work);
        }
        for (auto& th : pool) {
            th.join();
        }
    }
    return rows;
}

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
    out << kCsvHeader << '\n';
    for (const ResultRow& r : rows) {
        out << r.algorithm << ',' << to_string(r.axis) << ',' << format_number(r.axis_value) << ',' << r.seed << ',';
        if (r.error) {
            out << "nan,nan,nan,nan,nan,nan,nan,nan\n";
            continue;
        }
        out << format_number(r.total) << ',' << format_number(r.opt) << ',' << format_number(r.ratio) << ','
            << format_number(r.preempt_per_job) << ',' << format_number(r.migrate_per_job) << ','
            << format_number(r.queue_moves_per_job) << ',' << format_number(r.d_bench) << ','
            << format_number(r.runtime_ms) << '\n';
    }
}

} // namespace presched
