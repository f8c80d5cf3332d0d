#include <presched/bench/algorithms.hpp>

#include <presched/baselines/baselines.hpp>
#include <presched/core/error.hpp>
#include <presched/core/metrics.hpp>
#include <presched/pmlf/pmlf.hpp>

#include <chrono>

namespace presched {

const std::vector<std::string>& algorithm_names() {
    static const std::vector<std::string> names{"pmlf",   "pmlf-adapted", "snap",     "snap-greedy", "snap-2stage",
                                                "hybrid:C", "blind",      "doubling", "rr"};
    return names;
}

std::unique_ptr<Policy> make_policy(const std::string& name, const AlgoParams& params, std::size_t machines) {
    SnapParams snap{params.delta, params.beta, params.mode, params.tol};
    if (name == "pmlf") {
        return machines > 1 ? pmlf_identical_policy(params.delta, machines) : pmlf_policy(params.delta);
    }
    if (name == "pmlf-adapted") {
        return pmlf_adapted_policy(params.delta, params.g, params.gamma);
    }
    if (name == "snap") {
        return snap_policy(snap);
    }
    if (name == "snap-greedy") {
        snap.mode = SnapMode::GreedyStep4;
        return snap_policy(snap);
    }
    if (name == "snap-2stage") {
        return snap_two_stage_policy(snap, params.g, params.epsilon);
    }
    if (name.rfind("hybrid:", 0) == 0) {
        double c = 0.0;
        try {
            std::size_t used = 0;
            c = std::stod(name.substr(7), &used);
            if (used != name.size() - 7) {
                throw std::invalid_argument(name);
            }
        } catch (const std::exception&) {
            throw SchedError(Errc::InvalidParameter, "cannot read the constant in \"" + name + "\"");
        }
        return hybrid_snap_policy(c, snap, params.milestones);
    }
    if (name == "blind") {
        return blind_policy();
    }
    if (name == "doubling") {
        return doubling_policy(params.growth);
    }
    if (name == "rr") {
        return round_robin_policy(params.quantum);
    }
    throw SchedError(Errc::InvalidParameter, "unknown algorithm \"" + name + "\"");
}

RunOutcome run_algorithm(const Instance& instance, const std::string& name, const AlgoParams& params,
                         std::optional<double> opt) {
    auto policy = make_policy(name, params, instance.machine_count());
    RunOutcome out;
    const auto t0 = std::chrono::steady_clock::now();
    out.result = run_simulation(instance, *policy);
    const auto t1 = std::chrono::steady_clock::now();
    out.runtime_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    out.metrics = compute_metrics(instance, out.result.trace, opt, &out.result.stats);
    if (!out.result.stats.epochs.empty()) {
        annotate_epoch_preemptions(out.result.stats.epochs, preemption_times(out.result.trace));
    }
    return out;
}

} // namespace presched
