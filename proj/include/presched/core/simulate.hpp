#pragma once

#include <presched/core/policy.hpp>
#include <presched/core/types.hpp>

#include <cstddef>
#include <vector>

namespace presched {

struct DecisionRecord {
    double time = 0.0;
    std::vector<JobIndex> run;

    friend bool operator==(const DecisionRecord&, const DecisionRecord&) = default;
};

struct SimOptions {
    bool record_decisions = false;
    std::size_t max_steps = 20'000'000;
};

struct SimulationResult {
    Trace trace;
    PolicyStats stats;
    std::vector<DecisionRecord> decisions;
};

/// Runs `policy` on `instance` until every job completes.
///
/// The driver interrupts the current assignment at the earliest of a hidden
/// completion, a registered threshold, the policy's timer, or a release.
/// Events sharing a timestamp are delivered as completions, releases,
/// thresholds, then timers, each kind in ascending job index.
///
/// Throws SchedError with PolicyAssignedUnknownJob when a decision names a
/// job that is not alive, runs a job on two machines, or uses a zero rate,
/// and with NonterminatingPolicy when alive jobs remain but nothing can
/// happen anymore (or the step budget is exhausted).
SimulationResult run_simulation(const Instance& instance, Policy& policy, const SimOptions& options = {});

/// Convenience wrapper returning only the trace.
Trace simulate(const Instance& instance, Policy& policy);

} // namespace presched
