#pragma once

#include <presched/core/policy.hpp>

#include <memory>
#include <vector>

namespace presched {

struct QueueEntry {
    JobIndex job = kNoJob;
    double size = 0.0; ///< predicted remaining work
    double time = 0.0; ///< size / rate on this machine
};

/// Jobs waiting on (or running on) one machine, ascending in predicted
/// remaining time, ties by job index.
struct MachineQueue {
    MachineIndex machine = 0;
    std::vector<QueueEntry> entries;

    void insert(const QueueEntry& entry);
    void erase(JobIndex job);
};

/// Total completion time of SJF over the queue: sum_k sum_{l <= k} t_l.
double residual_estimate(const MachineQueue& queue);

/// Machine whose residual estimate grows least when a job of predicted
/// remaining `size` joins it. `job_rates[i]` is the job's rate on machine i;
/// machines with rate 0 are skipped, ties go to the lowest index.
/// Throws SchedError(NoFeasibleMachine).
MachineIndex dispatch_min_increase(JobIndex job, double size, const std::vector<double>& job_rates,
                                   const std::vector<MachineQueue>& queues);

/// Dispatches each job on release with its prediction; machines run their
/// queue in SJF order, every job to completion.
std::unique_ptr<Policy> blind_policy();

/// Like blind, but a job reaching its estimate without finishing gets the
/// estimate multiplied by `growth` and is dispatched again as a new arrival.
std::unique_ptr<Policy> doubling_policy(double growth = 2.0);

/// Single or identical machines: active jobs cycle in id order, one
/// quantum at a time.
std::unique_ptr<Policy> round_robin_policy(double quantum = 1.0);

} // namespace presched
