#pragma once

#include <presched/baselines/baselines.hpp>

#include <vector>

namespace presched {

/// Per-machine job lists with non-preemptive SJF execution. Each job
/// carries an estimate of its total work; its predicted remaining size is
/// max(estimate - processed, 0).
class SjfBoard {
public:
    void reset(std::size_t machines, std::size_t jobs);

    /// Places j on the machine with the least residual-estimate increase.
    MachineIndex dispatch(const SimView& view, JobIndex j, double estimate);
    void remove(JobIndex j);

    bool holds(JobIndex j) const { return machine_[j] != kNoMachine; }
    MachineIndex machine_of(JobIndex j) const { return machine_[j]; }
    double estimate(JobIndex j) const { return estimate_[j]; }
    bool empty(MachineIndex i) const { return members_[i].empty(); }

    /// Job that machine i runs now: its current job if still held,
    /// otherwise the shortest predicted remaining time (ties by index).
    JobIndex select(const SimView& view, MachineIndex i);

    MachineQueue queue(const SimView& view, MachineIndex i) const;

private:
    static constexpr MachineIndex kNoMachine = static_cast<MachineIndex>(-1);

    std::vector<std::vector<JobIndex>> members_;
    std::vector<MachineIndex> machine_;
    std::vector<double> estimate_;
    std::vector<JobIndex> current_;
};

} // namespace presched
