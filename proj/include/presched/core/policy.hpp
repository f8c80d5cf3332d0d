#pragma once

#include <presched/core/types.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace presched {

class SimulationDriver;

/// What a policy is allowed to observe. True sizes are not reachable from
/// here, which makes every policy non-clairvoyant by construction.
class SimView {
public:
    double now() const noexcept;
    std::size_t machine_count() const noexcept;
    std::size_t job_count() const noexcept;
    Environment environment() const noexcept;

    /// Released, unfinished jobs in ascending index order.
    const std::vector<JobIndex>& alive() const noexcept;

    bool released(JobIndex j) const;
    bool finished(JobIndex j) const;

    /// The following accessors require the job to be released.
    double predicted(JobIndex j) const;
    double weight(JobIndex j) const;
    double release_time(JobIndex j) const;
    std::int64_t job_id(JobIndex j) const;
    double processed(JobIndex j) const;

    double rate(MachineIndex i, JobIndex j) const;

private:
    friend class SimulationDriver;
    explicit SimView(const SimulationDriver& driver) : driver_(&driver) {}
    void require_released(JobIndex j) const;

    const SimulationDriver* driver_;
};

struct Event {
    enum class Kind { SimStart, JobReleased, JobCompleted, ThresholdReached, TimerFired };

    Kind kind = Kind::SimStart;
    double time = 0.0;
    JobIndex job = kNoJob; ///< JobReleased, JobCompleted, ThresholdReached
    double value = 0.0;    ///< threshold work for ThresholdReached
    int tag = 0;           ///< TimerFired
};

/// Work level at which the driver interrupts with ThresholdReached.
struct Threshold {
    JobIndex job = kNoJob;
    double work = 0.0;
};

/// A policy's answer after the events of one instant have been delivered.
/// Thresholds and the timer stay registered until the next decision.
struct Decision {
    std::vector<JobIndex> run; ///< per machine; kNoJob means idle
    std::vector<Threshold> thresholds;
    std::optional<double> timer;
    int timer_tag = 0;

    static Decision idle(std::size_t machines) { return Decision{std::vector<JobIndex>(machines, kNoJob), {}, {}, 0}; }
};

/// Behavioral contract for online schedulers driven by simulate().
class Policy {
public:
    virtual ~Policy() = default;

    virtual std::string name() const = 0;

    /// Called once per event, in the driver's deterministic order.
    virtual void on_event(const SimView& view, const Event& event) = 0;

    /// Called after all events sharing a timestamp were delivered.
    virtual Decision decide(const SimView& view) = 0;

    virtual PolicyStats stats() const { return {}; }
};

} // namespace presched
