#include <presched/core/simulate.hpp>

#include <presched/core/error.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace presched {

class SimulationDriver {
public:
    SimulationDriver(const Instance& instance, Policy& policy, const SimOptions& options)
        : instance_(instance)
        , policy_(policy)
        , options_(options)
        , processed_(instance.job_count(), 0.0)
        , released_(instance.job_count(), false)
        , finished_(instance.job_count(), false)
        , open_segment_(instance.machine_count(), kNone) {
        result_.trace.completion.assign(instance.job_count(), std::nullopt);
        release_order_.resize(instance.job_count());
        std::iota(release_order_.begin(), release_order_.end(), JobIndex{0});
        std::stable_sort(release_order_.begin(), release_order_.end(),
                         [&](JobIndex a, JobIndex b) { return instance.job(a).r < instance.job(b).r; });
    }

    SimulationResult run();

private:
    friend class SimView;
    static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

    void release_due(std::vector<Event>& events);
    void check_decision(const Decision& decision) const;
    void advance(const Decision& decision, double dt, bool to_release, bool to_timer, std::vector<Event>& events);

    const Instance& instance_;
    Policy& policy_;
    SimOptions options_;

    double now_ = 0.0;
    std::vector<double> processed_;
    std::vector<bool> released_;
    std::vector<bool> finished_;
    std::vector<JobIndex> alive_;
    std::vector<JobIndex> release_order_;
    std::size_t next_release_ = 0;
    std::size_t finished_count_ = 0;
    std::vector<std::size_t> open_segment_;
    SimulationResult result_;
};

// SimView -----------------------------------------------------------------

double SimView::now() const noexcept { return driver_->now_; }
std::size_t SimView::machine_count() const noexcept { return driver_->instance_.machine_count(); }
std::size_t SimView::job_count() const noexcept { return driver_->instance_.job_count(); }
Environment SimView::environment() const noexcept { return driver_->instance_.environment(); }
const std::vector<JobIndex>& SimView::alive() const noexcept { return driver_->alive_; }

bool SimView::released(JobIndex j) const { return driver_->released_.at(j); }
bool SimView::finished(JobIndex j) const { return driver_->finished_.at(j); }

void SimView::require_released(JobIndex j) const {
    if (j >= job_count() || !driver_->released_[j]) {
        throw SchedError(Errc::PolicyAssignedUnknownJob, "job " + std::to_string(j) + " is not released");
    }
}

double SimView::predicted(JobIndex j) const {
    require_released(j);
    return driver_->instance_.job(j).p_hat;
}
double SimView::weight(JobIndex j) const {
    require_released(j);
    return driver_->instance_.job(j).w;
}
double SimView::release_time(JobIndex j) const {
    require_released(j);
    return driver_->instance_.job(j).r;
}
std::int64_t SimView::job_id(JobIndex j) const {
    require_released(j);
    return driver_->instance_.job(j).id;
}
double SimView::processed(JobIndex j) const {
    require_released(j);
    return driver_->processed_[j];
}
double SimView::rate(MachineIndex i, JobIndex j) const { return driver_->instance_.rate(i, j); }

// Driver --------------------------------------------------------------------

void SimulationDriver::release_due(std::vector<Event>& events) {
    std::vector<JobIndex> due;
    while (next_release_ < release_order_.size() &&
           instance_.job(release_order_[next_release_]).r <= now_ + kTolerance) {
        due.push_back(release_order_[next_release_++]);
    }
    std::sort(due.begin(), due.end());
    for (JobIndex j : due) {
        released_[j] = true;
        alive_.insert(std::upper_bound(alive_.begin(), alive_.end(), j), j);
        events.push_back(Event{Event::Kind::JobReleased, now_, j, 0.0, 0});
    }
}

void SimulationDriver::check_decision(const Decision& decision) const {
    const std::size_t m = instance_.machine_count();
    if (decision.run.size() != m) {
        throw SchedError(Errc::PolicyAssignedUnknownJob,
                         "decision covers " + std::to_string(decision.run.size()) + " machines, expected " +
                             std::to_string(m));
    }
    std::vector<bool> used(instance_.job_count(), false);
    for (MachineIndex i = 0; i < m; ++i) {
        const JobIndex j = decision.run[i];
        if (j == kNoJob) {
            continue;
        }
        if (j >= instance_.job_count() || !released_[j] || finished_[j]) {
            throw SchedError(Errc::PolicyAssignedUnknownJob,
                             "machine " + std::to_string(i) + " assigned job " + std::to_string(j) + " which is not alive");
        }
        if (used[j]) {
            throw SchedError(Errc::PolicyAssignedUnknownJob, "job " + std::to_string(j) + " assigned to two machines");
        }
        if (!(instance_.rate(i, j) > 0.0)) {
            throw SchedError(Errc::PolicyAssignedUnknownJob,
                             "job " + std::to_string(j) + " assigned to machine " + std::to_string(i) + " with zero rate");
        }
        used[j] = true;
    }
}

void SimulationDriver::advance(const Decision& decision, double dt, bool to_release, bool to_timer,
                               std::vector<Event>& events) {
    const double start = now_;
    const std::vector<double> before = processed_;
    double end = start + dt;
    if (to_release) {
        end = instance_.job(release_order_[next_release_]).r;
    } else if (to_timer) {
        end = *decision.timer;
    }
    const std::size_t m = instance_.machine_count();

    // Extend or open segments.
    for (MachineIndex i = 0; i < m; ++i) {
        const JobIndex j = decision.run[i];
        if (j == kNoJob) {
            open_segment_[i] = kNone;
            continue;
        }
        const double rate = instance_.rate(i, j);
        processed_[j] += rate * dt;
        if (end > start) {
            auto& segs = result_.trace.segments;
            const std::size_t open = open_segment_[i];
            if (open != kNone && segs[open].job == j && segs[open].t1 == start) {
                segs[open].t1 = end;
            } else {
                segs.push_back(Segment{j, i, start, end, rate});
                open_segment_[i] = segs.size() - 1;
            }
        }
    }
    now_ = end;

    // Completions first, then thresholds of survivors.
    std::vector<JobIndex> completed;
    std::vector<Event> crossings;
    for (MachineIndex i = 0; i < m; ++i) {
        const JobIndex j = decision.run[i];
        if (j == kNoJob) {
            continue;
        }
        const double p = instance_.job(j).p;
        if (processed_[j] >= p - work_tolerance(p)) {
            processed_[j] = p;
            completed.push_back(j);
            continue;
        }
        std::vector<double> hit;
        for (const Threshold& th : decision.thresholds) {
            if (th.job == j && th.work > before[j] + work_tolerance(th.work) &&
                processed_[j] >= th.work - work_tolerance(th.work)) {
                hit.push_back(th.work);
            }
        }
        std::sort(hit.begin(), hit.end());
        hit.erase(std::unique(hit.begin(), hit.end()), hit.end());
        for (double value : hit) {
            if (std::abs(processed_[j] - value) <= work_tolerance(value)) {
                processed_[j] = value;
            }
            crossings.push_back(Event{Event::Kind::ThresholdReached, now_, j, value, 0});
        }
    }
    std::sort(completed.begin(), completed.end());
    for (JobIndex j : completed) {
        finished_[j] = true;
        ++finished_count_;
        result_.trace.completion[j] = now_;
        alive_.erase(std::lower_bound(alive_.begin(), alive_.end(), j));
        events.push_back(Event{Event::Kind::JobCompleted, now_, j, 0.0, 0});
        for (MachineIndex i = 0; i < m; ++i) {
            if (decision.run[i] == j) {
                open_segment_[i] = kNone;
            }
        }
    }
    release_due(events);
    std::stable_sort(crossings.begin(), crossings.end(), [](const Event& a, const Event& b) { return a.job < b.job; });
    events.insert(events.end(), crossings.begin(), crossings.end());
    if (decision.timer && now_ >= *decision.timer - kTolerance) {
        events.push_back(Event{Event::Kind::TimerFired, now_, kNoJob, 0.0, decision.timer_tag});
    }
}

SimulationResult SimulationDriver::run() {
    const SimView view(*this);
    std::vector<Event> events;
    events.push_back(Event{Event::Kind::SimStart, 0.0, kNoJob, 0.0, 0});
    release_due(events);

    for (std::size_t step = 0;; ++step) {
        if (step >= options_.max_steps) {
            throw SchedError(Errc::NonterminatingPolicy, "step budget exhausted at t=" + std::to_string(now_));
        }
        for (const Event& ev : events) {
            policy_.on_event(view, ev);
        }
        events.clear();
        if (finished_count_ == instance_.job_count()) {
            break;
        }

        const Decision decision = policy_.decide(view);
        check_decision(decision);
        if (options_.record_decisions) {
            result_.decisions.push_back(DecisionRecord{now_, decision.run});
        }

        double dt = std::numeric_limits<double>::infinity();
        bool to_release = false;
        bool to_timer = false;
        for (MachineIndex i = 0; i < decision.run.size(); ++i) {
            const JobIndex j = decision.run[i];
            if (j == kNoJob) {
                continue;
            }
            const double rate = instance_.rate(i, j);
            dt = std::min(dt, (instance_.job(j).p - processed_[j]) / rate);
            for (const Threshold& th : decision.thresholds) {
                if (th.job == j && th.work > processed_[j] + work_tolerance(th.work)) {
                    dt = std::min(dt, (th.work - processed_[j]) / rate);
                }
            }
        }
        if (next_release_ < release_order_.size()) {
            const double until = instance_.job(release_order_[next_release_]).r - now_;
            if (until <= dt) {
                dt = until;
                to_release = true;
            }
        }
        if (decision.timer && *decision.timer > now_ + kTolerance) {
            const double until = *decision.timer - now_;
            if (until < dt) {
                dt = until;
                to_release = false;
                to_timer = true;
            }
        }
        if (!(dt < std::numeric_limits<double>::infinity())) {
            throw SchedError(Errc::NonterminatingPolicy,
                             "no job runs and no future event is pending at t=" + std::to_string(now_));
        }
        advance(decision, std::max(dt, 0.0), to_release, to_timer, events);
    }
    result_.stats = policy_.stats();
    return std::move(result_);
}

SimulationResult run_simulation(const Instance& instance, Policy& policy, const SimOptions& options) {
    SimulationDriver driver(instance, policy, options);
    return driver.run();
}

Trace simulate(const Instance& instance, Policy& policy) { return run_simulation(instance, policy).trace; }

} // namespace presched
