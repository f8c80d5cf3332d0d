#include <presched/baselines/baselines.hpp>
#include <presched/baselines/sjf_board.hpp>

#include <presched/core/error.hpp>

#include <algorithm>
#include <deque>
#include <limits>
#include <string>

namespace presched {

void MachineQueue::insert(const QueueEntry& entry) {
    const auto pos = std::upper_bound(entries.begin(), entries.end(), entry, [](const QueueEntry& a, const QueueEntry& b) {
        return a.time != b.time ? a.time < b.time : a.job < b.job;
    });
    entries.insert(pos, entry);
}

void MachineQueue::erase(JobIndex job) {
    std::erase_if(entries, [job](const QueueEntry& e) { return e.job == job; });
}

double residual_estimate(const MachineQueue& queue) {
    double prefix = 0.0;
    double total = 0.0;
    for (const QueueEntry& e : queue.entries) {
        prefix += e.time;
        total += prefix;
    }
    return total;
}

MachineIndex dispatch_min_increase(JobIndex job, double size, const std::vector<double>& job_rates,
                                   const std::vector<MachineQueue>& queues) {
    MachineIndex best = queues.size();
    double best_increase = std::numeric_limits<double>::infinity();
    for (MachineIndex i = 0; i < queues.size(); ++i) {
        const double rate = job_rates.at(i);
        if (!(rate > 0.0)) {
            continue;
        }
        MachineQueue after = queues[i];
        after.insert(QueueEntry{job, size, size / rate});
        const double increase = residual_estimate(after) - residual_estimate(queues[i]);
        if (increase < best_increase) {
            best_increase = increase;
            best = i;
        }
    }
    if (best == queues.size()) {
        throw SchedError(Errc::NoFeasibleMachine, "job index " + std::to_string(job) + " has no usable machine");
    }
    return best;
}

// SjfBoard ------------------------------------------------------------------

void SjfBoard::reset(std::size_t machines, std::size_t jobs) {
    members_.assign(machines, {});
    machine_.assign(jobs, kNoMachine);
    estimate_.assign(jobs, 0.0);
    current_.assign(machines, kNoJob);
}

MachineQueue SjfBoard::queue(const SimView& view, MachineIndex i) const {
    MachineQueue q{i, {}};
    for (JobIndex j : members_[i]) {
        const double size = std::max(estimate_[j] - view.processed(j), 0.0);
        q.insert(QueueEntry{j, size, size / view.rate(i, j)});
    }
    return q;
}

MachineIndex SjfBoard::dispatch(const SimView& view, JobIndex j, double estimate) {
    const std::size_t m = members_.size();
    std::vector<MachineQueue> queues;
    std::vector<double> rates(m);
    queues.reserve(m);
    for (MachineIndex i = 0; i < m; ++i) {
        rates[i] = view.rate(i, j);
        queues.push_back(rates[i] > 0.0 ? queue(view, i) : MachineQueue{i, {}});
    }
    const double size = std::max(estimate - view.processed(j), 0.0);
    const MachineIndex target = dispatch_min_increase(j, size, rates, queues);
    estimate_[j] = estimate;
    machine_[j] = target;
    members_[target].push_back(j);
    return target;
}

void SjfBoard::remove(JobIndex j) {
    const MachineIndex i = machine_[j];
    if (i == kNoMachine) {
        return;
    }
    std::erase(members_[i], j);
    machine_[j] = kNoMachine;
    if (current_[i] == j) {
        current_[i] = kNoJob;
    }
}

JobIndex SjfBoard::select(const SimView& view, MachineIndex i) {
    if (current_[i] != kNoJob) {
        return current_[i];
    }
    JobIndex best = kNoJob;
    double best_time = std::numeric_limits<double>::infinity();
    for (JobIndex j : members_[i]) {
        const double time = std::max(estimate_[j] - view.processed(j), 0.0) / view.rate(i, j);
        if (time < best_time || (time == best_time && j < best)) {
            best_time = time;
            best = j;
        }
    }
    current_[i] = best;
    return best;
}

namespace {

class SjfDispatchPolicy final : public Policy {
public:
    explicit SjfDispatchPolicy(double growth) : growth_(growth) {}

    std::string name() const override { return growth_ > 0.0 ? "doubling" : "blind"; }

    void on_event(const SimView& view, const Event& ev) override {
        switch (ev.kind) {
        case Event::Kind::SimStart:
            board_.reset(view.machine_count(), view.job_count());
            redispatches_.assign(view.job_count(), 0);
            break;
        case Event::Kind::JobReleased: board_.dispatch(view, ev.job, view.predicted(ev.job)); break;
        case Event::Kind::JobCompleted: board_.remove(ev.job); break;
        case Event::Kind::ThresholdReached:
            if (growth_ > 0.0 && board_.holds(ev.job) &&
                std::abs(ev.value - board_.estimate(ev.job)) <= work_tolerance(ev.value)) {
                const double next = board_.estimate(ev.job) * growth_;
                board_.remove(ev.job);
                board_.dispatch(view, ev.job, next);
                ++redispatches_[ev.job];
            }
            break;
        case Event::Kind::TimerFired: break;
        }
    }

    Decision decide(const SimView& view) override {
        Decision d = Decision::idle(view.machine_count());
        for (MachineIndex i = 0; i < view.machine_count(); ++i) {
            const JobIndex j = board_.select(view, i);
            d.run[i] = j;
            if (j != kNoJob && growth_ > 0.0) {
                d.thresholds.push_back(Threshold{j, board_.estimate(j)});
            }
        }
        return d;
    }

    PolicyStats stats() const override {
        PolicyStats s;
        s.redispatches_per_job = redispatches_;
        for (auto r : redispatches_) {
            s.redispatches += r;
        }
        s.queue_moves_per_job.assign(redispatches_.size(), 0);
        return s;
    }

private:
    double growth_; // 0 for blind
    SjfBoard board_;
    std::vector<std::int64_t> redispatches_;
};

class RoundRobinPolicy final : public Policy {
public:
    explicit RoundRobinPolicy(double quantum) : quantum_(quantum) {}

    std::string name() const override { return "rr"; }

    void on_event(const SimView& view, const Event& ev) override {
        switch (ev.kind) {
        case Event::Kind::SimStart:
            if (view.environment() == Environment::Unrelated) {
                throw SchedError(Errc::WrongEnvironment, "round robin supports single and identical machines only");
            }
            running_.assign(view.machine_count(), kNoJob);
            slice_end_.assign(view.machine_count(), 0.0);
            break;
        case Event::Kind::JobReleased: ring_.push_back(ev.job); break;
        case Event::Kind::JobCompleted:
            std::erase(ring_, ev.job);
            for (MachineIndex i = 0; i < running_.size(); ++i) {
                if (running_[i] == ev.job) {
                    running_[i] = kNoJob;
                }
            }
            break;
        case Event::Kind::ThresholdReached: break;
        case Event::Kind::TimerFired:
            for (MachineIndex i = 0; i < running_.size(); ++i) {
                const JobIndex j = running_[i];
                if (j != kNoJob && slice_end_[i] <= view.now() + kTolerance) {
                    std::erase(ring_, j);
                    ring_.push_back(j);
                    running_[i] = kNoJob;
                }
            }
            break;
        }
    }

    Decision decide(const SimView& view) override {
        const std::size_t m = view.machine_count();
        Decision d = Decision::idle(m);
        auto is_running = [&](JobIndex j) { return std::find(running_.begin(), running_.end(), j) != running_.end(); };
        std::size_t busy = static_cast<std::size_t>(std::count_if(running_.begin(), running_.end(),
                                                                   [](JobIndex j) { return j != kNoJob; }));
        for (JobIndex j : ring_) {
            if (busy == m) {
                break;
            }
            if (is_running(j)) {
                continue;
            }
            for (MachineIndex i = 0; i < m; ++i) {
                if (running_[i] == kNoJob) {
                    running_[i] = j;
                    slice_end_[i] = view.now() + quantum_;
                    ++busy;
                    break;
                }
            }
        }
        double next = std::numeric_limits<double>::infinity();
        for (MachineIndex i = 0; i < m; ++i) {
            d.run[i] = running_[i];
            if (running_[i] != kNoJob) {
                next = std::min(next, slice_end_[i]);
            }
        }
        if (next < std::numeric_limits<double>::infinity()) {
            d.timer = next;
        }
        return d;
    }

private:
    double quantum_;
    std::deque<JobIndex> ring_;
    std::vector<JobIndex> running_;
    std::vector<double> slice_end_;
};

} // namespace

std::unique_ptr<Policy> blind_policy() { return std::make_unique<SjfDispatchPolicy>(0.0); }

std::unique_ptr<Policy> doubling_policy(double growth) {
    if (!(growth > 1.0)) {
        throw SchedError(Errc::InvalidParameter, "doubling growth factor must exceed 1");
    }
    return std::make_unique<SjfDispatchPolicy>(growth);
}

std::unique_ptr<Policy> round_robin_policy(double quantum) {
    if (!(quantum > 0.0)) {
        throw SchedError(Errc::InvalidParameter, "round robin quantum must be positive");
    }
    return std::make_unique<RoundRobinPolicy>(quantum);
}

} // namespace presched
