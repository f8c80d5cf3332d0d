#include <presched/pmlf/pmlf.hpp>

#include <presched/core/error.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace presched {

FeedbackQueues::FeedbackQueues(double delta) : scale_(delta) {}

void FeedbackQueues::ensure(JobIndex j) {
    if (j >= present_.size()) {
        queue_.resize(j + 1, 0);
        seq_.resize(j + 1, 0);
        present_.resize(j + 1, false);
        moves_per_job_.resize(j + 1, 0);
    }
}

void FeedbackQueues::insert(JobIndex j, int k) {
    ensure(j);
    if (present_[j]) {
        erase(j);
    }
    queue_[j] = k;
    seq_[j] = next_seq_++;
    present_[j] = true;
    order_.emplace(queue_[j], seq_[j], j);
}

void FeedbackQueues::insert_by_amount(JobIndex j, double amount) {
    insert(j, amount >= 1.0 ? scale_.floor_exponent(amount) : 0);
}

void FeedbackQueues::erase(JobIndex j) {
    if (!contains(j)) {
        return;
    }
    order_.erase(Key{queue_[j], seq_[j], j});
    present_[j] = false;
}

bool FeedbackQueues::contains(JobIndex j) const { return j < present_.size() && present_[j]; }

int FeedbackQueues::queue_of(JobIndex j) const { return queue_.at(j); }

double FeedbackQueues::next_threshold(JobIndex j) const { return scale_.power(queue_.at(j) + 1); }

bool FeedbackQueues::on_threshold(JobIndex j, double work) {
    if (!contains(j)) {
        return false;
    }
    const double target = next_threshold(j);
    if (std::abs(work - target) > work_tolerance(target)) {
        return false;
    }
    insert(j, queue_[j] + 1);
    count_move(j);
    return true;
}

void FeedbackQueues::count_move(JobIndex j) {
    ensure(j);
    ++moves_;
    ++moves_per_job_[j];
}

bool FeedbackQueues::before(JobIndex a, JobIndex b) const {
    return Key{queue_.at(a), seq_.at(a), a} < Key{queue_.at(b), seq_.at(b), b};
}

std::vector<JobIndex> FeedbackQueues::ordered() const {
    std::vector<JobIndex> out;
    out.reserve(order_.size());
    for (const auto& key : order_) {
        out.push_back(std::get<2>(key));
    }
    return out;
}

namespace {

class PmlfPolicy final : public Policy {
public:
    enum class Variant { Single, Identical, Adapted };

    PmlfPolicy(Variant variant, double delta, std::size_t machines, std::size_t g, double gamma)
        : variant_(variant), queues_(delta), machines_(machines), g_(g), gamma_(gamma) {}

    std::string name() const override {
        switch (variant_) {
        case Variant::Single: return "pmlf";
        case Variant::Identical: return "pmlf-identical";
        case Variant::Adapted: return "pmlf-adapted";
        }
        return "pmlf";
    }

    void on_event(const SimView& view, const Event& ev) override {
        switch (ev.kind) {
        case Event::Kind::SimStart: start(view); break;
        case Event::Kind::JobReleased: queues_.insert_by_amount(ev.job, view.predicted(ev.job)); break;
        case Event::Kind::JobCompleted: queues_.erase(ev.job); break;
        case Event::Kind::ThresholdReached: queues_.on_threshold(ev.job, ev.value); break;
        case Event::Kind::TimerFired: break;
        }
    }

    Decision decide(const SimView& view) override {
        if (variant_ == Variant::Adapted && !reset_done_ && !view.alive().empty() &&
            static_cast<double>(view.alive().size()) <= static_cast<double>(g_) / gamma_) {
            reset_done_ = true;
            for (JobIndex j : view.alive()) {
                const int before = queues_.queue_of(j);
                queues_.insert_by_amount(j, view.processed(j));
                const int after = queues_.queue_of(j);
                if (after != before) {
                    queues_.count_move(j);
                }
                resets_.push_back(PredictionReset{view.now(), j, view.processed(j),
                                                  queues_.scale().power(before), queues_.scale().power(after)});
            }
        }
        const std::size_t m = view.machine_count();
        Decision d = Decision::idle(m);
        std::vector<JobIndex> chosen;
        for (JobIndex j : queues_.ordered()) {
            if (chosen.size() == m) {
                break;
            }
            chosen.push_back(j);
        }
        // Keep running jobs on their machines, then fill the free ones.
        std::vector<bool> placed(chosen.size(), false);
        for (std::size_t c = 0; c < chosen.size(); ++c) {
            for (MachineIndex i = 0; i < m; ++i) {
                if (previous_[i] == chosen[c] && d.run[i] == kNoJob) {
                    d.run[i] = chosen[c];
                    placed[c] = true;
                    break;
                }
            }
        }
        MachineIndex next = 0;
        for (std::size_t c = 0; c < chosen.size(); ++c) {
            if (placed[c]) {
                continue;
            }
            while (d.run[next] != kNoJob) {
                ++next;
            }
            d.run[next] = chosen[c];
        }
        for (JobIndex j : chosen) {
            d.thresholds.push_back(Threshold{j, queues_.next_threshold(j)});
        }
        previous_ = d.run;
        return d;
    }

    PolicyStats stats() const override {
        PolicyStats s;
        s.queue_moves = queues_.moves();
        s.queue_moves_per_job = queues_.moves_per_job();
        s.queue_moves_per_job.resize(job_count_, 0);
        s.resets = resets_;
        return s;
    }

private:
    void start(const SimView& view) {
        job_count_ = view.job_count();
        const std::size_t m = view.machine_count();
        if (variant_ == Variant::Single && m != 1) {
            throw SchedError(Errc::WrongEnvironment, "pmlf needs a single machine; use pmlf_identical_policy");
        }
        if (variant_ != Variant::Single && view.environment() == Environment::Unrelated) {
            throw SchedError(Errc::WrongEnvironment, name() + " needs identical machines");
        }
        if (variant_ == Variant::Identical && m != machines_) {
            throw SchedError(Errc::WrongEnvironment, "pmlf-identical configured for " + std::to_string(machines_) +
                                                         " machines, instance has " + std::to_string(m));
        }
        previous_.assign(m, kNoJob);
    }

    Variant variant_;
    FeedbackQueues queues_;
    std::size_t machines_;
    std::size_t g_;
    double gamma_;
    bool reset_done_ = false;
    std::size_t job_count_ = 0;
    std::vector<JobIndex> previous_;
    std::vector<PredictionReset> resets_;
};

} // namespace

std::unique_ptr<Policy> pmlf_policy(double delta) {
    return std::make_unique<PmlfPolicy>(PmlfPolicy::Variant::Single, delta, 1, 0, 0.5);
}

std::unique_ptr<Policy> pmlf_identical_policy(double delta, std::size_t machines) {
    if (machines == 0) {
        throw SchedError(Errc::InvalidParameter, "pmlf-identical needs at least one machine");
    }
    return std::make_unique<PmlfPolicy>(PmlfPolicy::Variant::Identical, delta, machines, 0, 0.5);
}

std::unique_ptr<Policy> pmlf_adapted_policy(double delta, std::size_t g, double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) {
        throw SchedError(Errc::InvalidParameter, "gamma must lie in (0, 1)");
    }
    return std::make_unique<PmlfPolicy>(PmlfPolicy::Variant::Adapted, delta, 0, g, gamma);
}

} // namespace presched
