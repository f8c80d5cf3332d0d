#include <presched/snap/snap.hpp>

#include <presched/baselines/sjf_board.hpp>
#include <presched/core/error.hpp>
#include <presched/pmlf/pmlf.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace presched {

double next_checkpoint(const GeometricScale& scale, double p_hat, double q) {
    int e = scale.ceil_exponent(std::max(p_hat, 1.0));
    if (q > 0.0) {
        e = std::max(e, scale.floor_exponent(q) + 1);
    }
    return scale.power(e);
}

double next_checkpoint_gap(double p_hat, double q, double delta) {
    if (!(p_hat >= 1.0) || !(q >= 0.0) || !(delta > 0.0)) {
        throw SchedError(Errc::InvalidParameter, "next_checkpoint_gap needs p_hat >= 1, q >= 0, delta > 0");
    }
    const GeometricScale scale(delta);
    return next_checkpoint(scale, p_hat, q) - q;
}

std::size_t exhaustion_target(double beta, std::size_t n) {
    const double raw = std::ceil(beta * static_cast<double>(n) - 1e-9);
    return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(raw, 1.0)), 1, std::max<std::size_t>(n, 1));
}

std::pair<double, std::vector<double>> simulation_length(const std::vector<double>& u, const std::vector<double>& y,
                                                         double beta) {
    if (u.size() != y.size() || u.empty()) {
        throw SchedError(Errc::InvalidParameter, "simulation_length needs matching non-empty u and y");
    }
    if (!(beta > 0.0 && beta <= 1.0)) {
        throw SchedError(Errc::InvalidParameter, "beta must lie in (0, 1]");
    }
    std::vector<std::size_t> order(u.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return u[a] / y[a] < u[b] / y[b]; });
    const std::size_t target = exhaustion_target(beta, u.size());
    const double length = u[order[target - 1]] / y[order[target - 1]];
    std::vector<double> v(u.size());
    for (std::size_t c = 0; c < u.size(); ++c) {
        // Compare ratios, not length * y, so ranked jobs get v = u exactly.
        v[c] = u[c] / y[c] <= length ? u[c] : length * y[c];
    }
    return {length, v};
}

std::vector<MachineIndex> dispatch_by_rates(const Matrix& rates, const PFRates& pf, const std::vector<double>& v) {
    const std::size_t m = rates.rows();
    std::vector<double> load(m, 0.0);
    std::vector<MachineIndex> out(pf.active.size(), 0);
    for (std::size_t c = 0; c < pf.active.size(); ++c) {
        const JobIndex j = pf.active[c];
        double best_score = -1.0;
        for (MachineIndex i = 0; i < m; ++i) {
            best_score = std::max(best_score, rates(i, j) * pf.x(i, c));
        }
        MachineIndex pick = m;
        for (MachineIndex i = 0; i < m; ++i) {
            const double score = rates(i, j) * pf.x(i, c);
            if (!(rates(i, j) > 0.0) || score < best_score * (1.0 - 1e-9)) {
                continue;
            }
            if (pick == m || load[i] < load[pick]) {
                pick = i;
            }
        }
        out[c] = pick;
        load[pick] += v[c] / rates(pick, j);
    }
    return out;
}

EpochPlan plan_epoch(const Matrix& rates, const std::vector<JobIndex>& jobs, const std::vector<double>& p_hat,
                     const std::vector<double>& processed, double delta, double beta, const PFOptions& pf) {
    if (jobs.empty()) {
        throw SchedError(Errc::InvalidParameter, "plan_epoch needs at least one job");
    }
    const GeometricScale scale(delta);
    EpochPlan plan;
    plan.jobs = jobs;
    plan.pf = solve_pf(rates, jobs, pf);
    plan.u.resize(jobs.size());
    for (std::size_t c = 0; c < jobs.size(); ++c) {
        plan.u[c] = next_checkpoint(scale, p_hat[c], processed[c]) - processed[c];
    }
    auto [length, v] = simulation_length(plan.u, plan.pf.y, beta);
    plan.length = length;
    plan.v = std::move(v);
    plan.target = exhaustion_target(beta, jobs.size());
    plan.assignment = dispatch_by_rates(rates, plan.pf, plan.v);
    return plan;
}

void write_epoch_csv(std::ostream& out, const std::vector<EpochRecord>& epochs) {
    out << "k,e_k,n_k,l_k,achieved_length,exhaustions,preemptions_in_epoch\n";
    for (const EpochRecord& e : epochs) {
        out << e.k << ',' << e.start << ',' << e.alive << ',' << e.planned_length << ',' << e.achieved_length << ','
            << e.exhaustions << ',' << e.preemptions << '\n';
    }
}

namespace {

struct EngineConfig {
    SnapParams params;
    bool two_stage = false;
    std::size_t g = 0;
    double epsilon = 1.0;
    bool hybrid = false;
    double c = 1.0;
    int milestones = 1;
};

class SnapEngine final : public Policy {
public:
    explicit SnapEngine(EngineConfig config) : cfg_(config), queues_(config.params.delta) {}

    std::string name() const override {
        if (cfg_.hybrid) {
            return "hybrid";
        }
        return cfg_.two_stage ? "snap-2stage" : "snap";
    }

    void on_event(const SimView& view, const Event& ev) override {
        last_time_ = ev.time;
        switch (ev.kind) {
        case Event::Kind::SimStart: start(view); break;
        case Event::Kind::JobReleased:
            p_hat_[ev.job] = view.predicted(ev.job);
            if (cfg_.hybrid) {
                board_.dispatch(view, ev.job, p_hat_[ev.job]);
            } else {
                join_snap(view, ev.job);
            }
            break;
        case Event::Kind::JobCompleted:
            if (cfg_.hybrid && board_.holds(ev.job)) {
                board_.remove(ev.job);
            } else {
                queues_.erase(ev.job);
                mark_exhausted(ev.job);
            }
            break;
        case Event::Kind::ThresholdReached: on_threshold(view, ev.job, ev.value); break;
        case Event::Kind::TimerFired: break;
        }
    }

    Decision decide(const SimView& view) override {
        if (epoch_open_ && epoch_over(view)) {
            close_epoch(view);
        }
        if (!epoch_open_ && queues_.size() > 0) {
            open_epoch(view);
        }
        const std::size_t m = view.machine_count();
        Decision d = Decision::idle(m);
        std::vector<bool> filled(m, false);
        if (cfg_.hybrid) {
            for (MachineIndex i = 0; i < m; ++i) {
                const JobIndex j = board_.select(view, i);
                if (j != kNoJob) {
                    d.run[i] = j;
                    filled[i] = true;
                    d.thresholds.push_back(Threshold{j, milestone(j, milestones_hit_[j] + 1)});
                }
            }
        }
        if (epoch_open_) {
            if (cfg_.params.mode == SnapMode::Experimental) {
                fill_experimental(d, filled);
            } else {
                fill_greedy(view, d, filled);
            }
        }
        return d;
    }

    PolicyStats stats() const override {
        PolicyStats s;
        s.queue_moves = queues_.moves();
        s.queue_moves_per_job = queues_.moves_per_job();
        s.queue_moves_per_job.resize(job_count_, 0);
        s.redispatches_per_job = redispatches_;
        for (auto r : redispatches_) {
            s.redispatches += r;
        }
        s.epochs = epochs_;
        if (epoch_open_) {
            // The run ended inside this epoch.
            EpochRecord last = current_;
            last.achieved_length = last_time_ - last.start;
            last.finished_all = queues_.size() == 0;
            s.epochs.push_back(last);
        }
        s.resets = resets_;
        return s;
    }

private:
    void start(const SimView& view) {
        const std::size_t m = view.machine_count();
        job_count_ = view.job_count();
        rates_ = Matrix(m, job_count_);
        for (MachineIndex i = 0; i < m; ++i) {
            for (JobIndex j = 0; j < job_count_; ++j) {
                rates_(i, j) = view.rate(i, j);
            }
        }
        p_hat_.assign(job_count_, 1.0);
        machine_.assign(job_count_, kNoMachine);
        in_epoch_.assign(job_count_, false);
        exhausted_.assign(job_count_, false);
        level_.assign(job_count_, 0.0);
        milestones_hit_.assign(job_count_, 0);
        redispatches_.assign(job_count_, 0);
        board_.reset(m, job_count_);
        lists_.assign(m, {});
    }

    double milestone(JobIndex j, int i) const {
        return cfg_.c * std::pow(1.0 + cfg_.params.delta, i) * p_hat_[j];
    }

    void join_snap(const SimView& view, JobIndex j) {
        const double q = view.processed(j);
        const double cp = next_checkpoint(queues_.scale(), p_hat_[j], q);
        queues_.insert(j, queues_.scale().ceil_exponent(cp) - 1);
        replan_ = true;
    }

    void mark_exhausted(JobIndex j) {
        if (epoch_open_ && in_epoch_[j] && !exhausted_[j]) {
            exhausted_[j] = true;
            ++current_.exhaustions;
        }
    }

    void on_threshold(const SimView& view, JobIndex j, double value) {
        if (cfg_.hybrid && board_.holds(j)) {
            const double next = milestone(j, milestones_hit_[j] + 1);
            if (std::abs(value - next) > work_tolerance(next)) {
                return;
            }
            ++milestones_hit_[j];
            board_.remove(j);
            if (milestones_hit_[j] >= cfg_.milestones) {
                join_snap(view, j);
            } else {
                board_.dispatch(view, j, next);
                ++redispatches_[j];
            }
            return;
        }
        if (queues_.on_threshold(j, value)) {
            mark_exhausted(j);
        }
    }

    bool epoch_over(const SimView& view) const {
        if (replan_) {
            return true;
        }
        if (cfg_.params.mode == SnapMode::Experimental && current_.exhaustions >= current_.target_exhaustions) {
            return true;
        }
        bool any_alive = false;
        for (JobIndex j : plan_.jobs) {
            any_alive = any_alive || !view.finished(j);
        }
        if (!any_alive) {
            return true;
        }
        if (cfg_.params.mode == SnapMode::GreedyStep4) {
            for (std::size_t i = 0; i < lists_.size(); ++i) {
                if (next_in_list(view, i) != kNoJob) {
                    return false;
                }
            }
            return true;
        }
        return false;
    }

    void close_epoch(const SimView& view) {
        current_.achieved_length = view.now() - current_.start;
        current_.finished_all = queues_.size() == 0;
        epochs_.push_back(current_);
        for (JobIndex j : plan_.jobs) {
            in_epoch_[j] = false;
            exhausted_[j] = false;
            machine_[j] = kNoMachine;
        }
        epoch_open_ = false;
    }

    void open_epoch(const SimView& view) {
        replan_ = false;
        std::vector<JobIndex> jobs = queues_.ordered();
        std::sort(jobs.begin(), jobs.end());
        bool reset_now = false;
        if (cfg_.two_stage && !reset_done_ &&
            static_cast<double>(jobs.size()) <= static_cast<double>(cfg_.g) / cfg_.epsilon) {
            reset_done_ = true;
            reset_now = true;
            const auto& scale = queues_.scale();
            for (JobIndex j : jobs) {
                const double q = view.processed(j);
                const double fresh = q > 0.0 ? std::max(1.0, scale.power(scale.ceil_exponent(q))) : 1.0;
                resets_.push_back(PredictionReset{view.now(), j, q, p_hat_[j], fresh});
                p_hat_[j] = fresh;
                const double cp = next_checkpoint(scale, fresh, q);
                const int before = queues_.queue_of(j);
                queues_.insert(j, scale.ceil_exponent(cp) - 1);
                if (queues_.queue_of(j) != before) {
                    queues_.count_move(j);
                }
            }
        }
        std::vector<double> predictions, processed;
        for (JobIndex j : jobs) {
            predictions.push_back(p_hat_[j]);
            processed.push_back(view.processed(j));
        }
        PFOptions options;
        options.tol = cfg_.params.tol;
        plan_ = plan_epoch(rates_, jobs, predictions, processed, cfg_.params.delta, cfg_.params.beta, options);
        plan_.k = epochs_.size() + 1;
        plan_.start = view.now();

        current_ = EpochRecord{};
        current_.k = plan_.k;
        current_.start = view.now();
        current_.alive = jobs.size();
        current_.planned_length = plan_.length;
        current_.target_exhaustions = plan_.target;
        current_.prediction_reset = reset_now;
        for (std::size_t c = 0; c < jobs.size(); ++c) {
            in_epoch_[jobs[c]] = true;
            machine_[jobs[c]] = plan_.assignment[c];
        }
        if (cfg_.params.mode == SnapMode::GreedyStep4) {
            for (auto& list : lists_) {
                list.clear();
            }
            for (std::size_t c = 0; c < jobs.size(); ++c) {
                level_[jobs[c]] = processed[c] + plan_.v[c];
                lists_[plan_.assignment[c]].push_back(c);
            }
            for (auto& list : lists_) {
                std::stable_sort(list.begin(), list.end(), [&](std::size_t a, std::size_t b) {
                    return plan_.v[a] != plan_.v[b] ? plan_.v[a] > plan_.v[b] : jobs[a] < jobs[b];
                });
            }
        }
        epoch_open_ = true;
    }

    void fill_experimental(Decision& d, std::vector<bool>& filled) const {
        std::size_t open = static_cast<std::size_t>(std::count(filled.begin(), filled.end(), false));
        for (JobIndex j : queues_.ordered()) {
            if (open == 0) {
                break;
            }
            const MachineIndex i = machine_[j];
            if (i == kNoMachine || filled[i]) {
                continue;
            }
            d.run[i] = j;
            filled[i] = true;
            --open;
            d.thresholds.push_back(Threshold{j, queues_.next_threshold(j)});
        }
    }

    JobIndex next_in_list(const SimView& view, std::size_t i) const {
        for (std::size_t c : lists_[i]) {
            const JobIndex j = plan_.jobs[c];
            if (!view.finished(j) && view.processed(j) < level_[j] - work_tolerance(level_[j])) {
                return j;
            }
        }
        return kNoJob;
    }

    void fill_greedy(const SimView& view, Decision& d, std::vector<bool>& filled) const {
        for (MachineIndex i = 0; i < lists_.size(); ++i) {
            if (filled[i]) {
                continue;
            }
            const JobIndex j = next_in_list(view, i);
            if (j == kNoJob) {
                continue;
            }
            d.run[i] = j;
            filled[i] = true;
            d.thresholds.push_back(Threshold{j, level_[j]});
            d.thresholds.push_back(Threshold{j, queues_.next_threshold(j)});
        }
    }

    static constexpr MachineIndex kNoMachine = static_cast<MachineIndex>(-1);

    EngineConfig cfg_;
    FeedbackQueues queues_;
    SjfBoard board_;
    Matrix rates_;
    std::size_t job_count_ = 0;
    std::vector<double> p_hat_;
    std::vector<MachineIndex> machine_;
    std::vector<bool> in_epoch_;
    std::vector<bool> exhausted_;
    std::vector<double> level_;
    std::vector<int> milestones_hit_;
    std::vector<std::int64_t> redispatches_;
    std::vector<std::vector<std::size_t>> lists_;

    double last_time_ = 0.0;
    bool epoch_open_ = false;
    bool replan_ = false;
    bool reset_done_ = false;
    EpochPlan plan_;
    EpochRecord current_;
    std::vector<EpochRecord> epochs_;
    std::vector<PredictionReset> resets_;
};

void check_params(const SnapParams& p) {
    if (!(p.delta > 0.0)) {
        throw SchedError(Errc::InvalidParameter, "delta must be positive");
    }
    if (!(p.beta > 0.0 && p.beta <= 1.0)) {
        throw SchedError(Errc::InvalidParameter, "beta must lie in (0, 1]");
    }
    if (!(p.tol > 0.0)) {
        throw SchedError(Errc::InvalidParameter, "tolerance must be positive");
    }
}

} // namespace

std::unique_ptr<Policy> snap_policy(const SnapParams& params) {
    check_params(params);
    EngineConfig cfg;
    cfg.params = params;
    return std::make_unique<SnapEngine>(cfg);
}

std::unique_ptr<Policy> snap_two_stage_policy(const SnapParams& params, std::size_t g, double epsilon) {
    check_params(params);
    if (!(epsilon > 0.0)) {
        throw SchedError(Errc::InvalidParameter, "epsilon must be positive");
    }
    EngineConfig cfg;
    cfg.params = params;
    cfg.two_stage = true;
    cfg.g = g;
    cfg.epsilon = epsilon;
    return std::make_unique<SnapEngine>(cfg);
}

std::unique_ptr<Policy> hybrid_snap_policy(double c, const SnapParams& params, int milestones) {
    check_params(params);
    if (!(c >= 1.0)) {
        throw SchedError(Errc::InvalidParameter, "hybrid constant c must be at least 1");
    }
    if (milestones < 1) {
        throw SchedError(Errc::InvalidParameter, "milestone count must be at least 1");
    }
    EngineConfig cfg;
    cfg.params = params;
    cfg.hybrid = true;
    cfg.c = c;
    cfg.milestones = milestones;
    return std::make_unique<SnapEngine>(cfg);
}

} // namespace presched
