#pragma once

#include <presched/core/geometric.hpp>
#include <presched/core/policy.hpp>

#include <cstdint>
#include <memory>
#include <set>
#include <tuple>
#include <vector>

namespace presched {

/// FIFO queues Q_0, Q_1, ... ordered lexicographically by (queue, arrival
/// into that queue). A job in Q_k moves to the tail of Q_{k+1} when its
/// processed amount reaches (1 + delta)^(k+1).
class FeedbackQueues {
public:
    explicit FeedbackQueues(double delta);

    const GeometricScale& scale() const noexcept { return scale_; }

    /// Appends j to the tail of queue k; re-inserting moves j to that tail.
    void insert(JobIndex j, int k);
    /// Queue of the largest power of (1 + delta) not above max(amount, 1).
    void insert_by_amount(JobIndex j, double amount);
    void erase(JobIndex j);
    bool contains(JobIndex j) const;

    int queue_of(JobIndex j) const;
    /// Work level that triggers the next move of j.
    double next_threshold(JobIndex j) const;

    /// Moves j one queue up if `work` is its pending threshold. Returns
    /// whether a move happened.
    bool on_threshold(JobIndex j, double work);

    /// True when a precedes b in (queue, position) order.
    bool before(JobIndex a, JobIndex b) const;

    /// Contained jobs in (queue, position) order.
    std::vector<JobIndex> ordered() const;
    std::size_t size() const noexcept { return order_.size(); }

    std::int64_t moves() const noexcept { return moves_; }
    const std::vector<std::int64_t>& moves_per_job() const noexcept { return moves_per_job_; }
    void count_move(JobIndex j);

private:
    using Key = std::tuple<int, std::uint64_t, JobIndex>;

    void ensure(JobIndex j);

    GeometricScale scale_;
    std::set<Key> order_;
    std::vector<int> queue_;
    std::vector<std::uint64_t> seq_;
    std::vector<bool> present_;
    std::vector<std::int64_t> moves_per_job_;
    std::uint64_t next_seq_ = 0;
    std::int64_t moves_ = 0;
};

/// Single-machine PMLF. Releases join queue floor(log_{1+delta} p_hat).
std::unique_ptr<Policy> pmlf_policy(double delta);

/// Identical machines: the first min(m, alive) jobs in queue order run,
/// one per machine. Running jobs keep their machine while they stay in
/// the selected set.
std::unique_ptr<Policy> pmlf_identical_policy(double delta, std::size_t machines);

/// PMLF that, the first time at most g / gamma jobs are unfinished,
/// re-enqueues every alive job (in id order) by its processed amount.
/// Each re-enqueue is logged in PolicyStats::resets with the queue levels
/// (1 + delta)^k before and after as old and new prediction.
std::unique_ptr<Policy> pmlf_adapted_policy(double delta, std::size_t g, double gamma);

} // namespace presched
