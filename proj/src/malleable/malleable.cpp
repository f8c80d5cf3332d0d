#include <presched/malleable/malleable.hpp>

#include <presched/core/error.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <queue>
#include <utility>

namespace presched {

SpeedupFunction::SpeedupFunction(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() < 2 || values_[0] != 0.0 || !(values_[1] > 0.0)) {
        throw SchedError(Errc::InvalidSpeedup, "need f(0) = 0 and f(1) > 0");
    }
    for (std::size_t k = 1; k < values_.size(); ++k) {
        if (!std::isfinite(values_[k]) || values_[k] < values_[k - 1]) {
            throw SchedError(Errc::InvalidSpeedup, "f must be non-decreasing");
        }
        if (k >= 2) {
            const double prev = values_[k - 1] - values_[k - 2];
            const double cur = values_[k] - values_[k - 1];
            if (cur > prev + 1e-12 * std::max(1.0, std::abs(prev))) {
                throw SchedError(Errc::InvalidSpeedup, "f must be concave");
            }
        }
    }
}

SpeedupFunction SpeedupFunction::identity() { return SpeedupFunction({0.0, 1.0}); }

double speedup_eval(const SpeedupFunction& f, double s) {
    if (s < 0.0) {
        throw SchedError(Errc::NegativeArgument, "speedup argument must be non-negative");
    }
    const auto& v = f.values();
    const std::size_t last = v.size() - 1;
    const auto k = std::min(static_cast<std::size_t>(std::floor(s)), last - 1);
    return v[k] + (s - static_cast<double>(k)) * (v[k + 1] - v[k]);
}

MalleablePlan round_malleable_identical(const std::vector<double>& x, const std::vector<SpeedupFunction>& f, double L,
                                        std::size_t m) {
    if (x.size() != f.size()) {
        throw SchedError(Errc::InvalidParameter, "x and f differ in length");
    }
    if (!(L > 0.0) || !std::isfinite(L) || m == 0) {
        throw SchedError(Errc::InvalidParameter, "need L > 0 and m >= 1");
    }
    double total = 0.0;
    for (double xj : x) {
        if (!(xj >= 0.0) || !std::isfinite(xj)) {
            throw SchedError(Errc::InvalidParameter, "x must be finite and non-negative");
        }
        total += xj;
    }
    if (total > static_cast<double>(m) * (1.0 + 1e-12)) {
        throw SchedError(Errc::CapacityExceeded, "sum of x exceeds the machine count");
    }

    MalleablePlan plan;
    plan.jobs.resize(x.size());
    std::size_t next_machine = 0;
    double big_sum = 0.0;
    std::vector<std::size_t> small;
    for (std::size_t j = 0; j < x.size(); ++j) {
        MalleableSlot& slot = plan.jobs[j];
        slot.work = speedup_eval(f[j], x[j]) * L;
        if (x[j] < 1.0) {
            small.push_back(j);
            continue;
        }
        const auto count = static_cast<std::size_t>(std::floor(x[j]));
        big_sum += x[j];
        for (std::size_t c = 0; c < count; ++c) {
            slot.machines.push_back(next_machine++);
        }
        slot.end = slot.work / speedup_eval(f[j], static_cast<double>(count));
        plan.makespan = std::max(plan.makespan, slot.end);
    }

    // Leftover machines; at least one whenever a small job has work.
    const auto reserved = static_cast<std::size_t>(std::floor(big_sum + 1e-12));
    const std::size_t first_free = std::max(reserved, next_machine);
    std::size_t free_count = m > first_free ? m - first_free : 0;
    std::vector<double> length(x.size(), 0.0);
    for (std::size_t j : small) {
        length[j] = plan.jobs[j].work / speedup_eval(f[j], 1.0);
    }
    std::stable_sort(small.begin(), small.end(), [&](std::size_t a, std::size_t b) { return length[a] > length[b]; });
    if (free_count == 0) {
        for (std::size_t j : small) {
            if (length[j] > 0.0) {
                throw SchedError(Errc::CapacityExceeded, "no machine left for the fractional jobs");
            }
        }
        return plan;
    }

    using Slot = std::pair<double, std::size_t>; // (free at, machine)
    std::priority_queue<Slot, std::vector<Slot>, std::greater<>> heap;
    for (std::size_t c = 0; c < free_count; ++c) {
        heap.push({0.0, first_free + c});
    }
    for (std::size_t j : small) {
        auto [at, machine] = heap.top();
        heap.pop();
        MalleableSlot& slot = plan.jobs[j];
        slot.machines = {machine};
        slot.start = at;
        slot.end = at + length[j];
        plan.makespan = std::max(plan.makespan, slot.end);
        heap.push({slot.end, machine});
    }
    return plan;
}

} // namespace presched
