#include <presched/core/metrics.hpp>

#include <presched/core/error.hpp>
#include <presched/core/validate.hpp>

#include <algorithm>
#include <cmath>

namespace presched {

double d_benchmark(const Instance& instance) {
    double total = 0.0;
    for (const Job& job : instance.jobs()) {
        total += job.w * (std::log2(job.p / job.p_hat) + 1.0);
    }
    return total;
}

std::vector<Segment> coalesce_segments(const Trace& trace) {
    std::vector<Segment> segs = trace.segments;
    std::sort(segs.begin(), segs.end(), [](const Segment& a, const Segment& b) {
        return a.job != b.job ? a.job < b.job : a.t0 < b.t0;
    });
    std::vector<Segment> out;
    out.reserve(segs.size());
    for (const Segment& s : segs) {
        if (!out.empty() && out.back().job == s.job && out.back().machine == s.machine &&
            std::abs(out.back().t1 - s.t0) <= kTolerance) {
            out.back().t1 = s.t1;
            continue;
        }
        out.push_back(s);
    }
    return out;
}

std::vector<double> preemption_times(const Trace& trace) {
    const auto segs = coalesce_segments(trace);
    std::vector<double> times;
    for (std::size_t k = 0; k + 1 < segs.size(); ++k) {
        if (segs[k + 1].job == segs[k].job) {
            times.push_back(segs[k].t1);
        }
    }
    std::sort(times.begin(), times.end());
    return times;
}

void annotate_epoch_preemptions(std::vector<EpochRecord>& epochs, const std::vector<double>& times) {
    for (auto& e : epochs) {
        const double lo = e.start;
        const double hi = e.start + e.achieved_length;
        e.preemptions = static_cast<std::size_t>(std::count_if(times.begin(), times.end(), [&](double t) {
            return t > lo + kTolerance && t <= hi + kTolerance;
        }));
    }
}

Metrics compute_metrics(const Instance& instance, const Trace& trace, std::optional<double> opt_value,
                        const PolicyStats* stats) {
    const auto report = validate_trace(instance, trace);
    if (!report.ok()) {
        throw SchedError(Errc::InvalidTrace, std::string(to_string(report.entries.front().kind)) + ": " +
                                                 report.entries.front().detail);
    }
    Metrics m;
    const std::size_t n = instance.job_count();
    m.per_job_completion.resize(n);
    m.preemptions_per_job.assign(n, 0);
    for (std::size_t j = 0; j < n; ++j) {
        m.per_job_completion[j] = *trace.completion[j];
        m.total_completion += instance.job(j).w * m.per_job_completion[j];
    }
    const auto segs = coalesce_segments(trace);
    for (std::size_t k = 0; k + 1 < segs.size(); ++k) {
        if (segs[k + 1].job != segs[k].job) {
            continue;
        }
        ++m.preemptions;
        ++m.preemptions_per_job[segs[k].job];
        if (segs[k + 1].machine != segs[k].machine) {
            ++m.migrations;
        }
    }
    m.d_benchmark = d_benchmark(instance);
    if (stats != nullptr) {
        m.queue_moves = stats->queue_moves;
    }
    if (opt_value) {
        m.ratio = m.total_completion / *opt_value;
    }
    return m;
}

} // namespace presched
