#pragma once

#include <presched/core/types.hpp>

#include <optional>
#include <vector>

namespace presched {

/// Preemption benchmark sum_j w_j (log2(p_j / p_hat_j) + 1).
double d_benchmark(const Instance& instance);

/// Segments grouped by job and ordered in time, with back-to-back pieces
/// on the same machine merged.
std::vector<Segment> coalesce_segments(const Trace& trace);

/// Times at which a machine stops a job that is not finished yet.
std::vector<double> preemption_times(const Trace& trace);

/// Fills EpochRecord::preemptions from preemption times, attributing a
/// time t to the epoch with start < t <= start + achieved_length.
void annotate_epoch_preemptions(std::vector<EpochRecord>& epochs, const std::vector<double>& times);

/// Objective and preemption accounting for a validated trace. Throws
/// SchedError(InvalidTrace) when validate_trace reports a violation.
Metrics compute_metrics(const Instance& instance, const Trace& trace, std::optional<double> opt_value = std::nullopt,
                        const PolicyStats* stats = nullptr);

} // namespace presched
