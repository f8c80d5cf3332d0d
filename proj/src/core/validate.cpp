#include <presched/core/validate.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace presched {

std::string_view to_string(Violation v) noexcept {
    switch (v) {
    case Violation::UnknownJob: return "UnknownJob";
    case Violation::UnknownMachine: return "UnknownMachine";
    case Violation::NonPositiveLength: return "NonPositiveLength";
    case Violation::MachineOverlap: return "MachineOverlap";
    case Violation::JobOverlap: return "JobOverlap";
    case Violation::RateMismatch: return "RateMismatch";
    case Violation::PreReleaseWork: return "PreReleaseWork";
    case Violation::WorkAfterCompletion: return "WorkAfterCompletion";
    case Violation::UnderProcessing: return "UnderProcessing";
    case Violation::OverProcessing: return "OverProcessing";
    case Violation::CompletionMismatch: return "CompletionMismatch";
    case Violation::MissingCompletion: return "MissingCompletion";
    }
    return "Unknown";
}

bool ValidationReport::has(Violation kind) const noexcept {
    return std::any_of(entries.begin(), entries.end(), [&](const ValidationEntry& e) { return e.kind == kind; });
}

namespace {

template <typename... Args>
std::string describe(Args&&... args) {
    std::ostringstream out;
    out.precision(17);
    (out << ... << args);
    return out.str();
}

void check_disjoint(std::vector<const Segment*> segs, Violation kind, const char* what, std::size_t owner,
                    ValidationReport& report) {
    std::sort(segs.begin(), segs.end(), [](const Segment* a, const Segment* b) { return a->t0 < b->t0; });
    for (std::size_t k = 1; k < segs.size(); ++k) {
        if (segs[k]->t0 < segs[k - 1]->t1 - kTolerance) {
            report.entries.push_back({kind, describe(what, ' ', owner, ": [", segs[k - 1]->t0, ",", segs[k - 1]->t1,
                                                     "] overlaps [", segs[k]->t0, ",", segs[k]->t1, "]")});
        }
    }
}

} // namespace

ValidationReport validate_trace(const Instance& instance, const Trace& trace) {
    ValidationReport report;
    const std::size_t n = instance.job_count();
    const std::size_t m = instance.machine_count();

    std::vector<std::vector<const Segment*>> by_job(n);
    std::vector<std::vector<const Segment*>> by_machine(m);
    for (const Segment& s : trace.segments) {
        bool ok = true;
        if (s.job >= n) {
            report.entries.push_back({Violation::UnknownJob, describe("segment names job index ", s.job)});
            ok = false;
        }
        if (s.machine >= m) {
            report.entries.push_back({Violation::UnknownMachine, describe("segment names machine ", s.machine)});
            ok = false;
        }
        if (!(s.t1 > s.t0)) {
            report.entries.push_back({Violation::NonPositiveLength, describe("segment [", s.t0, ",", s.t1, "]")});
        }
        if (!ok) {
            continue;
        }
        const double expected = instance.rate(s.machine, s.job);
        if (!(expected > 0.0) || std::abs(s.rate - expected) > 1e-12 * std::max(1.0, expected)) {
            report.entries.push_back({Violation::RateMismatch, describe("job ", s.job, " on machine ", s.machine,
                                                                        " rate ", s.rate, " expected ", expected)});
        }
        if (s.t0 < instance.job(s.job).r - kTolerance) {
            report.entries.push_back(
                {Violation::PreReleaseWork, describe("job ", s.job, " runs at ", s.t0, " before release ", instance.job(s.job).r)});
        }
        by_job[s.job].push_back(&s);
        by_machine[s.machine].push_back(&s);
    }
    for (std::size_t i = 0; i < m; ++i) {
        check_disjoint(by_machine[i], Violation::MachineOverlap, "machine", i, report);
    }
    for (std::size_t j = 0; j < n; ++j) {
        check_disjoint(by_job[j], Violation::JobOverlap, "job", j, report);
    }

    for (std::size_t j = 0; j < n; ++j) {
        const double p = instance.job(j).p;
        double work = 0.0;
        double last_end = 0.0;
        for (const Segment* s : by_job[j]) {
            work += s->rate * (s->t1 - s->t0);
            last_end = std::max(last_end, s->t1);
        }
        const double tol = 1e-9 * p;
        if (work < p - tol) {
            report.entries.push_back({Violation::UnderProcessing, describe("job ", j, " received ", work, " of ", p)});
        } else if (work > p + tol) {
            report.entries.push_back({Violation::OverProcessing, describe("job ", j, " received ", work, " of ", p)});
        }
        const std::optional<double> c = j < trace.completion.size() ? trace.completion[j] : std::nullopt;
        if (!c) {
            report.entries.push_back({Violation::MissingCompletion, describe("job ", j, " has no completion time")});
            continue;
        }
        if (std::abs(*c - last_end) > kTolerance * std::max(1.0, *c)) {
            report.entries.push_back(
                {Violation::CompletionMismatch, describe("job ", j, " completes at ", *c, " but last segment ends at ", last_end)});
        }
        for (const Segment* s : by_job[j]) {
            if (s->t0 > *c + kTolerance) {
                report.entries.push_back({Violation::WorkAfterCompletion, describe("job ", j, " runs at ", s->t0, " after ", *c)});
            }
        }
    }
    return report;
}

} // namespace presched
