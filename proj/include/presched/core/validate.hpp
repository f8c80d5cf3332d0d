#pragma once

#include <presched/core/types.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace presched {

enum class Violation {
    UnknownJob,
    UnknownMachine,
    NonPositiveLength,
    MachineOverlap,
    JobOverlap,
    RateMismatch,
    PreReleaseWork,
    WorkAfterCompletion,
    UnderProcessing,
    OverProcessing,
    CompletionMismatch,
    MissingCompletion,
};

std::string_view to_string(Violation v) noexcept;

struct ValidationEntry {
    Violation kind;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationEntry> entries;

    bool ok() const noexcept { return entries.empty(); }
    bool has(Violation kind) const noexcept;
};

/// Checks a trace against the instance. Violations are collected, never thrown.
ValidationReport validate_trace(const Instance& instance, const Trace& trace);

} // namespace presched
