#pragma once

#include <presched/core/metrics.hpp>
#include <presched/core/types.hpp>
#include <presched/core/validate.hpp>

#include <json.hpp>

#include <filesystem>
#include <string>

namespace presched {

using Json = nlohmann::json;

/// Instance document:
///   { "machines": m, "environment": "single"|"identical"|"unrelated" (optional),
///     "jobs": [ { "id", "p", "p_hat", "r", "w", "rates": [m numbers] } ] }
/// "r" and "w" default to 0 and 1. Without "environment" the loader picks
/// single/identical when every rate is 1, unrelated otherwise.
Instance instance_from_json(const Json& doc);
Json instance_to_json(const Instance& instance);

/// Trace document, jobs referenced by external id:
///   { "segments": [ { "job", "machine", "t0", "t1", "rate" } ],
///     "completion": [ { "job", "C" } ] }
Trace trace_from_json(const Instance& instance, const Json& doc);
Json trace_to_json(const Instance& instance, const Trace& trace);

Json metrics_to_json(const Instance& instance, const Metrics& metrics);
Json report_to_json(const ValidationReport& report);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& doc);

} // namespace presched
