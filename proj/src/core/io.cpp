#include <presched/core/io.hpp>

#include <presched/core/error.hpp>

#include <algorithm>
#include <fstream>
#include <map>

namespace presched {

namespace {

template <typename T>
T required(const Json& obj, const char* key) {
    if (!obj.contains(key)) {
        throw SchedError(Errc::ParseError, std::string("missing field \"") + key + "\"");
    }
    try {
        return obj.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw SchedError(Errc::ParseError, std::string("field \"") + key + "\": " + e.what());
    }
}

template <typename T>
T optional_field(const Json& obj, const char* key, T fallback) {
    if (!obj.contains(key)) {
        return fallback;
    }
    try {
        return obj.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw SchedError(Errc::ParseError, std::string("field \"") + key + "\": " + e.what());
    }
}

Environment parse_environment(const std::string& name) {
    if (name == "single") return Environment::Single;
    if (name == "identical") return Environment::Identical;
    if (name == "unrelated") return Environment::Unrelated;
    throw SchedError(Errc::ParseError, "unknown environment \"" + name + "\"");
}

} // namespace

Instance instance_from_json(const Json& doc) {
    if (!doc.is_object()) {
        throw SchedError(Errc::ParseError, "instance document must be an object");
    }
    const auto machines = required<std::size_t>(doc, "machines");
    if (!doc.contains("jobs") || !doc.at("jobs").is_array()) {
        throw SchedError(Errc::ParseError, "missing array \"jobs\"");
    }
    const Json& arr = doc.at("jobs");
    std::vector<Job> jobs;
    Matrix rates(machines, arr.size());
    for (std::size_t j = 0; j < arr.size(); ++j) {
        const Json& item = arr[j];
        Job job;
        job.id = required<std::int64_t>(item, "id");
        job.p = required<double>(item, "p");
        job.p_hat = required<double>(item, "p_hat");
        job.r = optional_field<double>(item, "r", 0.0);
        job.w = optional_field<double>(item, "w", 1.0);
        const auto row = required<std::vector<double>>(item, "rates");
        if (row.size() != machines) {
            throw SchedError(Errc::ParseError, "job " + std::to_string(job.id) + " has " + std::to_string(row.size()) +
                                                   " rates for " + std::to_string(machines) + " machines");
        }
        for (std::size_t i = 0; i < machines; ++i) {
            rates(i, j) = row[i];
        }
        jobs.push_back(job);
    }
    Environment env = Environment::Unrelated;
    if (doc.contains("environment")) {
        env = parse_environment(required<std::string>(doc, "environment"));
    } else if (std::all_of(rates.data().begin(), rates.data().end(), [](double v) { return v == 1.0; })) {
        env = machines == 1 ? Environment::Single : Environment::Identical;
    }
    return Instance(std::move(jobs), std::move(rates), env);
}

Json instance_to_json(const Instance& instance) {
    Json jobs = Json::array();
    for (std::size_t j = 0; j < instance.job_count(); ++j) {
        const Job& job = instance.job(j);
        std::vector<double> row(instance.machine_count());
        for (std::size_t i = 0; i < row.size(); ++i) {
            row[i] = instance.rate(i, j);
        }
        jobs.push_back(Json{{"id", job.id}, {"p", job.p}, {"p_hat", job.p_hat}, {"r", job.r}, {"w", job.w}, {"rates", row}});
    }
    return Json{{"machines", instance.machine_count()},
                {"environment", std::string(to_string(instance.environment()))},
                {"jobs", std::move(jobs)}};
}

Trace trace_from_json(const Instance& instance, const Json& doc) {
    std::map<std::int64_t, JobIndex> index;
    for (JobIndex j = 0; j < instance.job_count(); ++j) {
        index[instance.job(j).id] = j;
    }
    auto lookup = [&](std::int64_t id) {
        const auto it = index.find(id);
        if (it == index.end()) {
            throw SchedError(Errc::ParseError, "trace references unknown job id " + std::to_string(id));
        }
        return it->second;
    };
    Trace trace;
    trace.completion.assign(instance.job_count(), std::nullopt);
    for (const Json& s : doc.value("segments", Json::array())) {
        trace.segments.push_back(Segment{lookup(required<std::int64_t>(s, "job")), required<std::size_t>(s, "machine"),
                                         required<double>(s, "t0"), required<double>(s, "t1"), required<double>(s, "rate")});
    }
    for (const Json& c : doc.value("completion", Json::array())) {
        trace.completion[lookup(required<std::int64_t>(c, "job"))] = required<double>(c, "C");
    }
    return trace;
}

Json trace_to_json(const Instance& instance, const Trace& trace) {
    Json segments = Json::array();
    for (const Segment& s : trace.segments) {
        segments.push_back(Json{{"job", instance.job(s.job).id},
                                {"machine", s.machine},
                                {"t0", s.t0},
                                {"t1", s.t1},
                                {"rate", s.rate}});
    }
    Json completion = Json::array();
    for (JobIndex j = 0; j < trace.completion.size(); ++j) {
        if (trace.completion[j]) {
            completion.push_back(Json{{"job", instance.job(j).id}, {"C", *trace.completion[j]}});
        }
    }
    return Json{{"segments", std::move(segments)}, {"completion", std::move(completion)}};
}

Json metrics_to_json(const Instance& instance, const Metrics& metrics) {
    Json per_job = Json::array();
    for (JobIndex j = 0; j < metrics.per_job_completion.size(); ++j) {
        per_job.push_back(Json{{"job", instance.job(j).id},
                               {"C", metrics.per_job_completion[j]},
                               {"preemptions", metrics.preemptions_per_job[j]}});
    }
    Json out{{"total_completion", metrics.total_completion},
             {"preemptions", metrics.preemptions},
             {"migrations", metrics.migrations},
             {"queue_moves", metrics.queue_moves},
             {"d_benchmark", metrics.d_benchmark},
             {"per_job", std::move(per_job)}};
    out["ratio"] = metrics.ratio ? Json(*metrics.ratio) : Json(nullptr);
    return out;
}

Json report_to_json(const ValidationReport& report) {
    Json entries = Json::array();
    for (const auto& e : report.entries) {
        entries.push_back(Json{{"kind", std::string(to_string(e.kind))}, {"detail", e.detail}});
    }
    return Json{{"valid", report.ok()}, {"violations", std::move(entries)}};
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw SchedError(Errc::ParseError, "cannot open " + path.string());
    }
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchedError(Errc::ParseError, path.string() + ": " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const Json& doc) {
    std::ofstream out(path);
    if (!out) {
        throw SchedError(Errc::ParseError, "cannot write " + path.string());
    }
    out << doc.dump(2) << '\n';
}

} // namespace presched
