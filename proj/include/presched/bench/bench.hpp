#pragma once

#include <presched/bench/algorithms.hpp>
#include <presched/core/io.hpp>
#include <presched/core/types.hpp>

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace presched {

struct GenConfig {
    std::size_t m = 10;
    std::size_t n = 100;
    double special_job_frac = 0.2;
    std::size_t special_machine_count = 2;
    int regular_min = 1;
    int regular_max = 10;
    int special_min = 1;
    int special_max = 200;
    double R = 1.0;
    std::uint64_t seed = 0;
    /// Each special job draws its own machine set instead of sharing
    /// machines 0 .. special_machine_count - 1.
    bool per_job_special_machines = false;
};

/// Integer sizes; floor(frac * n) randomly chosen special jobs run only on
/// the special machines. Predictions come from gen_predictions with cfg.R
/// and a seed derived from cfg.seed. Throws InvalidConfig.
Instance gen_instance(const GenConfig& cfg);

/// max(1, ceil(p / xi)).
double prediction_from_xi(double p, double xi);

/// p_hat_j = ceil(p_j / xi_j) with xi_j = 1 + (R - 1) u_j and u_j uniform on
/// [0, 1). The u_j depend only on the seed, so sweeps over R reuse them.
/// Throws InvalidParameter when R < 1.
std::vector<double> gen_predictions(const Instance& instance, double R, std::uint64_t seed);

/// Seed for gen_predictions paired with an instance seed.
std::uint64_t prediction_seed(std::uint64_t instance_seed);

enum class SweepAxis { R, Beta, Delta, SpecialFrac, HybridC };

std::string to_string(SweepAxis axis);
SweepAxis parse_axis(const std::string& name);

struct SweepConfig {
    SweepAxis axis = SweepAxis::R;
    std::vector<double> values;
    std::vector<std::string> algorithms;
    std::size_t trials = 1;
    GenConfig base;
    AlgoParams params;
    double hybrid_c = 4.0;
    bool timing = true; ///< false writes runtime_ms = 0 for byte-stable output
};

SweepConfig sweep_from_json(const Json& doc);

struct ResultRow {
    std::string algorithm;
    SweepAxis axis = SweepAxis::R;
    double axis_value = 0.0;
    std::uint64_t seed = 0;
    double total = 0.0;
    double opt = 0.0;
    double ratio = 0.0;
    double preempt_per_job = 0.0;
    double migrate_per_job = 0.0;
    double queue_moves_per_job = 0.0;
    double d_bench = 0.0;
    double runtime_ms = 0.0;
    std::optional<std::string> error;
};

/// Every (axis value, algorithm, trial) combination; trial t uses instance
/// seed base.seed + t. Rows come back in that order whatever `threads` is.
/// A failing run yields a row with `error` set.
std::vector<ResultRow> run_sweep(const SweepConfig& cfg, std::size_t threads = 1);

inline constexpr const char* kCsvHeader =
    "algorithm,axis,axis_value,seed,total,opt,ratio,preempt_per_job,migrate_per_job,queue_moves_per_job,d_bench,"
    "runtime_ms";

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows);

} // namespace presched
