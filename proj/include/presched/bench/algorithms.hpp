#pragma once

#include <presched/core/policy.hpp>
#include <presched/core/simulate.hpp>
#include <presched/snap/snap.hpp>

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace presched {

struct AlgoParams {
    double delta = 1.0;
    double beta = 0.7;
    std::size_t g = 0;
    double epsilon = 0.5;
    double gamma = 0.5;
    double quantum = 1.0;
    double growth = 2.0;
    int milestones = 1;
    double tol = 1e-7;
    SnapMode mode = SnapMode::Experimental;
};

/// Names accepted by make_policy.
const std::vector<std::string>& algorithm_names();

/// Builds a policy from its name: pmlf, pmlf-adapted, snap, snap-greedy,
/// snap-2stage, hybrid:C, blind, doubling, rr. "pmlf" picks the identical
/// machines variant when `machines` > 1. Throws InvalidParameter on an
/// unknown name.
std::unique_ptr<Policy> make_policy(const std::string& name, const AlgoParams& params, std::size_t machines);

struct RunOutcome {
    SimulationResult result;
    Metrics metrics;
    double runtime_ms = 0.0;
};

/// Simulates, validates and measures one algorithm on one instance.
RunOutcome run_algorithm(const Instance& instance, const std::string& name, const AlgoParams& params,
                         std::optional<double> opt = std::nullopt);

} // namespace presched
