#include "helpers.hpp"

#include <presched/core/metrics.hpp>
#include <presched/core/validate.hpp>
#include <presched/snap/snap.hpp>

#include <algorithm>
#include <map>
#include <sstream>

using namespace presched;
using namespace testutil;

namespace {

SimulationResult run(const Instance& inst, std::unique_ptr<Policy> policy, bool decisions = false) {
    SimOptions opt;
    opt.record_decisions = decisions;
    return run_simulation(inst, *policy, opt);
}

int ceil_log(double x, double delta) {
    int k = 0;
    double v = 1.0;
    while (v < x * (1.0 - 1e-12)) {
        v *= 1.0 + delta;
        ++k;
    }
    return k;
}

// Every segment that starts inside an epoch stays on one machine per job.
void check_non_migratory(const Trace& trace, const std::vector<EpochRecord>& epochs) {
    for (const EpochRecord& e : epochs) {
        std::map<JobIndex, MachineIndex> seen;
        for (const Segment& s : trace.segments) {
            if (s.t0 < e.start - 1e-9 || s.t0 >= e.start + e.achieved_length - 1e-9) {
                continue;
            }
            auto [it, fresh] = seen.emplace(s.job, s.machine);
            CHECK_MESSAGE((fresh || it->second == s.machine), "job " << s.job << " migrated in epoch " << e.k);
        }
    }
}

std::size_t total_exhaustions(const std::vector<EpochRecord>& epochs) {
    std::size_t total = 0;
    for (const auto& e : epochs) {
        total += e.exhaustions;
    }
    return total;
}

} // namespace

TEST_SUITE("snap") {

TEST_CASE("checkpoint gaps") {
    CHECK(next_checkpoint_gap(3, 0, 1) == 4.0);
    CHECK(next_checkpoint_gap(3, 5, 1) == 3.0);
    CHECK(next_checkpoint_gap(4, 0, 1) == 4.0);
    CHECK(next_checkpoint_gap(4, 4, 1) == 4.0);
    CHECK(next_checkpoint_gap(1, 0, 1) == 1.0);
    CHECK(next_checkpoint_gap(5, 0, 0.5) == doctest::Approx(5.0625));
    CHECK_THROWS_CODE(next_checkpoint_gap(0.5, 0, 1), Errc::InvalidParameter);
    CHECK_THROWS_CODE(next_checkpoint_gap(2, -1, 1), Errc::InvalidParameter);
    CHECK_THROWS_CODE(next_checkpoint_gap(2, 0, 0), Errc::InvalidParameter);
}

TEST_CASE("gaps are positive and land on powers") {
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> ph(1.0, 200.0), qd(0.0, 300.0);
    for (double delta : {0.25, 1.0, 3.0}) {
        const GeometricScale scale(delta);
        for (int t = 0; t < 500; ++t) {
            const double p_hat = ph(rng);
            const double q = qd(rng);
            const double u = next_checkpoint_gap(p_hat, q, delta);
            CHECK(u > 0.0);
            const double cp = q + u;
            CHECK(cp >= p_hat * (1.0 - 1e-12));
            CHECK(scale.power(scale.ceil_exponent(cp)) == doctest::Approx(cp));
            CHECK(cp / (1.0 + delta) < std::max(p_hat, q) * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("exhaustion target") {
    CHECK(exhaustion_target(0.7, 10) == 7);
    CHECK(exhaustion_target(0.7, 3) == 3);
    CHECK(exhaustion_target(1.0, 5) == 5);
    CHECK(exhaustion_target(1e-6, 5) == 1);
    CHECK(exhaustion_target(0.5, 1) == 1);
}

TEST_CASE("simulation length") {
    auto [l, v] = simulation_length({4, 2, 8}, {1, 1, 2}, 0.7);
    CHECK(l == 4.0);
    CHECK(v == std::vector<double>{4, 2, 8});

    auto [l1, v1] = simulation_length({6}, {3}, 1.0);
    CHECK(l1 == 2.0);
    CHECK(v1 == std::vector<double>{6});

    auto [l2, v2] = simulation_length({4, 2, 8}, {1, 1, 2}, 0.01);
    CHECK(l2 == 2.0);
    CHECK(v2 == std::vector<double>{2, 2, 4});

    CHECK_THROWS_CODE(simulation_length({1}, {1}, 0.0), Errc::InvalidParameter);
    CHECK_THROWS_CODE(simulation_length({1}, {1, 2}, 0.5), Errc::InvalidParameter);
}

TEST_CASE("simulation length matches a sort oracle") {
    std::mt19937_64 rng(67);
    std::uniform_real_distribution<double> d(0.1, 10.0);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 1 + rng() % 12;
        std::vector<double> u(n), y(n), ratio(n);
        for (std::size_t c = 0; c < n; ++c) {
            u[c] = d(rng);
            y[c] = d(rng);
            ratio[c] = u[c] / y[c];
        }
        const double beta = std::uniform_real_distribution<double>(0.05, 1.0)(rng);
        std::sort(ratio.begin(), ratio.end());
        const auto k = static_cast<std::size_t>(std::ceil(beta * n - 1e-9));
        auto [l, v] = simulation_length(u, y, beta);
        CHECK(l == ratio[std::max<std::size_t>(k, 1) - 1]);
        std::size_t full = 0;
        for (std::size_t c = 0; c < n; ++c) {
            CHECK(v[c] <= u[c]);
            full += v[c] == u[c] ? 1 : 0;
        }
        CHECK(full >= std::max<std::size_t>(k, 1));
    }
}

TEST_CASE("plan_epoch") {
    const Matrix rates = matrix({{1.0, 0.0}, {0.0, 1.0}});
    const EpochPlan plan = plan_epoch(rates, {0, 1}, {4, 2}, {0, 0}, 1.0, 1.0);
    CHECK(plan.u == std::vector<double>{4, 2});
    CHECK(plan.length == doctest::Approx(4.0).epsilon(1e-6));
    CHECK(plan.target == 2);
    CHECK(plan.assignment == std::vector<MachineIndex>{0, 1});

    const EpochPlan one = plan_epoch(Matrix(1, 3, 1.0), {0, 1, 2}, {1, 1, 1}, {0, 0, 0}, 1.0, 1.0);
    for (double y : one.pf.y) {
        CHECK(y == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
    }
    CHECK(one.length == doctest::Approx(3.0).epsilon(1e-6));
    CHECK_THROWS_CODE(plan_epoch(rates, {}, {}, {}, 1.0, 1.0), Errc::InvalidParameter);
}

TEST_CASE("dispatch follows the largest rate times share") {
    const Matrix rates = matrix({{1.0, 3.0}, {2.0, 1.0}});
    PFRates pf;
    pf.active = {0, 1};
    pf.x = matrix({{0.0, 1.0}, {1.0, 0.0}});
    CHECK(dispatch_by_rates(rates, pf, {1, 1}) == std::vector<MachineIndex>{1, 0});

    // Equal scores: the machine with less planned time wins.
    const Matrix same(2, 3, 1.0);
    PFRates even;
    even.active = {0, 1, 2};
    even.x = Matrix(2, 3, 0.5);
    CHECK(dispatch_by_rates(same, even, {1, 1, 1}) == std::vector<MachineIndex>{0, 1, 0});
}

TEST_CASE("single job through four checkpoints") {
    SnapParams params;
    params.beta = 1.0;
    const Instance inst = single({8}, {1});
    const auto res = run(inst, snap_policy(params));
    CHECK(*res.trace.completion[0] == doctest::Approx(8.0));
    CHECK(res.stats.epochs.size() == 4);
    CHECK(compute_metrics(inst, res.trace).preemptions == 0);
}

TEST_CASE("pinned jobs finish at their size") {
    const Instance inst = Instance::unrelated(matrix({{1.0, 0.0}, {0.0, 1.0}}), jobs_from({4, 8}));
    const auto res = run(inst, snap_policy());
    CHECK(*res.trace.completion[0] == doctest::Approx(4.0));
    CHECK(*res.trace.completion[1] == doctest::Approx(8.0));
    CHECK(compute_metrics(inst, res.trace).preemptions == 0);
}

TEST_CASE("equal unit jobs on one machine") {
    SnapParams params;
    params.beta = 1.0;
    for (std::size_t n : {1u, 3u, 6u}) {
        std::vector<Job> jobs;
        for (std::size_t j = 0; j < n; ++j) {
            jobs.push_back(Job{static_cast<std::int64_t>(j), 1.0, 1.0, 0.0, 1.0});
        }
        const Instance inst = Instance::single(jobs);
        const auto res = run(inst, snap_policy(params));
        REQUIRE(!res.stats.epochs.empty());
        CHECK(res.stats.epochs[0].alive == n);
        CHECK(res.stats.epochs[0].planned_length == doctest::Approx(static_cast<double>(n)).epsilon(1e-6));
        CHECK(total_completion(res.trace) == doctest::Approx(n * (n + 1) / 2.0));
    }
}

TEST_CASE("parameter errors") {
    SnapParams p;
    p.delta = 0.0;
    CHECK_THROWS_CODE(snap_policy(p), Errc::InvalidParameter);
    p = {};
    p.beta = 1.5;
    CHECK_THROWS_CODE(snap_policy(p), Errc::InvalidParameter);
    p = {};
    p.tol = 0.0;
    CHECK_THROWS_CODE(snap_policy(p), Errc::InvalidParameter);
    CHECK_THROWS_CODE(snap_two_stage_policy({}, 1, 0.0), Errc::InvalidParameter);
    CHECK_THROWS_CODE(hybrid_snap_policy(0.5), Errc::InvalidParameter);
    CHECK_THROWS_CODE(hybrid_snap_policy(1.0, {}, 0), Errc::InvalidParameter);
}

TEST_CASE("two-stage with g = 0 equals SNAP") {
    std::mt19937_64 rng(71);
    for (int t = 0; t < 15; ++t) {
        const Instance inst = random_unrelated(rng, 3, 8, 4, 30, false);
        const auto a = run(inst, snap_policy(), true);
        const auto b = run(inst, snap_two_stage_policy({}, 0, 0.5), true);
        CHECK(a.decisions == b.decisions);
        CHECK(b.stats.resets.empty());
    }
}

TEST_CASE("two-stage reset threshold and new predictions") {
    std::mt19937_64 rng(73);
    const GeometricScale scale(1.0);
    for (int t = 0; t < 15; ++t) {
        std::vector<Job> jobs;
        for (std::size_t j = 0; j < 10; ++j) {
            const double p = 1 + static_cast<double>(rng() % 20);
            // Half the jobs are overpredicted.
            const double p_hat = j % 2 == 0 ? 4.0 * p : p;
            jobs.push_back(Job{static_cast<std::int64_t>(j), p, p_hat, 0.0, 1.0});
        }
        const Instance inst = Instance::identical(2, jobs);
        const auto res = run(inst, snap_two_stage_policy({}, 2, 0.5));
        CHECK(validate_trace(inst, res.trace).ok());
        bool fired = false;
        for (const EpochRecord& e : res.stats.epochs) {
            if (e.prediction_reset) {
                CHECK_FALSE(fired);
                fired = true;
                CHECK(e.alive <= 4);
            } else if (!fired) {
                CHECK(e.alive > 4);
            }
        }
        CHECK(fired);
        for (const PredictionReset& r : res.stats.resets) {
            if (r.processed > 0.0) {
                CHECK(r.new_prediction >= r.processed);
                CHECK(r.new_prediction / 2.0 < r.processed);
                CHECK(scale.power(scale.ceil_exponent(r.new_prediction)) == r.new_prediction);
            } else {
                CHECK(r.new_prediction == 1.0);
            }
        }
    }
}

TEST_CASE("hybrid: first milestone sends the job to SNAP") {
    const Instance inst = single({8}, {1});
    const auto res = run(inst, hybrid_snap_policy(1.0));
    REQUIRE(!res.stats.epochs.empty());
    CHECK(res.stats.epochs.front().start == doctest::Approx(2.0));
    CHECK(*res.trace.completion[0] == doctest::Approx(8.0));
}

TEST_CASE("hybrid: exact predictions never reach SNAP") {
    std::mt19937_64 rng(79);
    for (int t = 0; t < 10; ++t) {
        const Instance inst = random_unrelated(rng, 3, 10, 4, 30, true);
        const auto res = run(inst, hybrid_snap_policy(1.0));
        CHECK(res.stats.epochs.empty());
        CHECK(res.stats.redispatches == 0);
        CHECK(compute_metrics(inst, res.trace).preemptions == 0);
    }
}

TEST_CASE("hybrid: milestone count controls the switch") {
    const Instance inst = single({40}, {1});
    const auto two = run(inst, hybrid_snap_policy(1.0, {}, 2));
    REQUIRE(!two.stats.epochs.empty());
    CHECK(two.stats.epochs.front().start == doctest::Approx(4.0));
    CHECK(two.stats.redispatches == 1);
}

TEST_CASE("experimental mode invariants") {
    std::mt19937_64 rng(83);
    for (double beta : {0.3, 0.7, 1.0}) {
        for (double delta : {0.5, 1.0}) {
            for (int t = 0; t < 8; ++t) {
                const std::size_t m = 1 + rng() % 4;
                const std::size_t n = 1 + rng() % 14;
                Instance inst = random_unrelated(rng, m, n, 4, 60, false);
                SnapParams params;
                params.beta = beta;
                params.delta = delta;
                const auto res = run(inst, snap_policy(params));
                REQUIRE(validate_trace(inst, res.trace).ok());
                const auto& epochs = res.stats.epochs;
                for (std::size_t k = 0; k < epochs.size(); ++k) {
                    if (k + 1 < epochs.size()) {
                        CHECK(epochs[k].exhaustions >= epochs[k].target_exhaustions);
                        CHECK(epochs[k].start + epochs[k].achieved_length == doctest::Approx(epochs[k + 1].start));
                    }
                    CHECK(epochs[k].target_exhaustions == exhaustion_target(beta, epochs[k].alive));
                }
                check_non_migratory(res.trace, epochs);
                for (std::size_t j = 0; j < n; ++j) {
                    const Job& job = inst.jobs()[j];
                    CHECK(res.stats.queue_moves_per_job[j] <= ceil_log(job.p / job.p_hat, delta) + 1);
                }
                const Metrics metrics = compute_metrics(inst, res.trace, std::nullopt, &res.stats);
                // Within an epoch a job stops at a queue move or at the epoch end.
                std::size_t budget = 0;
                for (const auto& e : epochs) {
                    budget += e.alive;
                }
                CHECK(metrics.preemptions <= metrics.queue_moves + static_cast<std::int64_t>(budget));
                double bound = 0.0;
                for (const Job& job : inst.jobs()) {
                    bound += ceil_log(job.p / job.p_hat, delta) + 1;
                }
                CHECK(static_cast<double>(metrics.preemptions) <= bound / beta);
                CHECK(static_cast<double>(epochs.size()) <= total_exhaustions(epochs) / beta + 1e-9);
            }
        }
    }
}

TEST_CASE("exact power predictions exhaust each job once") {
    std::mt19937_64 rng(89);
    for (int t = 0; t < 20; ++t) {
        const std::size_t n = 1 + rng() % 12;
        std::vector<Job> jobs;
        for (std::size_t j = 0; j < n; ++j) {
            const double p = std::pow(2.0, static_cast<double>(rng() % 7));
            jobs.push_back(Job{static_cast<std::int64_t>(j), p, p, 0.0, 1.0});
        }
        Matrix rates(3, n);
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                rates(i, j) = 1.0 + static_cast<double>(rng() % 3);
            }
        }
        const Instance inst = Instance::unrelated(rates, jobs);
        const auto res = run(inst, snap_policy());
        CHECK(total_exhaustions(res.stats.epochs) == n);
    }
}

TEST_CASE("greedy step-4 mode") {
    std::mt19937_64 rng(97);
    SnapParams params;
    params.mode = SnapMode::GreedyStep4;
    for (int t = 0; t < 20; ++t) {
        const Instance inst = random_unrelated(rng, 1 + rng() % 3, 1 + rng() % 10, 4, 40, false);
        const auto res = run(inst, snap_policy(params));
        REQUIRE(validate_trace(inst, res.trace).ok());
        check_non_migratory(res.trace, res.stats.epochs);
        // Each job runs at most once per epoch, so it is stopped at most once.
        for (const EpochRecord& e : res.stats.epochs) {
            std::map<JobIndex, int> pieces;
            for (const Segment& s : coalesce_segments(res.trace)) {
                if (s.t0 >= e.start - 1e-9 && s.t0 < e.start + e.achieved_length - 1e-9) {
                    ++pieces[s.job];
                }
            }
            for (auto [job, count] : pieces) {
                CHECK(count == 1);
            }
            CHECK(e.achieved_length >= 0.0);
        }
    }
}

TEST_CASE("epoch csv") {
    EpochRecord e;
    e.k = 1;
    e.start = 0.0;
    e.alive = 3;
    e.planned_length = 2.5;
    e.achieved_length = 3.0;
    e.exhaustions = 3;
    e.preemptions = 1;
    std::ostringstream out;
    write_epoch_csv(out, {e});
    CHECK(out.str() == "k,e_k,n_k,l_k,achieved_length,exhaustions,preemptions_in_epoch\n1,0,3,2.5,3,3,1\n");
}

} // TEST_SUITE
