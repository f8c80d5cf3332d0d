#include "helpers.hpp"

#include <presched/baselines/baselines.hpp>
#include <presched/core/metrics.hpp>
#include <presched/core/validate.hpp>
#include <presched/optimum/optimum.hpp>
#include <presched/pmlf/pmlf.hpp>
#include <presched/snap/snap.hpp>

#include <algorithm>
#include <limits>
#include <numeric>

using namespace presched;
using namespace testutil;

namespace {

double permutation_min(const Matrix& cost) {
    std::vector<std::size_t> perm(cost.cols());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    double best = std::numeric_limits<double>::infinity();
    do {
        double v = 0.0;
        for (std::size_t r = 0; r < cost.rows(); ++r) {
            v += cost(r, perm[r]);
        }
        best = std::min(best, v);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

} // namespace

TEST_SUITE("optimum") {

TEST_CASE("single machine") {
    CHECK(opt_single_machine(single({1, 2, 3})) == 10.0);
    CHECK(opt_single_machine(single({3, 1, 2})) == 10.0);
    CHECK(opt_single_machine(single({5})) == 5.0);
    CHECK(opt_single_machine(single({2, 2})) == 6.0);

    std::vector<Job> weighted = jobs_from({1, 3});
    weighted[1].w = 6.0;
    CHECK(opt_single_machine(Instance::single(weighted)) == 3.0 * 6.0 + 4.0);

    CHECK_THROWS_CODE(opt_single_machine(Instance::identical(2, jobs_from({1, 2}))), Errc::WrongEnvironment);
}

TEST_CASE("unrelated matching examples") {
    CHECK(opt_unrelated_matching(Instance::identical(2, jobs_from({1, 2, 3}))) == 7.0);
    CHECK(opt_unrelated_matching(Instance::identical(2, jobs_from({1, 1}))) == 2.0);
    CHECK(opt_unrelated_matching(single({4, 1, 2})) == opt_single_machine(single({4, 1, 2})));
    CHECK(opt_unrelated_matching(Instance::unrelated(matrix({{1.0, 0.0}, {0.0, 2.0}}), jobs_from({3, 4}))) == 5.0);
}

TEST_CASE("assignment examples") {
    const AssignmentProblem a = min_cost_assignment(matrix({{1, 2}, {2, 1}}));
    CHECK(a.value == 2.0);
    CHECK(a.solution == std::vector<std::size_t>{0, 1});
    CHECK(min_cost_assignment(matrix({{0}})).value == 0.0);

    const double inf = std::numeric_limits<double>::infinity();
    CHECK(min_cost_assignment(matrix({{inf, 1}, {1, inf}})).solution == std::vector<std::size_t>{1, 0});
    CHECK_THROWS_CODE(min_cost_assignment(matrix({{inf, inf}, {1, 2}})), Errc::Infeasible);

    // Rectangular: rows pick distinct columns.
    const AssignmentProblem r = min_cost_assignment(matrix({{5, 1, 9}, {1, 2, 9}}));
    CHECK(r.value == 2.0);
    CHECK(r.solution == std::vector<std::size_t>{1, 0});

    // All-equal costs: lexicographically smallest solution.
    CHECK(min_cost_assignment(Matrix(3, 3, 1.0)).solution == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("assignment matches permutation enumeration") {
    std::mt19937_64 rng(113);
    std::uniform_int_distribution<int> c(0, 9);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + rng() % 5;
        Matrix cost(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                cost(i, j) = c(rng);
            }
        }
        const AssignmentProblem a = min_cost_assignment(cost);
        CHECK(a.value == permutation_min(cost));
        double v = 0.0;
        std::vector<bool> used(n, false);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK_FALSE(used[a.solution[i]]);
            used[a.solution[i]] = true;
            v += cost(i, a.solution[i]);
        }
        CHECK(v == a.value);
    }
}

TEST_CASE("brute force examples and limits") {
    CHECK(brute_force_opt(Instance::identical(3, jobs_from({4}))) == 4.0);
    CHECK(brute_force_opt(Instance::identical(3, jobs_from({4, 2, 7}))) == 13.0);
    CHECK_THROWS_CODE(brute_force_opt(Instance::identical(2, jobs_from({1, 1, 1, 1, 1, 1, 1}))), Errc::TooLarge);
    CHECK_THROWS_CODE(brute_force_opt(Instance::identical(4, jobs_from({1}))), Errc::TooLarge);
}

TEST_CASE("matching equals brute force") {
    std::mt19937_64 rng(127);
    for (int trial = 0; trial < 200; ++trial) {
        const Instance inst = random_unrelated(rng, 1 + rng() % 3, 1 + rng() % 6, 4, 20);
        CHECK(opt_unrelated_matching(inst) == doctest::Approx(brute_force_opt(inst)).epsilon(1e-12));
    }
}

TEST_CASE("srpt") {
    std::vector<Job> jobs = jobs_from({2, 1});
    jobs[1].r = 0.5;
    CHECK(srpt_lower_bound(Instance::single(jobs)) == doctest::Approx(4.5));

    std::vector<Job> one = jobs_from({3});
    one[0].r = 2.0;
    CHECK(srpt_lower_bound(Instance::single(one)) == doctest::Approx(5.0));

    CHECK(srpt_lower_bound(single({3, 1, 2})) == doctest::Approx(10.0));
    CHECK_THROWS_CODE(srpt_lower_bound(Instance::identical(2, jobs_from({1}))), Errc::WrongEnvironment);

    std::mt19937_64 rng(131);
    std::uniform_int_distribution<int> rel(0, 6);
    for (int trial = 0; trial < 60; ++trial) {
        std::vector<Job> js = random_single(rng, 1 + rng() % 3, 6, 1.0).jobs();
        for (Job& j : js) {
            j.r = rel(rng);
        }
        const Instance inst = Instance::single(js);
        CHECK(srpt_lower_bound(inst) == doctest::Approx(brute_force_opt(inst)));
    }
}

TEST_CASE("certificates realize the value") {
    std::mt19937_64 rng(137);
    for (int trial = 0; trial < 50; ++trial) {
        const Instance inst = random_unrelated(rng, 1 + rng() % 4, 1 + rng() % 12, 4, 30);
        const OptSolution sol = solve_opt_unrelated(inst);
        CHECK(validate_trace(inst, sol.certificate).ok());
        CHECK(total_completion(sol.certificate) == doctest::Approx(sol.value));

        const Instance one = random_single(rng, 1 + rng() % 10, 30, 1.0);
        const OptSolution s1 = solve_opt_single_machine(one);
        CHECK(validate_trace(one, s1.certificate).ok());
        CHECK(total_completion(s1.certificate) == doctest::Approx(s1.value));
    }
}

TEST_CASE("monotone in sizes") {
    std::mt19937_64 rng(139);
    for (int trial = 0; trial < 60; ++trial) {
        const Instance inst = random_unrelated(rng, 1 + rng() % 3, 1 + rng() % 6, 4, 20);
        std::vector<double> sizes;
        for (const Job& j : inst.jobs()) {
            sizes.push_back(j.p);
        }
        sizes[rng() % sizes.size()] += 1 + static_cast<double>(rng() % 5);
        CHECK(opt_unrelated_matching(inst.with_sizes(sizes)) >= opt_unrelated_matching(inst));
    }
}

TEST_CASE("non-migratory schedules never beat the optimum") {
    std::mt19937_64 rng(149);
    for (int trial = 0; trial < 30; ++trial) {
        const Instance inst = random_unrelated(rng, 1 + rng() % 3, 1 + rng() % 10, 4, 30, false);
        const double opt = opt_unrelated_matching(inst);
        std::vector<std::unique_ptr<Policy>> policies;
        policies.push_back(blind_policy());
        policies.push_back(doubling_policy());
        policies.push_back(snap_policy());
        for (auto& policy : policies) {
            // The matching optimum is non-preemptive; a migrating schedule may beat it.
            const Trace tr = simulate(inst, *policy);
            if (compute_metrics(inst, tr).migrations == 0) {
                CHECK(total_completion(tr) >= opt - 1e-6);
            }
        }
        const Instance one = random_single(rng, 1 + rng() % 10, 30, 8.0);
        auto pmlf = pmlf_policy(1.0);
        CHECK(total_completion(simulate(one, *pmlf)) >= opt_unrelated_matching(one) - 1e-6);
    }
}

} // TEST_SUITE
