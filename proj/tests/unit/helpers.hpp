#pragma once

#include <presched/core/error.hpp>
#include <presched/core/simulate.hpp>
#include <presched/core/types.hpp>

#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace testutil {

using namespace presched;

inline std::vector<Job> jobs_from(std::initializer_list<double> p, std::initializer_list<double> p_hat = {}) {
    std::vector<Job> jobs;
    std::int64_t id = 0;
    auto ph = p_hat.begin();
    for (double size : p) {
        Job job;
        job.id = id++;
        job.p = size;
        job.p_hat = ph != p_hat.end() ? *ph++ : size;
        jobs.push_back(job);
    }
    return jobs;
}

inline Instance single(std::initializer_list<double> p, std::initializer_list<double> p_hat = {}) {
    return Instance::single(jobs_from(p, p_hat));
}

inline Matrix matrix(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r ? rows.begin()->size() : 0;
    Matrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
        std::size_t j = 0;
        for (double v : row) {
            m(i, j++) = v;
        }
        ++i;
    }
    return m;
}

/// Random single-machine instance with integer sizes and underestimated
/// predictions p_hat = ceil(p / xi), xi uniform on [1, R].
inline Instance random_single(std::mt19937_64& rng, std::size_t n, int pmax, double R) {
    std::uniform_int_distribution<int> size(1, pmax);
    std::uniform_real_distribution<double> xi(1.0, R);
    std::vector<Job> jobs;
    for (std::size_t j = 0; j < n; ++j) {
        Job job;
        job.id = static_cast<std::int64_t>(j);
        job.p = size(rng);
        job.p_hat = std::ceil(job.p / (R > 1.0 ? xi(rng) : 1.0));
        jobs.push_back(job);
    }
    return Instance::single(std::move(jobs));
}

/// Random unrelated instance with integer rates in [0, lmax] (each job gets
/// at least one positive rate) and integer sizes.
inline Instance random_unrelated(std::mt19937_64& rng, std::size_t m, std::size_t n, int lmax, int pmax,
                                 bool exact_predictions = true) {
    std::uniform_int_distribution<int> rate(0, lmax);
    std::uniform_int_distribution<int> size(1, pmax);
    Matrix rates(m, n);
    std::vector<Job> jobs;
    for (std::size_t j = 0; j < n; ++j) {
        bool any = false;
        for (std::size_t i = 0; i < m; ++i) {
            rates(i, j) = rate(rng);
            any = any || rates(i, j) > 0.0;
        }
        if (!any) {
            rates(std::uniform_int_distribution<std::size_t>(0, m - 1)(rng), j) = 1.0;
        }
        Job job;
        job.id = static_cast<std::int64_t>(j);
        job.p = size(rng);
        job.p_hat = exact_predictions ? job.p : std::uniform_int_distribution<int>(1, static_cast<int>(job.p))(rng);
        jobs.push_back(job);
    }
    return Instance::unrelated(std::move(rates), std::move(jobs));
}

inline double total_completion(const Trace& trace) {
    double total = 0.0;
    for (const auto& c : trace.completion) {
        REQUIRE(c.has_value());
        total += *c;
    }
    return total;
}

#define CHECK_THROWS_CODE(expr, errc)                                                                                  \
    do {                                                                                                               \
        bool thrown_ = false;                                                                                          \
        try {                                                                                                          \
            (void)(expr);                                                                                              \
        } catch (const ::presched::SchedError& e_) {                                                                   \
            thrown_ = true;                                                                                            \
            CHECK(e_.code() == (errc));                                                                                \
        }                                                                                                              \
        CHECK_MESSAGE(thrown_, "expected SchedError from " #expr);                                                    \
    } while (false)

} // namespace testutil
