#include <presched/optimum/optimum.hpp>

#include <presched/core/error.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

namespace presched {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Hungarian method with potentials, rows <= cols. Forbidden entries carry a
// large finite penalty and are rejected afterwards.
std::vector<std::size_t> hungarian(const Matrix& cost) {
    const std::size_t n = cost.rows();
    const std::size_t m = cost.cols();
    double largest = 0.0;
    for (double v : cost.data()) {
        if (std::isfinite(v)) {
            largest = std::max(largest, std::abs(v));
        }
    }
    const double big = (largest + 1.0) * static_cast<double>(n + 1) * 4.0;
    auto at = [&](std::size_t r, std::size_t c) {
        const double v = cost(r, c);
        return std::isfinite(v) ? v : big;
    };

    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
    std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(m + 1, kInf);
        std::vector<bool> used(m + 1, false);
        do {
            used[j0] = true;
            const std::size_t i0 = p[j0];
            double delta = kInf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= m; ++j) {
                if (used[j]) {
                    continue;
                }
                const double cur = at(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<std::size_t> row_to_col(n, 0);
    for (std::size_t j = 1; j <= m; ++j) {
        if (p[j] != 0) {
            row_to_col[p[j] - 1] = j - 1;
        }
    }
    for (std::size_t r = 0; r < n; ++r) {
        if (!std::isfinite(cost(r, row_to_col[r]))) {
            throw SchedError(Errc::Infeasible, "no finite assignment exists");
        }
    }
    return row_to_col;
}

double sum_of(const Matrix& cost, const std::vector<std::size_t>& sol) {
    double total = 0.0;
    for (std::size_t r = 0; r < sol.size(); ++r) {
        total += cost(r, sol[r]);
    }
    return total;
}

// Optimal value of rows [first, n) over the columns not in `taken`.
double residual_optimum(const Matrix& cost, std::size_t first, const std::vector<bool>& taken) {
    const std::size_t rows = cost.rows() - first;
    if (rows == 0) {
        return 0.0;
    }
    std::vector<std::size_t> cols;
    for (std::size_t c = 0; c < cost.cols(); ++c) {
        if (!taken[c]) {
            cols.push_back(c);
        }
    }
    if (cols.size() < rows) {
        return kInf;
    }
    Matrix sub(rows, cols.size());
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            sub(r, c) = cost(first + r, cols[c]);
        }
    }
    try {
        return sum_of(sub, hungarian(sub));
    } catch (const SchedError&) {
        return kInf;
    }
}

void require_single(const Instance& instance, const char* what) {
    if (instance.machine_count() != 1) {
        throw SchedError(Errc::WrongEnvironment, std::string(what) + " needs exactly one machine");
    }
}

} // namespace

AssignmentProblem min_cost_assignment(const Matrix& cost, TieBreak tie) {
    if (cost.rows() > cost.cols()) {
        throw SchedError(Errc::Infeasible, "more rows than columns");
    }
    AssignmentProblem out;
    out.cost = cost;
    if (cost.rows() == 0) {
        return out;
    }
    out.solution = hungarian(cost);
    out.value = sum_of(cost, out.solution);
    if (tie == TieBreak::Any) {
        return out;
    }
    const double slack = 1e-9 * std::max(1.0, std::abs(out.value));
    std::vector<bool> taken(cost.cols(), false);
    double fixed = 0.0;
    for (std::size_t r = 0; r < cost.rows(); ++r) {
        for (std::size_t c = 0; c < cost.cols(); ++c) {
            if (taken[c] || !std::isfinite(cost(r, c))) {
                continue;
            }
            if (c == out.solution[r]) {
                break; // the known optimum already extends the prefix
            }
            taken[c] = true;
            const double rest = residual_optimum(cost, r + 1, taken);
            taken[c] = false;
            if (fixed + cost(r, c) + rest <= out.value + slack) {
                // Re-solve the tail so the stored solution stays consistent.
                taken[c] = true;
                std::vector<std::size_t> cols;
                for (std::size_t k = 0; k < cost.cols(); ++k) {
                    if (!taken[k]) {
                        cols.push_back(k);
                    }
                }
                const std::size_t rows = cost.rows() - r - 1;
                if (rows > 0) {
                    Matrix sub(rows, cols.size());
                    for (std::size_t a = 0; a < rows; ++a) {
                        for (std::size_t b = 0; b < cols.size(); ++b) {
                            sub(a, b) = cost(r + 1 + a, cols[b]);
                        }
                    }
                    const auto tail = hungarian(sub);
                    for (std::size_t a = 0; a < rows; ++a) {
                        out.solution[r + 1 + a] = cols[tail[a]];
                    }
                }
                taken[c] = false;
                out.solution[r] = c;
                break;
            }
        }
        taken[out.solution[r]] = true;
        fixed += cost(r, out.solution[r]);
    }
    out.value = sum_of(cost, out.solution);
    return out;
}

OptSolution solve_opt_single_machine(const Instance& instance) {
    require_single(instance, "opt_single_machine");
    if (!instance.all_released_at_zero()) {
        throw SchedError(Errc::InvalidParameter, "opt_single_machine needs all release times equal to 0");
    }
    std::vector<JobIndex> order(instance.job_count());
    std::iota(order.begin(), order.end(), JobIndex{0});
    auto length = [&](JobIndex j) { return instance.job(j).p / instance.rate(0, j); };
    std::stable_sort(order.begin(), order.end(), [&](JobIndex a, JobIndex b) {
        return length(a) * instance.job(b).w < length(b) * instance.job(a).w;
    });
    OptSolution out;
    out.certificate.completion.assign(instance.job_count(), std::nullopt);
    double t = 0.0;
    for (JobIndex j : order) {
        const double t1 = t + length(j);
        out.certificate.segments.push_back(Segment{j, 0, t, t1, instance.rate(0, j)});
        out.certificate.completion[j] = t1;
        out.value += instance.job(j).w * t1;
        t = t1;
    }
    return out;
}

double opt_single_machine(const Instance& instance) { return solve_opt_single_machine(instance).value; }

OptSolution solve_opt_unrelated(const Instance& instance) {
    if (!instance.all_released_at_zero()) {
        throw SchedError(Errc::InvalidParameter, "matching optimum needs all release times equal to 0");
    }
    for (const Job& job : instance.jobs()) {
        if (job.w != 1.0) {
            throw SchedError(Errc::InvalidParameter, "matching optimum needs unit weights");
        }
    }
    const std::size_t n = instance.job_count();
    const std::size_t m = instance.machine_count();
    OptSolution out;
    out.certificate.completion.assign(n, std::nullopt);
    if (n == 0) {
        return out;
    }
    std::vector<MachineIndex> machines;
    for (MachineIndex i = 0; i < m; ++i) {
        for (JobIndex j = 0; j < n; ++j) {
            if (instance.rate(i, j) > 0.0) {
                machines.push_back(i);
                break;
            }
        }
    }
    // Slot (machine a, k) sits at column a * n + (k - 1).
    Matrix cost(n, machines.size() * n, kInf);
    for (JobIndex j = 0; j < n; ++j) {
        bool any = false;
        for (std::size_t a = 0; a < machines.size(); ++a) {
            const double rate = instance.rate(machines[a], j);
            if (rate <= 0.0) {
                continue;
            }
            any = true;
            for (std::size_t k = 1; k <= n; ++k) {
                cost(j, a * n + k - 1) = static_cast<double>(k) * instance.job(j).p / rate;
            }
        }
        if (!any) {
            throw SchedError(Errc::Infeasible, "job " + std::to_string(instance.job(j).id) + " has no usable machine");
        }
    }
    const auto assignment = min_cost_assignment(cost, TieBreak::Any);

    // Each machine runs its jobs shortest first (ties by index). The value is
    // summed in long double and rounded once, so optimal schedules that tie in
    // exact arithmetic (and brute_force_opt) report the same double.
    std::vector<std::vector<JobIndex>> per_machine(machines.size());
    for (JobIndex j = 0; j < n; ++j) {
        per_machine[assignment.solution[j] / n].push_back(j);
    }
    long double value = 0.0;
    for (std::size_t a = 0; a < machines.size(); ++a) {
        const MachineIndex i = machines[a];
        auto& list = per_machine[a];
        std::stable_sort(list.begin(), list.end(), [&](JobIndex x, JobIndex y) {
            return instance.job(x).p / instance.rate(i, x) < instance.job(y).p / instance.rate(i, y);
        });
        double t = 0.0;
        long double exact_t = 0.0;
        long double total = 0.0;
        for (JobIndex j : list) {
            const double rate = instance.rate(i, j);
            const double end = t + instance.job(j).p / rate;
            out.certificate.segments.push_back(Segment{j, i, t, end, rate});
            out.certificate.completion[j] = end;
            t = end;
            exact_t += static_cast<long double>(instance.job(j).p) / rate;
            total += instance.job(j).w * exact_t;
        }
        value += total;
    }
    out.value = static_cast<double>(value);
    return out;
}

double opt_unrelated_matching(const Instance& instance) { return solve_opt_unrelated(instance).value; }

namespace {

double brute_force_static(const Instance& instance) {
    const std::size_t n = instance.job_count();
    const std::size_t m = instance.machine_count();
    const std::size_t subsets = std::size_t{1} << n;
    // best[i][S]: minimum weighted completion of job set S alone on machine i.
    // Sums are kept in long double and rounded once at the end; see
    // solve_opt_unrelated.
    using Wide = long double;
    std::vector<std::vector<Wide>> best(m, std::vector<Wide>(subsets, kInf));
    for (MachineIndex i = 0; i < m; ++i) {
        for (std::size_t s = 0; s < subsets; ++s) {
            std::vector<JobIndex> members;
            bool feasible = true;
            for (JobIndex j = 0; j < n; ++j) {
                if (s >> j & 1U) {
                    members.push_back(j);
                    feasible = feasible && instance.rate(i, j) > 0.0;
                }
            }
            if (!feasible) {
                continue;
            }
            do {
                Wide t = 0.0;
                Wide total = 0.0;
                for (JobIndex j : members) {
                    t += static_cast<Wide>(instance.job(j).p) / instance.rate(i, j);
                    total += instance.job(j).w * t;
                }
                best[i][s] = std::min(best[i][s], total);
            } while (std::next_permutation(members.begin(), members.end()));
        }
    }
    Wide answer = kInf;
    std::vector<std::size_t> mask(m, 0);
    std::function<void(JobIndex)> assign = [&](JobIndex j) {
        if (j == n) {
            Wide total = 0.0;
            for (MachineIndex i = 0; i < m; ++i) {
                total += best[i][mask[i]];
            }
            answer = std::min(answer, total);
            return;
        }
        for (MachineIndex i = 0; i < m; ++i) {
            mask[i] |= std::size_t{1} << j;
            assign(j + 1);
            mask[i] &= ~(std::size_t{1} << j);
        }
    };
    assign(0);
    if (!std::isfinite(answer)) {
        throw SchedError(Errc::Infeasible, "no feasible assignment");
    }
    return static_cast<double>(answer);
}

// Depth-first search over schedules that change assignment only at
// releases and completions.
struct GridSearch {
    const Instance& instance;
    double answer = kInf;

    void explore(double now, std::vector<double> remaining, double accumulated) {
        const std::size_t n = instance.job_count();
        const std::size_t m = instance.machine_count();
        std::vector<JobIndex> alive;
        double next_release = kInf;
        bool pending = false;
        for (JobIndex j = 0; j < n; ++j) {
            if (remaining[j] <= 0.0) {
                continue;
            }
            pending = true;
            if (instance.job(j).r <= now + kTolerance) {
                alive.push_back(j);
            } else {
                next_release = std::min(next_release, instance.job(j).r);
            }
        }
        if (!pending) {
            answer = std::min(answer, accumulated);
            return;
        }
        if (accumulated >= answer) {
            return;
        }
        if (alive.empty()) {
            explore(next_release, std::move(remaining), accumulated);
            return;
        }
        std::vector<JobIndex> run(m, kNoJob);
        std::vector<bool> used(n, false);
        std::function<void(MachineIndex)> choose = [&](MachineIndex i) {
            if (i == m) {
                step(now, remaining, accumulated, run, next_release);
                return;
            }
            run[i] = kNoJob;
            choose(i + 1);
            for (JobIndex j : alive) {
                if (!used[j] && instance.rate(i, j) > 0.0) {
                    used[j] = true;
                    run[i] = j;
                    choose(i + 1);
                    run[i] = kNoJob;
                    used[j] = false;
                }
            }
        };
        choose(0);
    }

    void step(double now, const std::vector<double>& remaining, double accumulated, const std::vector<JobIndex>& run,
              double next_release) {
        double dt = next_release - now;
        bool any = false;
        for (MachineIndex i = 0; i < run.size(); ++i) {
            if (run[i] != kNoJob) {
                any = true;
                dt = std::min(dt, remaining[run[i]] / instance.rate(i, run[i]));
            }
        }
        if (!any) {
            return; // idling until a release never helps with preemption allowed
        }
        std::vector<double> next = remaining;
        double total = accumulated;
        for (MachineIndex i = 0; i < run.size(); ++i) {
            const JobIndex j = run[i];
            if (j == kNoJob) {
                continue;
            }
            next[j] -= instance.rate(i, j) * dt;
            if (next[j] <= work_tolerance(instance.job(j).p)) {
                next[j] = 0.0;
                total += instance.job(j).w * (now + dt);
            }
        }
        explore(now + dt, std::move(next), total);
    }
};

} // namespace

double brute_force_opt(const Instance& instance) {
    const std::size_t n = instance.job_count();
    if (n > 6 || instance.machine_count() > 3) {
        throw SchedError(Errc::TooLarge, "brute force supports n <= 6 and m <= 3");
    }
    if (n == 0) {
        return 0.0;
    }
    if (instance.all_released_at_zero()) {
        return brute_force_static(instance);
    }
    if (n > 3) {
        throw SchedError(Errc::TooLarge, "brute force with release times supports n <= 3");
    }
    GridSearch search{instance};
    std::vector<double> remaining;
    for (const Job& job : instance.jobs()) {
        remaining.push_back(job.p);
    }
    search.explore(0.0, std::move(remaining), 0.0);
    return search.answer;
}

double srpt_lower_bound(const Instance& instance) {
    require_single(instance, "srpt_lower_bound");
    const std::size_t n = instance.job_count();
    std::vector<JobIndex> order(n);
    std::iota(order.begin(), order.end(), JobIndex{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](JobIndex a, JobIndex b) { return instance.job(a).r < instance.job(b).r; });
    std::vector<double> remaining(n);
    for (JobIndex j = 0; j < n; ++j) {
        remaining[j] = instance.job(j).p / instance.rate(0, j);
    }
    std::vector<JobIndex> alive;
    std::size_t next = 0;
    double now = 0.0;
    double total = 0.0;
    std::size_t done = 0;
    while (done < n) {
        while (next < n && instance.job(order[next]).r <= now + kTolerance) {
            alive.push_back(order[next++]);
        }
        if (alive.empty()) {
            now = instance.job(order[next]).r;
            continue;
        }
        const auto it = std::min_element(alive.begin(), alive.end(), [&](JobIndex a, JobIndex b) {
            return remaining[a] != remaining[b] ? remaining[a] < remaining[b] : a < b;
        });
        const JobIndex j = *it;
        double dt = remaining[j];
        if (next < n) {
            dt = std::min(dt, instance.job(order[next]).r - now);
        }
        now += dt;
        remaining[j] -= dt;
        if (remaining[j] <= kTolerance * std::max(1.0, instance.job(j).p)) {
            total += instance.job(j).w * now;
            alive.erase(it);
            ++done;
        }
    }
    return total;
}

} // namespace presched
