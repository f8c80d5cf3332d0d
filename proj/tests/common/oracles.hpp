#pragma once

// Independent reference computations shared by unit and acceptance tests.

#include <presched/core/matrix.hpp>
#include <presched/core/types.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace oracle {

inline double log_objective(const presched::Matrix& rates, const presched::Matrix& x) {
    double total = 0.0;
    for (std::size_t j = 0; j < rates.cols(); ++j) {
        double y = 0.0;
        for (std::size_t i = 0; i < rates.rows(); ++i) {
            y += rates(i, j) * x(i, j);
        }
        if (!(y > 0.0)) {
            return -std::numeric_limits<double>::infinity();
        }
        total += std::log(y);
    }
    return total;
}

inline bool feasible(const presched::Matrix& x) {
    for (std::size_t i = 0; i < x.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < x.cols(); ++j) {
            if (x(i, j) < -1e-15) {
                return false;
            }
            s += x(i, j);
        }
        if (s > 1.0 + 1e-12) {
            return false;
        }
    }
    for (std::size_t j = 0; j < x.cols(); ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.rows(); ++i) {
            s += x(i, j);
        }
        if (s > 1.0 + 1e-12) {
            return false;
        }
    }
    return true;
}

/// Best proportional-fairness objective over x on a grid of step 1/steps
/// (zero-rate cells fixed at 0), refined by compass search with shrinking
/// steps. Meant for m, n <= 3.
inline double pf_grid_search(const presched::Matrix& rates, int steps = 4) {
    const std::size_t m = rates.rows();
    const std::size_t n = rates.cols();
    std::vector<std::pair<std::size_t, std::size_t>> cells;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (rates(i, j) > 0.0) {
                cells.emplace_back(i, j);
            }
        }
    }
    presched::Matrix x(m, n);
    presched::Matrix best_x(m, n);
    double best = -std::numeric_limits<double>::infinity();
    std::vector<int> row_left(m, steps), col_left(n, steps);

    auto recurse = [&](auto&& self, std::size_t k) -> void {
        if (k == cells.size()) {
            const double v = log_objective(rates, x);
            if (v > best) {
                best = v;
                best_x = x;
            }
            return;
        }
        const auto [i, j] = cells[k];
        const int cap = std::min(row_left[i], col_left[j]);
        for (int a = 0; a <= cap; ++a) {
            x(i, j) = static_cast<double>(a) / steps;
            row_left[i] -= a;
            col_left[j] -= a;
            self(self, k + 1);
            row_left[i] += a;
            col_left[j] += a;
        }
        x(i, j) = 0.0;
    };
    recurse(recurse, 0);
    if (!std::isfinite(best)) {
        return best;
    }

    // Compass search: single-cell moves and transfers between two cells.
    x = best_x;
    for (double h = 1.0 / steps; h > 1e-9; h *= 0.5) {
        bool improved = true;
        while (improved) {
            improved = false;
            for (std::size_t a = 0; a < cells.size(); ++a) {
                for (std::size_t b = 0; b <= cells.size(); ++b) {
                    for (double sign : {1.0, -1.0}) {
                        presched::Matrix t = x;
                        t(cells[a].first, cells[a].second) += sign * h;
                        if (b < cells.size() && b != a) {
                            t(cells[b].first, cells[b].second) -= sign * h;
                        } else if (b != cells.size()) {
                            continue;
                        }
                        if (!feasible(t)) {
                            continue;
                        }
                        const double v = log_objective(rates, t);
                        if (v > best + 1e-15) {
                            best = v;
                            x = t;
                            improved = true;
                        }
                    }
                }
            }
        }
    }
    return best;
}

/// Earliest time at which job j has received `amount` work in `trace`, or
/// +infinity if it never does.
inline double time_reaching(const presched::Trace& trace, presched::JobIndex j, double amount) {
    std::vector<presched::Segment> segs;
    for (const auto& s : trace.segments) {
        if (s.job == j) {
            segs.push_back(s);
        }
    }
    std::sort(segs.begin(), segs.end(), [](const auto& a, const auto& b) { return a.t0 < b.t0; });
    double done = 0.0;
    for (const auto& s : segs) {
        const double w = s.rate * (s.t1 - s.t0);
        if (done + w >= amount - 1e-9) {
            return s.t0 + (amount - done) / s.rate;
        }
        done += w;
    }
    return std::numeric_limits<double>::infinity();
}

} // namespace oracle
