#include <presched/pfrates/pfrates.hpp>

#include <presched/core/error.hpp>
#include <presched/optimum/optimum.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

namespace presched {

double pf_objective(const std::vector<double>& y) {
    double total = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j) {
        if (!(y[j] > 0.0)) {
            throw SchedError(Errc::NonpositiveRate, "rate of entry " + std::to_string(j) + " is not positive");
        }
        total += std::log(y[j]);
    }
    return total;
}

PartialMatching lmo_assignment(const Matrix& weights) {
    const std::size_t m = weights.rows();
    const std::size_t n = weights.cols();
    PartialMatching out;
    if (m == 0 || n == 0) {
        return out;
    }
    // Rows of the assignment are the smaller side; r dummy columns stand for
    // "unmatched" at cost 0.
    const bool transpose = m > n;
    const std::size_t r = transpose ? n : m;
    const std::size_t c = transpose ? m : n;
    Matrix cost(r, c + r, 0.0);
    for (std::size_t a = 0; a < r; ++a) {
        for (std::size_t b = 0; b < c; ++b) {
            const double w = transpose ? weights(b, a) : weights(a, b);
            cost(a, b) = w > 0.0 ? -w : 0.0;
        }
    }
    const auto solved = min_cost_assignment(cost, TieBreak::Any);
    for (std::size_t a = 0; a < r; ++a) {
        const std::size_t b = solved.solution[a];
        if (b >= c) {
            continue;
        }
        const std::size_t row = transpose ? b : a;
        const std::size_t col = transpose ? a : b;
        if (weights(row, col) > 0.0) {
            out.pairs.emplace_back(row, col);
            out.value += weights(row, col);
        }
    }
    std::sort(out.pairs.begin(), out.pairs.end());
    return out;
}

namespace {

using Pairs = std::vector<std::pair<MachineIndex, std::size_t>>;

struct Atom {
    Pairs pairs;        // vertex atoms
    bool dense = false; // the starting point
    double weight = 0.0;
};

// Largest step in [0, hi] maximizing sum_j log(y_j + g * d_j).
double line_search(const std::vector<double>& y, const std::vector<double>& d, double hi) {
    auto slope = [&](double g) {
        double s = 0.0;
        for (std::size_t j = 0; j < y.size(); ++j) {
            if (d[j] != 0.0) {
                const double v = y[j] + g * d[j];
                if (v <= 0.0) {
                    return -std::numeric_limits<double>::infinity();
                }
                s += d[j] / v;
            }
        }
        return s;
    };
    if (slope(0.0) <= 0.0) {
        return 0.0;
    }
    if (slope(hi) >= 0.0) {
        return hi;
    }
    double lo = 0.0;
    double up = hi;
    for (int it = 0; it < 200 && up - lo > 1e-15 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + up);
        if (slope(mid) > 0.0) {
            lo = mid;
        } else {
            up = mid;
        }
    }
    return lo;
}

} // namespace

PFRates solve_pf(const Matrix& rates, const std::vector<JobIndex>& active, const PFOptions& options) {
    if (!(options.tol > 0.0)) {
        throw SchedError(Errc::InvalidParameter, "PF tolerance must be positive");
    }
    const std::size_t m = rates.rows();
    const std::size_t n = active.size();
    PFRates out;
    out.active = active;
    out.x = Matrix(m, n, 0.0);
    out.y.assign(n, 0.0);
    if (n == 0) {
        out.converged = true;
        return out;
    }
    for (std::size_t c = 0; c < n; ++c) {
        bool any = false;
        for (MachineIndex i = 0; i < m; ++i) {
            any = any || rates(i, active[c]) > 0.0;
        }
        if (!any) {
            throw SchedError(Errc::InfeasibleJob, "job index " + std::to_string(active[c]) + " has no positive rate");
        }
    }
    auto lambda = [&](MachineIndex i, std::size_t c) { return rates(i, active[c]); };

    // Uniform start on the positive-rate pairs.
    const double share = 1.0 / static_cast<double>(std::max(m, n));
    Matrix x0(m, n, 0.0);
    for (MachineIndex i = 0; i < m; ++i) {
        for (std::size_t c = 0; c < n; ++c) {
            if (lambda(i, c) > 0.0) {
                x0(i, c) = share;
            }
        }
    }
    std::vector<Atom> atoms{Atom{{}, true, 1.0}};
    std::map<Pairs, std::size_t> index;
    Matrix& x = out.x;
    std::vector<double>& y = out.y;

    auto rebuild = [&] {
        x = Matrix(m, n, 0.0);
        for (const Atom& a : atoms) {
            if (a.dense) {
                for (MachineIndex i = 0; i < m; ++i) {
                    for (std::size_t c = 0; c < n; ++c) {
                        x(i, c) += a.weight * x0(i, c);
                    }
                }
            } else {
                for (const auto& [i, c] : a.pairs) {
                    x(i, c) += a.weight;
                }
            }
        }
        std::fill(y.begin(), y.end(), 0.0);
        for (MachineIndex i = 0; i < m; ++i) {
            for (std::size_t c = 0; c < n; ++c) {
                y[c] += lambda(i, c) * x(i, c);
            }
        }
    };
    rebuild();

    Matrix grad(m, n, 0.0);
    std::vector<double> dir(n, 0.0);
    out.objective = pf_objective(y);
    for (int it = 0;; ++it) {
        double inner = 0.0;
        for (MachineIndex i = 0; i < m; ++i) {
            for (std::size_t c = 0; c < n; ++c) {
                grad(i, c) = lambda(i, c) > 0.0 ? lambda(i, c) / y[c] : 0.0;
                inner += grad(i, c) * x(i, c);
            }
        }
        const PartialMatching fw = lmo_assignment(grad);
        out.gap = std::max(0.0, fw.value - inner);
        if (out.gap <= options.tol * static_cast<double>(n)) {
            out.converged = true;
            break;
        }
        if (it >= options.max_iterations) {
            break;
        }

        // Away atom: smallest inner product with the gradient.
        std::size_t away = 0;
        double away_value = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < atoms.size(); ++a) {
            double v = 0.0;
            if (atoms[a].dense) {
                for (MachineIndex i = 0; i < m; ++i) {
                    for (std::size_t c = 0; c < n; ++c) {
                        v += grad(i, c) * x0(i, c);
                    }
                }
            } else {
                for (const auto& [i, c] : atoms[a].pairs) {
                    v += grad(i, c);
                }
            }
            if (v < away_value) {
                away_value = v;
                away = a;
            }
        }

        std::fill(dir.begin(), dir.end(), 0.0);
        for (const auto& [i, c] : fw.pairs) {
            dir[c] += lambda(i, c);
        }
        const Atom& aw = atoms[away];
        if (aw.dense) {
            for (MachineIndex i = 0; i < m; ++i) {
                for (std::size_t c = 0; c < n; ++c) {
                    dir[c] -= lambda(i, c) * x0(i, c);
                }
            }
        } else {
            for (const auto& [i, c] : aw.pairs) {
                dir[c] -= lambda(i, c);
            }
        }
        const double step = line_search(y, dir, aw.weight);
        ++out.iterations;
        if (step <= 0.0) {
            // Pairwise direction is flat: fall back to a plain Frank-Wolfe step.
            for (std::size_t c = 0; c < n; ++c) {
                dir[c] = -y[c];
            }
            for (const auto& [i, c] : fw.pairs) {
                dir[c] += lambda(i, c);
            }
            const double g = line_search(y, dir, 1.0);
            if (g > 0.0) {
                for (Atom& a : atoms) {
                    a.weight *= 1.0 - g;
                }
                const auto found = index.find(fw.pairs);
                if (found != index.end()) {
                    atoms[found->second].weight += g;
                } else {
                    atoms.push_back(Atom{fw.pairs, false, g});
                    index.emplace(fw.pairs, atoms.size() - 1);
                }
                rebuild();
            }
            out.objective = pf_objective(y);
            if (options.record_history) {
                out.history.push_back(out.objective);
            }
            continue;
        }

        // Apply x += step * (fw - away).
        for (const auto& [i, c] : fw.pairs) {
            x(i, c) += step;
        }
        if (aw.dense) {
            for (MachineIndex i = 0; i < m; ++i) {
                for (std::size_t c = 0; c < n; ++c) {
                    x(i, c) -= step * x0(i, c);
                }
            }
        } else {
            for (const auto& [i, c] : aw.pairs) {
                x(i, c) -= step;
            }
        }
        for (std::size_t c = 0; c < n; ++c) {
            y[c] += step * dir[c];
        }

        const bool drop = step >= atoms[away].weight * (1.0 - 1e-12);
        atoms[away].weight = std::max(0.0, atoms[away].weight - step);
        const auto found = index.find(fw.pairs);
        if (found != index.end()) {
            atoms[found->second].weight += step;
        } else {
            atoms.push_back(Atom{fw.pairs, false, step});
            index.emplace(fw.pairs, atoms.size() - 1);
        }
        if (drop) {
            atoms.erase(atoms.begin() + static_cast<std::ptrdiff_t>(away));
            index.clear();
            for (std::size_t a = 0; a < atoms.size(); ++a) {
                if (!atoms[a].dense) {
                    index.emplace(atoms[a].pairs, a);
                }
            }
            rebuild();
        } else if (it % 64 == 63) {
            rebuild();
        }
        const double value = pf_objective(y);
        out.objective = value;
        if (options.record_history) {
            out.history.push_back(value);
        }
    }
    rebuild();
    out.objective = pf_objective(y);
    return out;
}

} // namespace presched
