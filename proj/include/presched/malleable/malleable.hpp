#pragma once

#include <cstddef>
#include <vector>

namespace presched {

/// Piecewise linear speedup with breakpoints at 0, 1, 2, ...; values[k] is
/// f(k). Past the last breakpoint the last slope continues.
class SpeedupFunction {
public:
    /// Throws InvalidSpeedup unless f(0) = 0, f(1) > 0, and the values are
    /// non-decreasing and concave.
    explicit SpeedupFunction(std::vector<double> values);

    static SpeedupFunction identity();

    const std::vector<double>& values() const noexcept { return values_; }

private:
    std::vector<double> values_;
};

/// f(s) by interpolation. Throws NegativeArgument for s < 0.
double speedup_eval(const SpeedupFunction& f, double s);

struct MalleableSlot {
    std::vector<std::size_t> machines;
    double start = 0.0;
    double end = 0.0;
    double work = 0.0; ///< f(x) L
};

struct MalleablePlan {
    std::vector<MalleableSlot> jobs;
    double makespan = 0.0;
};

/// Jobs with x >= 1 keep floor(x) machines from time 0 until their f(x) L
/// work is done; the others run on one machine each, list scheduled longest
/// first on the m - floor(sum of those x) machines left over. No job is
/// split. Throws CapacityExceeded when sum x > m, InvalidParameter on a bad
/// L, m or size mismatch.
MalleablePlan round_malleable_identical(const std::vector<double>& x, const std::vector<SpeedupFunction>& f, double L,
                                        std::size_t m);

} // namespace presched
