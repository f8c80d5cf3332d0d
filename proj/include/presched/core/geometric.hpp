#pragma once

#include <vector>

namespace presched {

/// Integer powers of (1 + delta), built by repeated multiplication so that
/// every caller sees bit-identical checkpoint values.
///
/// Exponent searches accept a relative slack of 1e-12 so that a processed
/// amount snapped onto a power is classified as reaching it.
/// The table grows lazily; an instance is confined to one simulation run.
class GeometricScale {
public:
    explicit GeometricScale(double delta);

    double delta() const noexcept { return delta_; }
    double base() const noexcept { return 1.0 + delta_; }

    /// (1 + delta)^k for any integer k.
    double power(int k) const;

    /// Largest k with (1 + delta)^k <= x. Requires x > 0.
    int floor_exponent(double x) const;

    /// Smallest k with (1 + delta)^k >= x. Requires x > 0.
    int ceil_exponent(double x) const;

private:
    void grow_up(int k) const;
    void grow_down(int k) const;

    double delta_;
    mutable std::vector<double> up_;   // up_[k] = base^k
    mutable std::vector<double> down_; // down_[k] = base^-k
};

} // namespace presched
