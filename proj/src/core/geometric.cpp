#include <presched/core/geometric.hpp>

#include <presched/core/error.hpp>

#include <cmath>
#include <string>

namespace presched {

namespace {
constexpr double kSlack = 1e-12;
constexpr int kMaxExponent = 1 << 22;
} // namespace

GeometricScale::GeometricScale(double delta) : delta_(delta) {
    if (!(delta > 0.0) || !std::isfinite(delta)) {
        throw SchedError(Errc::InvalidParameter, "delta must be positive, got " + std::to_string(delta));
    }
    up_.push_back(1.0);
    down_.push_back(1.0);
}

void GeometricScale::grow_up(int k) const {
    if (k > kMaxExponent) {
        throw SchedError(Errc::InvalidParameter, "exponent out of range");
    }
    while (static_cast<int>(up_.size()) <= k) {
        up_.push_back(up_.back() * base());
    }
}

void GeometricScale::grow_down(int k) const {
    if (k > kMaxExponent) {
        throw SchedError(Errc::InvalidParameter, "exponent out of range");
    }
    while (static_cast<int>(down_.size()) <= k) {
        down_.push_back(down_.back() / base());
    }
}

double GeometricScale::power(int k) const {
    if (k >= 0) {
        grow_up(k);
        return up_[static_cast<std::size_t>(k)];
    }
    grow_down(-k);
    return down_[static_cast<std::size_t>(-k)];
}

int GeometricScale::floor_exponent(double x) const {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw SchedError(Errc::InvalidParameter, "exponent search needs a positive finite value");
    }
    const double limit = x * (1.0 + kSlack);
    int k = 0;
    if (power(0) <= limit) {
        while (power(k + 1) <= limit) {
            ++k;
        }
        return k;
    }
    while (power(k) > limit) {
        --k;
    }
    return k;
}

int GeometricScale::ceil_exponent(double x) const {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw SchedError(Errc::InvalidParameter, "exponent search needs a positive finite value");
    }
    const double limit = x * (1.0 - kSlack);
    int k = 0;
    if (power(0) >= limit) {
        while (power(k - 1) >= limit) {
            --k;
        }
        return k;
    }
    while (power(k) < limit) {
        ++k;
    }
    return k;
}

} // namespace presched
