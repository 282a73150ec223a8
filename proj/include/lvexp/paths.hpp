#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace lvexp {

// Discretized Brownian driver on a grid 0 = t_0 < ... < t_M = T.
struct BrownianPath {
    std::vector<double> times;
    std::vector<double> values;  // W(t_i), values[0] = 0

    std::size_t steps() const { return times.empty() ? 0 : times.size() - 1; }
    double horizon() const { return times.back(); }
};

// Compound Poisson realization: sorted jump times in (0, T] with sizes.
struct JumpPath {
    std::vector<double> jump_times;
    std::vector<double> jump_sizes;

    std::size_t count() const { return jump_times.size(); }

    // Sum of jumps with time strictly before t (left limit J_{t-}).
    double sum_before(double t) const {
        double s = 0.0;
        for (std::size_t i = 0; i < jump_times.size() && jump_times[i] < t; ++i) s += jump_sizes[i];
        return s;
    }
    double sum_total() const {
        double s = 0.0;
        for (double j : jump_sizes) s += j;
        return s;
    }
};

// Trapezoidal rule over the path grid for samples f(t_i).
inline double trapezoid(const std::vector<double>& times, const std::vector<double>& f) {
    if (times.size() != f.size() || times.size() < 2) {
        if (times.size() != f.size()) throw std::invalid_argument("trapezoid: size mismatch");
        return 0.0;
    }
    double acc = 0.0;
    for (std::size_t i = 1; i < times.size(); ++i)
        acc += 0.5 * (f[i - 1] + f[i]) * (times[i] - times[i - 1]);
    return acc;
}

// Linear interpolation of the path value at time t.
inline double interp_path(const BrownianPath& p, double t) {
    const auto& ts = p.times;
    if (t <= ts.front()) return p.values.front();
    if (t >= ts.back()) return p.values.back();
    std::size_t lo = 0, hi = ts.size() - 1;
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        (ts[mid] <= t ? lo : hi) = mid;
    }
    double w = (t - ts[lo]) / (ts[hi] - ts[lo]);
    return p.values[lo] + w * (p.values[hi] - p.values[lo]);
}

}  // namespace lvexp
