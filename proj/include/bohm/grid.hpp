#pragma once

#include <cmath>

#include "errors.hpp"

namespace bohm {

struct Interval {
    double lo = 0.0;
    double hi = 1.0;

    double width() const { return hi - lo; }
    bool contains(double x) const { return x >= lo && x <= hi; }
};

// Uniform discrete times t_n = t0 + n*dt for n = 0..steps, endpoints included.
struct TimeGrid {
    double t0 = 0.0;
    double dt = 0.1;
    long steps = 1;

    double time(long n) const { return t0 + n * dt; }
    double t_end() const { return time(steps); }
    long size() const { return steps + 1; }
};

// Builds the grid covering [t0, t1]. The step count must land on t1 to
// within dt/2, i.e. dt has to (approximately) divide the range.
inline TimeGrid make_time_grid(double t0, double t1, double dt) {
    if (!(dt > 0.0)) throw validation_error("time step must be positive");
    if (!(t1 > t0)) throw validation_error("time range needs t1 > t0");
    long steps = std::lround((t1 - t0) / dt);
    if (steps < 1) steps = 1;
    if (std::abs(t0 + steps * dt - t1) > 0.5 * dt)
        throw validation_error("dt does not divide the time range: endpoint misses t1 by more than dt/2");
    return TimeGrid{t0, dt, steps};
}

inline bool same_grid(const TimeGrid& a, const TimeGrid& b, double tol = 1e-9) {
    return a.steps == b.steps && std::abs(a.t0 - b.t0) <= tol && std::abs(a.dt - b.dt) <= tol;
}

} // namespace bohm
