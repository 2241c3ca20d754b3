#pragma once

#include <cmath>

namespace pathlab {

/// C-infinity step: 1 for s <= 0, 0 for s >= 1.
inline double smooth_step_down(double s) {
    if (s <= 0.0) return 1.0;
    if (s >= 1.0) return 0.0;
    const double a = std::exp(-1.0 / (1.0 - s));
    const double b = std::exp(-1.0 / s);
    return a / (a + b);
}

/// Window that is 1 on |x| <= flat and 0 beyond |x| >= cut.
inline double flat_top_window(double x, double flat, double cut) {
    const double ax = std::abs(x);
    if (ax <= flat) return 1.0;
    if (ax >= cut) return 0.0;
    return smooth_step_down((ax - flat) / (cut - flat));
}

} // namespace pathlab
