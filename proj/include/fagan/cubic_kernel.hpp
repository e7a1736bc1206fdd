#pragma once

// Keys cubic convolution kernel, a = -0.5. Interpolating (weight 1 at t=0,
// 0 at other integers) and a partition of unity at every sampling phase.

#include <cmath>

namespace fagan {

inline double cubic_weight(double t, double a = -0.5) {
    t = std::abs(t);
    if (t < 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
    if (t < 2.0) return (((t - 5.0) * t + 8.0) * t - 4.0) * a;
    return 0.0;
}

}  // namespace fagan
