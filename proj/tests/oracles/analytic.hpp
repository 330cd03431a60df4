#pragma once

// Closed-form references that do not depend on the library.

#include <cmath>
#include <vector>

namespace oracle {

/// z' = -z, z(0) = 1.
inline double decay(double t) { return std::exp(-t); }

namespace scalar_quadratic {

// x' = -x + u, y = (x - 1)^2, L_g h = 2(x - 1).

/// Root of -x + u - 2k(x - 1) = 0.
inline double steady_state(double u, double k) { return (u + 2.0 * k) / (1.0 + 2.0 * k); }
inline double lgh(double x) { return 2.0 * (x - 1.0); }
inline double cost(double x) { return (x - 1.0) * (x - 1.0); }

}  // namespace scalar_quadratic

namespace general_nonlinear {

// x1' = -x1 + x2^2, x2' = -x1 + x2 + u, y = 1 + x1^2 + x2^2.

inline std::vector<double> rhs(double x1, double x2, double u) {
    return {-x1 + x2 * x2, -x1 + x2 + u};
}
inline double cost(double x1, double x2) { return 1.0 + x1 * x1 + x2 * x2; }
inline double lgh(double, double x2) { return 2.0 * x2; }
inline double lfh(double x1, double x2) {
    return 2.0 * x1 * (-x1 + x2 * x2) + 2.0 * x2 * (-x1 + x2);
}

}  // namespace general_nonlinear

/// Least-squares slope of y against x.
inline double fitted_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace oracle
