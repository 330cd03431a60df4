#pragma once

// Independent reference values for the fed-batch bioreactor
//
//   x1' = mu(x2) x1 - u x1
//   x2' = -2 mu(x2) x1 + u (10 - x2)      mu(s) = s/(0.2 + s)
//   y   = -mu(x2) x1
//
// At an open-loop steady state mu(x2) = u, so x2 = 0.2u/(1 - u) and
// x1 = (10 - x2)/2, giving the closed-form steady-state cost
//   l(u) = -u (10 - 0.2u/(1 - u))/2.
// Nothing here calls into the library.

#include <cmath>
#include <utility>

namespace oracle::bioreactor {

inline double x2_ss(double u) { return 0.2 * u / (1.0 - u); }
inline double x1_ss(double u) { return (10.0 - x2_ss(u)) / 2.0; }
inline double mu(double s) { return s / (0.2 + s); }

inline double steady_cost(double u) { return -u * (10.0 - x2_ss(u)) / 2.0; }

/// dl/du, differentiated by hand.
inline double steady_cost_slope(double u) {
    const double w = 1.0 - u;
    return -(10.0 - 0.2 * (2.0 * u - u * u) / (w * w)) / 2.0;
}

/// Stationarity 51u^2 - 102u + 50 = 0, root inside (0, 1).
inline double u_star_closed_form() { return (102.0 - std::sqrt(204.0)) / 102.0; }

/// Grid search over (0, 1) followed by bisection on the sign of dl/du.
inline double u_star_search() {
    constexpr int kGrid = 10000;
    double best_u = 0.5;
    double best = steady_cost(best_u);
    for (int i = 1; i < kGrid; ++i) {
        const double u = static_cast<double>(i) / kGrid;
        const double c = steady_cost(u);
        if (c < best) {
            best = c;
            best_u = u;
        }
    }
    double lo = best_u - 1.0 / kGrid;
    double hi = best_u + 1.0 / kGrid;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (steady_cost_slope(mid) < 0.0) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

/// Rates of the plant, written out independently of the library.
inline std::pair<double, double> rhs(double x1, double x2, double u) {
    const double m = mu(x2);
    return {m * x1 - u * x1, -2.0 * m * x1 + u * (10.0 - x2)};
}

inline double cost(double x1, double x2) { return -mu(x2) * x1; }

/// dh/dx . g for g = (-x1, 10 - x2).
inline double lgh(double x1, double x2) {
    const double d1 = -mu(x2);
    const double d2 = -x1 * 0.2 / ((0.2 + x2) * (0.2 + x2));
    return d1 * (-x1) + d2 * (10.0 - x2);
}

struct SteadyState {
    double x1;
    double x2;
};

inline double residual_x1(double x1, double x2, double u, double k) {
    const double ueff = u - k * lgh(x1, x2);
    return mu(x2) * x1 - ueff * x1;
}

inline double residual_x2(double x1, double x2, double u, double k) {
    const double ueff = u - k * lgh(x1, x2);
    return -2.0 * mu(x2) * x1 + ueff * (10.0 - x2);
}

/// Steady state of the target residual f + g (u - k L_g h) = 0. For each x2
/// on a grid the substrate balance is solved for x1 by bisection; the biomass
/// balance is then bisected along that curve.
inline SteadyState steady_state(double u, double k) {
    auto x1_for = [&](double x2) {
        double lo = 1e-6, hi = 20.0;
        double flo = residual_x2(lo, x2, u, k);
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double fm = residual_x2(mid, x2, u, k);
            if ((fm < 0.0) == (flo < 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    };
    auto g = [&](double x2) {
        const double x1 = x1_for(x2);
        return residual_x1(x1, x2, u, k) / x1;
    };
    constexpr int kGrid = 2000;
    double prev_x2 = 0.01;
    double prev = g(prev_x2);
    for (int i = 1; i <= kGrid; ++i) {
        const double x2 = 0.01 + 9.49 * i / kGrid;
        const double cur = g(x2);
        if ((cur < 0.0) != (prev < 0.0)) {
            double lo = prev_x2, hi = x2, flo = prev;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = g(mid);
                if ((fm < 0.0) == (flo < 0.0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            const double root = 0.5 * (lo + hi);
            return {x1_for(root), root};
        }
        prev_x2 = x2;
        prev = cur;
    }
    return {std::nan(""), std::nan("")};
}

}  // namespace oracle::bioreactor
