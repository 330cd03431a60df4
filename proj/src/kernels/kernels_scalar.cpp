// Scalar reference kernels. Vector variants are tested against these.

#include <cmath>

#include "ptesc/kernels/kernels.hpp"

namespace ptesc::kernels::scalar {

double max_abs_diff(const double* a, const double* b, std::size_t n) noexcept {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = std::fabs(a[i] - b[i]);
        if (d > m) m = d;
    }
    return m;
}

double sum_sq_diff(const double* a, const double* b, std::size_t n) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

double sum(const double* a, std::size_t n) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i];
    return s;
}

void tau_of_t(const double* t, double T, double* out, std::size_t n) noexcept {
    for (std::size_t i = 0; i < n; ++i) out[i] = (t[i] * T) / (T - t[i]);
}

void v_of_t(const double* t, double T, double* out, std::size_t n) noexcept {
    const double T2 = T * T;
    for (std::size_t i = 0; i < n; ++i) {
        const double gap = T - t[i];
        out[i] = (gap * gap) / T2;
    }
}

LinearFitSums linear_fit_sums(const double* x, const double* y, std::size_t n) noexcept {
    LinearFitSums s;
    s.count = static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        s.sx += x[i];
        s.sy += y[i];
        s.sxx += x[i] * x[i];
        s.sxy += x[i] * y[i];
    }
    return s;
}

}  // namespace ptesc::kernels::scalar
