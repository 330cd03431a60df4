// NEON kernels (AArch64, where Advanced SIMD is part of the baseline).

#include <arm_neon.h>

#include <cmath>

#include "ptesc/kernels/kernels.hpp"

namespace ptesc::kernels::neon {

double max_abs_diff(const double* a, const double* b, std::size_t n) noexcept {
    float64x2_t m = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        m = vmaxq_f64(m, vabdq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    }
    double r = vmaxvq_f64(m);
    for (; i < n; ++i) {
        const double d = std::fabs(a[i] - b[i]);
        if (d > r) r = d;
    }
    return r;
}

double sum_sq_diff(const double* a, const double* b, std::size_t n) noexcept {
    float64x2_t s = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t d = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
        s = vfmaq_f64(s, d, d);
    }
    double r = vaddvq_f64(s);
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        r += d * d;
    }
    return r;
}

double sum(const double* a, std::size_t n) noexcept {
    float64x2_t s = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) s = vaddq_f64(s, vld1q_f64(a + i));
    double r = vaddvq_f64(s);
    for (; i < n; ++i) r += a[i];
    return r;
}

void tau_of_t(const double* t, double T, double* out, std::size_t n) noexcept {
    const float64x2_t vT = vdupq_n_f64(T);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t vt = vld1q_f64(t + i);
        vst1q_f64(out + i, vdivq_f64(vmulq_f64(vt, vT), vsubq_f64(vT, vt)));
    }
    for (; i < n; ++i) out[i] = (t[i] * T) / (T - t[i]);
}

void v_of_t(const double* t, double T, double* out, std::size_t n) noexcept {
    const double T2 = T * T;
    const float64x2_t vT = vdupq_n_f64(T);
    const float64x2_t vT2 = vdupq_n_f64(T2);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t gap = vsubq_f64(vT, vld1q_f64(t + i));
        vst1q_f64(out + i, vdivq_f64(vmulq_f64(gap, gap), vT2));
    }
    for (; i < n; ++i) {
        const double gap = T - t[i];
        out[i] = (gap * gap) / T2;
    }
}

LinearFitSums linear_fit_sums(const double* x, const double* y, std::size_t n) noexcept {
    float64x2_t sx = vdupq_n_f64(0.0);
    float64x2_t sy = vdupq_n_f64(0.0);
    float64x2_t sxx = vdupq_n_f64(0.0);
    float64x2_t sxy = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t vx = vld1q_f64(x + i);
        const float64x2_t vy = vld1q_f64(y + i);
        sx = vaddq_f64(sx, vx);
        sy = vaddq_f64(sy, vy);
        sxx = vfmaq_f64(sxx, vx, vx);
        sxy = vfmaq_f64(sxy, vx, vy);
    }
    LinearFitSums s;
    s.count = static_cast<double>(n);
    s.sx = vaddvq_f64(sx);
    s.sy = vaddvq_f64(sy);
    s.sxx = vaddvq_f64(sxx);
    s.sxy = vaddvq_f64(sxy);
    for (; i < n; ++i) {
        s.sx += x[i];
        s.sy += y[i];
        s.sxx += x[i] * x[i];
        s.sxy += x[i] * y[i];
    }
    return s;
}

}  // namespace ptesc::kernels::neon
