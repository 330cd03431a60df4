// AVX2 + FMA kernels. This translation unit is compiled with -mavx2 -mfma and
// must only be entered after a runtime CPU check.

#include <immintrin.h>

#include <cmath>

#include "ptesc/kernels/kernels.hpp"

namespace ptesc::kernels::avx2 {

namespace {

inline double hsum(__m256d v) noexcept {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline double hmax(__m256d v) noexcept {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d m = _mm_max_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_max_sd(m, _mm_unpackhi_pd(m, m)));
}

inline __m256d abs_pd(__m256d v) noexcept {
    return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

}  // namespace

double max_abs_diff(const double* a, const double* b, std::size_t n) noexcept {
    __m256d m0 = _mm256_setzero_pd();
    __m256d m1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        m0 = _mm256_max_pd(m0, abs_pd(_mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i))));
        m1 = _mm256_max_pd(
            m1, abs_pd(_mm256_sub_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4))));
    }
    for (; i + 4 <= n; i += 4) {
        m0 = _mm256_max_pd(m0, abs_pd(_mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i))));
    }
    double m = hmax(_mm256_max_pd(m0, m1));
    for (; i < n; ++i) {
        const double d = std::fabs(a[i] - b[i]);
        if (d > m) m = d;
    }
    return m;
}

double sum_sq_diff(const double* a, const double* b, std::size_t n) noexcept {
    __m256d s0 = _mm256_setzero_pd();
    __m256d s1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4));
        s0 = _mm256_fmadd_pd(d0, d0, s0);
        s1 = _mm256_fmadd_pd(d1, d1, s1);
    }
    for (; i + 4 <= n; i += 4) {
        const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        s0 = _mm256_fmadd_pd(d0, d0, s0);
    }
    double s = hsum(_mm256_add_pd(s0, s1));
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

double sum(const double* a, std::size_t n) noexcept {
    __m256d s0 = _mm256_setzero_pd();
    __m256d s1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        s0 = _mm256_add_pd(s0, _mm256_loadu_pd(a + i));
        s1 = _mm256_add_pd(s1, _mm256_loadu_pd(a + i + 4));
    }
    for (; i + 4 <= n; i += 4) s0 = _mm256_add_pd(s0, _mm256_loadu_pd(a + i));
    double s = hsum(_mm256_add_pd(s0, s1));
    for (; i < n; ++i) s += a[i];
    return s;
}

void tau_of_t(const double* t, double T, double* out, std::size_t n) noexcept {
    const __m256d vT = _mm256_set1_pd(T);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vt = _mm256_loadu_pd(t + i);
        _mm256_storeu_pd(out + i, _mm256_div_pd(_mm256_mul_pd(vt, vT), _mm256_sub_pd(vT, vt)));
    }
    for (; i < n; ++i) out[i] = (t[i] * T) / (T - t[i]);
}

void v_of_t(const double* t, double T, double* out, std::size_t n) noexcept {
    const double T2 = T * T;
    const __m256d vT = _mm256_set1_pd(T);
    const __m256d vT2 = _mm256_set1_pd(T2);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d gap = _mm256_sub_pd(vT, _mm256_loadu_pd(t + i));
        _mm256_storeu_pd(out + i, _mm256_div_pd(_mm256_mul_pd(gap, gap), vT2));
    }
    for (; i < n; ++i) {
        const double gap = T - t[i];
        out[i] = (gap * gap) / T2;
    }
}

LinearFitSums linear_fit_sums(const double* x, const double* y, std::size_t n) noexcept {
    __m256d sx = _mm256_setzero_pd();
    __m256d sy = _mm256_setzero_pd();
    __m256d sxx = _mm256_setzero_pd();
    __m256d sxy = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vx = _mm256_loadu_pd(x + i);
        const __m256d vy = _mm256_loadu_pd(y + i);
        sx = _mm256_add_pd(sx, vx);
        sy = _mm256_add_pd(sy, vy);
        sxx = _mm256_fmadd_pd(vx, vx, sxx);
        sxy = _mm256_fmadd_pd(vx, vy, sxy);
    }
    LinearFitSums s;
    s.count = static_cast<double>(n);
    s.sx = hsum(sx);
    s.sy = hsum(sy);
    s.sxx = hsum(sxx);
    s.sxy = hsum(sxy);
    for (; i < n; ++i) {
        s.sx += x[i];
        s.sy += y[i];
        s.sxx += x[i] * x[i];
        s.sxy += x[i] * y[i];
    }
    return s;
}

}  // namespace ptesc::kernels::avx2
