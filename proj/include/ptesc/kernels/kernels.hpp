#pragma once

// Data-parallel kernels over trajectory columns.
//
// Each kernel has a scalar reference implementation and vectorized variants
// (AVX2+FMA on x86-64, NEON on AArch64). The variant is picked once at runtime
// from the CPU feature set and can be overridden with set_isa() for testing.
//
// Elementwise kernels (tau_of_t, v_of_t, max_abs_diff) are bit-identical
// across variants. Reductions (sum, sum_sq_diff, linear_fit_sums) reassociate
// and agree with the scalar reference to rounding only.
//
// Inputs are expected to be finite; NaN propagation is not specified.

#include <cstddef>
#include <span>

namespace ptesc::kernels {

enum class Isa { Scalar, Avx2, Neon };

struct LinearFitSums {
    double count = 0.0;
    double sx = 0.0;
    double sy = 0.0;
    double sxx = 0.0;
    double sxy = 0.0;
};

[[nodiscard]] const char* isa_name(Isa isa) noexcept;
[[nodiscard]] bool isa_available(Isa isa) noexcept;
/// Best variant the running CPU supports.
[[nodiscard]] Isa detect_isa() noexcept;
[[nodiscard]] Isa active_isa() noexcept;
/// Throws std::invalid_argument when the variant is not available here.
void set_isa(Isa isa);

// Dispatched entry points. Paired spans must have equal length.
[[nodiscard]] double max_abs_diff(std::span<const double> a, std::span<const double> b);
[[nodiscard]] double sum_sq_diff(std::span<const double> a, std::span<const double> b);
[[nodiscard]] double sum(std::span<const double> a);
void tau_of_t(std::span<const double> t, double T, std::span<double> out);
void v_of_t(std::span<const double> t, double T, std::span<double> out);
[[nodiscard]] LinearFitSums linear_fit_sums(std::span<const double> x, std::span<const double> y);

namespace scalar {
double max_abs_diff(const double* a, const double* b, std::size_t n) noexcept;
double sum_sq_diff(const double* a, const double* b, std::size_t n) noexcept;
double sum(const double* a, std::size_t n) noexcept;
void tau_of_t(const double* t, double T, double* out, std::size_t n) noexcept;
void v_of_t(const double* t, double T, double* out, std::size_t n) noexcept;
LinearFitSums linear_fit_sums(const double* x, const double* y, std::size_t n) noexcept;
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define PTESC_HAVE_AVX2_KERNELS 1
namespace avx2 {
double max_abs_diff(const double* a, const double* b, std::size_t n) noexcept;
double sum_sq_diff(const double* a, const double* b, std::size_t n) noexcept;
double sum(const double* a, std::size_t n) noexcept;
void tau_of_t(const double* t, double T, double* out, std::size_t n) noexcept;
void v_of_t(const double* t, double T, double* out, std::size_t n) noexcept;
LinearFitSums linear_fit_sums(const double* x, const double* y, std::size_t n) noexcept;
}  // namespace avx2
#endif

#if defined(__aarch64__) || defined(_M_ARM64)
#define PTESC_HAVE_NEON_KERNELS 1
namespace neon {
double max_abs_diff(const double* a, const double* b, std::size_t n) noexcept;
double sum_sq_diff(const double* a, const double* b, std::size_t n) noexcept;
double sum(const double* a, std::size_t n) noexcept;
void tau_of_t(const double* t, double T, double* out, std::size_t n) noexcept;
void v_of_t(const double* t, double T, double* out, std::size_t n) noexcept;
LinearFitSums linear_fit_sums(const double* x, const double* y, std::size_t n) noexcept;
}  // namespace neon
#endif

}  // namespace ptesc::kernels
