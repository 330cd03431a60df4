#include <atomic>
#include <stdexcept>
#include <string>

#include "ptesc/kernels/kernels.hpp"

namespace ptesc::kernels {

namespace {

struct Table {
    double (*max_abs_diff)(const double*, const double*, std::size_t) noexcept;
    double (*sum_sq_diff)(const double*, const double*, std::size_t) noexcept;
    double (*sum)(const double*, std::size_t) noexcept;
    void (*tau_of_t)(const double*, double, double*, std::size_t) noexcept;
    void (*v_of_t)(const double*, double, double*, std::size_t) noexcept;
    LinearFitSums (*linear_fit_sums)(const double*, const double*, std::size_t) noexcept;
};

constexpr Table kScalar{scalar::max_abs_diff, scalar::sum_sq_diff,     scalar::sum,
                        scalar::tau_of_t,     scalar::v_of_t,          scalar::linear_fit_sums};
#ifdef PTESC_HAVE_AVX2_KERNELS
constexpr Table kAvx2{avx2::max_abs_diff, avx2::sum_sq_diff,     avx2::sum,
                      avx2::tau_of_t,     avx2::v_of_t,          avx2::linear_fit_sums};
#endif
#ifdef PTESC_HAVE_NEON_KERNELS
constexpr Table kNeon{neon::max_abs_diff, neon::sum_sq_diff,     neon::sum,
                      neon::tau_of_t,     neon::v_of_t,          neon::linear_fit_sums};
#endif

const Table* table_for(Isa isa) noexcept {
    switch (isa) {
#ifdef PTESC_HAVE_AVX2_KERNELS
        case Isa::Avx2: return &kAvx2;
#endif
#ifdef PTESC_HAVE_NEON_KERNELS
        case Isa::Neon: return &kNeon;
#endif
        default: return &kScalar;
    }
}

struct Active {
    std::atomic<const Table*> table;
    std::atomic<Isa> isa;
    Active() {
        const Isa best = detect_isa();
        table.store(table_for(best));
        isa.store(best);
    }
};

Active& active() {
    static Active instance;
    return instance;
}

void check_pair(std::size_t a, std::size_t b) {
    if (a != b) {
        throw std::invalid_argument("kernel operands differ in length: " + std::to_string(a) +
                                    " vs " + std::to_string(b));
    }
}

}  // namespace

const char* isa_name(Isa isa) noexcept {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
        case Isa::Neon: return "neon";
    }
    return "unknown";
}

bool isa_available(Isa isa) noexcept {
    switch (isa) {
        case Isa::Scalar: return true;
        case Isa::Avx2:
#if defined(PTESC_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
        case Isa::Neon:
#ifdef PTESC_HAVE_NEON_KERNELS
            return true;
#else
            return false;
#endif
    }
    return false;
}

Isa detect_isa() noexcept {
    if (isa_available(Isa::Avx2)) return Isa::Avx2;
    if (isa_available(Isa::Neon)) return Isa::Neon;
    return Isa::Scalar;
}

Isa active_isa() noexcept { return active().isa.load(); }

void set_isa(Isa isa) {
    if (!isa_available(isa)) {
        throw std::invalid_argument(std::string("kernel variant not available: ") + isa_name(isa));
    }
    active().table.store(table_for(isa));
    active().isa.store(isa);
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    check_pair(a.size(), b.size());
    return active().table.load()->max_abs_diff(a.data(), b.data(), a.size());
}

double sum_sq_diff(std::span<const double> a, std::span<const double> b) {
    check_pair(a.size(), b.size());
    return active().table.load()->sum_sq_diff(a.data(), b.data(), a.size());
}

double sum(std::span<const double> a) {
    return active().table.load()->sum(a.data(), a.size());
}

void tau_of_t(std::span<const double> t, double T, std::span<double> out) {
    check_pair(t.size(), out.size());
    active().table.load()->tau_of_t(t.data(), T, out.data(), t.size());
}

void v_of_t(std::span<const double> t, double T, std::span<double> out) {
    check_pair(t.size(), out.size());
    active().table.load()->v_of_t(t.data(), T, out.data(), t.size());
}

LinearFitSums linear_fit_sums(std::span<const double> x, std::span<const double> y) {
    check_pair(x.size(), y.size());
    return active().table.load()->linear_fit_sums(x.data(), y.data(), x.size());
}

}  // namespace ptesc::kernels
