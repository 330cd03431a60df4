#pragma once

// Explicit Runge-Kutta steppers.
//
// Right-hand sides are callables  void(double t, std::span<const double> z,
// std::span<double> dz). Steppers own their stage storage so that the inner
// loop does not allocate.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ptesc/errors.hpp"

namespace ptesc {

enum class Method { Rk4, Rk45 };

struct IntegratorConfig {
    Method method = Method::Rk45;
    double rtol = 1e-8;
    double atol = 1e-10;
    /// Steps per dither period, measured in the original time.
    int dither_resolution = 20;
    double max_step_absolute = 0.05;
    /// Step cap in tau units for runs without dither (target, averaged).
    double quiet_tau_step = 0.05;
    /// Samples of the uniform output grid on [0, t_stop].
    std::size_t output_samples = 2000;
    /// Keep every Nth grid sample.
    std::size_t record_stride = 1;
    /// |z_i| above this marks the run as diverged.
    double divergence_bound = 1e12;

    /// Throws std::invalid_argument.
    void validate() const;

    friend bool operator==(const IntegratorConfig&, const IntegratorConfig&) = default;
};

[[nodiscard]] const char* to_string(Method m) noexcept;

namespace detail {

inline bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double a) { return std::isfinite(a); });
}

}  // namespace detail

/// Classical fourth-order Runge-Kutta.
class Rk4Stepper {
public:
    explicit Rk4Stepper(std::size_t dim) : k1_(dim), k2_(dim), k3_(dim), k4_(dim), tmp_(dim) {}

    /// Advances z in place by h. Throws EvaluationError on a non-finite stage.
    template <class Rhs>
    void step(Rhs& rhs, double t, std::span<double> z, double h) {
        const std::size_t n = z.size();
        rhs(t, std::span<const double>(z), std::span<double>(k1_));
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = z[i] + 0.5 * h * k1_[i];
        rhs(t + 0.5 * h, std::span<const double>(tmp_), std::span<double>(k2_));
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = z[i] + 0.5 * h * k2_[i];
        rhs(t + 0.5 * h, std::span<const double>(tmp_), std::span<double>(k3_));
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = z[i] + h * k3_[i];
        rhs(t + h, std::span<const double>(tmp_), std::span<double>(k4_));
        for (std::size_t i = 0; i < n; ++i) {
            tmp_[i] = z[i] + (h / 6.0) * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
        }
        if (!detail::all_finite(tmp_)) {
            throw EvaluationError("rk4: non-finite stage at t = " + std::to_string(t),
                                  std::vector<double>(z.begin(), z.end()));
        }
        std::copy(tmp_.begin(), tmp_.end(), z.begin());
    }

private:
    std::vector<double> k1_, k2_, k3_, k4_, tmp_;
};

struct AdaptiveStep {
    double h_used = 0.0;
    double h_next = 0.0;
    int rejected = 0;
};

/// Dormand-Prince 5(4) with first-same-as-last reuse and elementwise error
/// control: every component satisfies |err_i| <= atol + rtol max(|z_i|, |z_i'|).
class Rk45Stepper {
public:
    Rk45Stepper(std::size_t dim, double rtol, double atol)
        : rtol_(rtol), atol_(atol), k_(7, std::vector<double>(dim)), tmp_(dim), next_(dim) {}

    /// Forget the cached derivative (call after modifying z outside step()).
    void reset() noexcept { fsal_valid_ = false; }

    /// Attempts steps starting from min(h_try, h_max), shrinking on rejection.
    /// Throws StiffnessError once the step would drop below h_min.
    template <class Rhs>
    AdaptiveStep step(Rhs& rhs, double t, std::span<double> z, double h_try, double h_max,
                      double h_min) {
        constexpr double a21 = 1.0 / 5.0;
        constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
        constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
        constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                         a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
        constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                         a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
        constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                         b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
        constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                         e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
        constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;

        const std::size_t n = z.size();
        auto& k1 = k_[0];
        auto& k2 = k_[1];
        auto& k3 = k_[2];
        auto& k4 = k_[3];
        auto& k5 = k_[4];
        auto& k6 = k_[5];
        auto& k7 = k_[6];
        auto stage = [&](double ts, std::vector<double>& out) {
            rhs(ts, std::span<const double>(tmp_), std::span<double>(out));
        };

        if (!fsal_valid_) {
            rhs(t, std::span<const double>(z), std::span<double>(k1));
            fsal_valid_ = true;
        }

        AdaptiveStep result;
        double h = std::min(h_try, h_max);
        for (;;) {
            if (!(h >= h_min)) {
                throw StiffnessError("rk45: step size underflow (h = " + std::to_string(h) +
                                         ") at t = " + std::to_string(t),
                                     t);
            }
            for (std::size_t i = 0; i < n; ++i) tmp_[i] = z[i] + h * a21 * k1[i];
            stage(t + c2 * h, k2);
            for (std::size_t i = 0; i < n; ++i) tmp_[i] = z[i] + h * (a31 * k1[i] + a32 * k2[i]);
            stage(t + c3 * h, k3);
            for (std::size_t i = 0; i < n; ++i) {
                tmp_[i] = z[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
            }
            stage(t + c4 * h, k4);
            for (std::size_t i = 0; i < n; ++i) {
                tmp_[i] = z[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
            }
            stage(t + c5 * h, k5);
            for (std::size_t i = 0; i < n; ++i) {
                tmp_[i] = z[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                                      a65 * k5[i]);
            }
            stage(t + h, k6);
            for (std::size_t i = 0; i < n; ++i) {
                next_[i] = z[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                                       b6 * k6[i]);
            }
            std::copy(next_.begin(), next_.end(), tmp_.begin());
            stage(t + h, k7);

            double err = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                      e6 * k6[i] + e7 * k7[i]);
                const double scale = atol_ + rtol_ * std::max(std::fabs(z[i]), std::fabs(next_[i]));
                err = std::max(err, std::fabs(e) / scale);
            }
            if (!std::isfinite(err) || !detail::all_finite(k7)) {
                err = std::numeric_limits<double>::infinity();
            }

            if (err <= 1.0) {
                std::copy(next_.begin(), next_.end(), z.begin());
                std::swap(k1, k7);
                result.h_used = h;
                const double grow =
                    err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
                result.h_next = std::min(h * grow, h_max);
                return result;
            }
            ++result.rejected;
            const double shrink =
                std::isfinite(err) ? std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.5) : 0.1;
            h *= shrink;
        }
    }

private:
    double rtol_;
    double atol_;
    std::vector<std::vector<double>> k_;
    std::vector<double> tmp_;
    std::vector<double> next_;
    bool fsal_valid_ = false;
};

/// Single classical RK4 step; returns the advanced state.
template <class Rhs>
std::vector<double> step_rk4(Rhs&& rhs, std::span<const double> z, double t, double h) {
    std::vector<double> out(z.begin(), z.end());
    Rk4Stepper stepper(z.size());
    stepper.step(rhs, t, std::span<double>(out), h);
    return out;
}

struct Rk45Result {
    std::vector<double> z_next;
    double h_used = 0.0;
    double h_next = 0.0;
};

/// Single accepted Dormand-Prince step from (t, z).
template <class Rhs>
Rk45Result step_rk45(Rhs&& rhs, std::span<const double> z, double t, double h_try, double rtol,
                     double atol, double h_max = std::numeric_limits<double>::infinity(),
                     double h_min = 1e-300) {
    Rk45Result r;
    r.z_next.assign(z.begin(), z.end());
    Rk45Stepper stepper(z.size(), rtol, atol);
    const AdaptiveStep s = stepper.step(rhs, t, std::span<double>(r.z_next), h_try, h_max, h_min);
    r.h_used = s.h_used;
    r.h_next = s.h_next;
    return r;
}

}  // namespace ptesc
