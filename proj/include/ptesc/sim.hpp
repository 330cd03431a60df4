#pragma once

// Closed-loop simulation on [0, t_stop].
//
// Augmented state ordering is fixed: [x; u_hat; xi; eta] for the dithered loop,
// [x; u_hat] for the target controller and [x; u_hat; xi] for the averaged
// system. Output is recorded on a uniform grid of IntegratorConfig::output_samples
// times; the integrator shortens steps so that it lands on every grid time, so
// runs with equal t_stop and sample count share their time column exactly.

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ptesc/controller.hpp"
#include "ptesc/integrator.hpp"
#include "ptesc/plant.hpp"

namespace ptesc {

enum class Mode { Esc, Target, Averaged };

[[nodiscard]] const char* to_string(Mode m) noexcept;
/// Throws std::invalid_argument.
Mode parse_mode(const std::string& s);

enum class RunStatus { Completed, Diverged };

struct Trajectory {
    std::size_t n = 0;
    std::vector<double> t;
    std::vector<double> tau;
    /// x[j][i] is component j at sample i.
    std::vector<std::vector<double>> x;
    std::vector<double> u;
    std::vector<double> y;
    /// Estimate of L_g h (ESC, averaged) or its exact value (target).
    std::vector<double> xi;
    std::vector<double> u_hat;
    /// High-pass filter state; zero for runs without the filter.
    std::vector<double> eta;
    /// dy/dt: the filter estimate for ESC runs, exact along the state otherwise.
    std::vector<double> nu_bar;

    RunStatus status = RunStatus::Completed;
    double diverged_at = std::numeric_limits<double>::quiet_NaN();
    std::string reason;

    [[nodiscard]] std::size_t size() const noexcept { return t.size(); }
    [[nodiscard]] bool completed() const noexcept { return status == RunStatus::Completed; }
    [[nodiscard]] std::vector<double> state(std::size_t i) const;
};

/// Rates of the dithered closed loop at augmented state z = [x; u_hat; xi; eta].
/// Throws EvaluationError naming the first non-finite component.
std::vector<double> closed_loop_rhs(std::span<const double> z, double t, const PlantModel& plant,
                                    const EscParams& p);

/// min(max_step_absolute, (2 pi/omega) v(t)/N): N steps per dither period.
double max_step(double t, const EscParams& p, const IntegratorConfig& cfg);

Trajectory simulate_esc(const PlantModel& plant, const EscParams& p, std::span<const double> x0,
                        const IntegratorConfig& cfg = {});
Trajectory simulate_target(const PlantModel& plant, const EscParams& p,
                           std::span<const double> x0, const IntegratorConfig& cfg = {});
Trajectory simulate_averaged(const PlantModel& plant, const EscParams& p,
                             std::span<const double> x0, const IntegratorConfig& cfg = {});

Trajectory simulate(Mode mode, const PlantModel& plant, const EscParams& p,
                    std::span<const double> x0, const IntegratorConfig& cfg = {});

}  // namespace ptesc
