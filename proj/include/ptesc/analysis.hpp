#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ptesc/plant.hpp"
#include "ptesc/sim.hpp"
#include "ptesc/timescale.hpp"

namespace ptesc {

struct Optimum {
    std::vector<double> x;
    double u = 0.0;
    double y = 0.0;
};

Optimum to_optimum(const EquilibriumOptimum& e);

struct ConvergenceReport {
    double terminal_state_error = 0.0;
    double terminal_input_error = 0.0;
    double terminal_cost_excess = 0.0;
    /// |terminal excess| / |initial excess|.
    double reduction_ratio = 0.0;
    /// Mean of y - y* over the final 5% of the horizon (at least 10 samples).
    double window_mean_cost_excess = 0.0;
    double window_mean_state_error = 0.0;
    double window_mean_input_error = 0.0;
    std::size_t window_samples = 0;
};

/// Throws Error for a diverged trajectory.
ConvergenceReport convergence_report(const Trajectory& traj, const Optimum& optimum);

struct EnvelopeCheck {
    bool passes = false;
    /// Slope of log((y - y*)/v(t)) against tau; NaN when no fit was possible.
    double fitted_rate = 0.0;
    std::size_t points_used = 0;
    /// The run started (numerically) at the optimum.
    bool trivial = false;
};

/// Fits the decay of (y - y*)/v(t) against tau = Tt/(T - t) over the middle
/// 80% of samples. Passes when the fitted rate is negative and the scaled
/// excess at the end is below its initial value.
EnvelopeCheck decay_envelope_check(const Trajectory& traj, double y_star,
                                   const PrescribedTime& pt);

enum Signal : unsigned {
    kSignalState = 1u << 0,
    kSignalInput = 1u << 1,
    kSignalOutput = 1u << 2,
    kSignalEstimate = 1u << 3,
    kSignalIntegral = 1u << 4,
};

struct SignalError {
    std::string name;
    double sup_error = 0.0;
    double rms_error = 0.0;
};

struct TrajectoryDifference {
    double sup_error = 0.0;
    double rms_error = 0.0;
    std::vector<SignalError> per_signal;
};

/// Sup and RMS differences over the selected signals. Both trajectories must
/// be completed and share an identical time column (no resampling).
TrajectoryDifference compare_trajectories(const Trajectory& a, const Trajectory& b,
                                          unsigned signals = kSignalState);

/// Mean |xi - L_g h(x)| over the trailing `window` fraction of the horizon.
double estimate_tracking(const Trajectory& traj, const PlantModel& plant, double window);

}  // namespace ptesc
