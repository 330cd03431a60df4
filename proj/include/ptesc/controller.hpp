#pragma once

// Prescribed-time dual-mode extremum seeking law.
//
// Every filter is designed in the stretched time tau and mapped back to t, so
// each rate below carries one factor of dtau/dt. The dither is sinusoidal in
// tau, i.e. a chirp in t whose frequency grows like (T - t)^-2.
//
//   u      = -K(t) xi + u_hat + A sin(omega tau)
//   u_hat' = -(k/tau_I) (dtau/dt) xi
//   xi'    = -omega_l (dtau/dt) (xi - (2/A) sin(omega tau) nu_bar)
//   eta'   = -(dtau/dt) (omega_h eta - y)
//   nu_bar = (dtau/dt) (omega_h y - omega_h^2 eta)        estimate of dy/dt

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "ptesc/plant.hpp"
#include "ptesc/timescale.hpp"

namespace ptesc {

struct EscParams {
    PrescribedTime pt;
    /// Dither amplitude; also sets the 2/A demodulation gain.
    double A = 1.0;
    /// Dither frequency in rad per tau unit.
    double omega = 1.0;
    double omega_h = 1.0;
    double omega_l = 1.0;
    double k = 1.0;
    double tau_I = 1.0;
    double u_hat0 = 0.0;

    /// Throws std::invalid_argument naming the offending field. A must be
    /// positive when require_dither is set and non-negative otherwise.
    void validate(bool require_dither = true) const;

    friend bool operator==(const EscParams&, const EscParams&) = default;
};

struct ControllerState {
    double u_hat = 0.0;
    double xi = 0.0;
    double eta = 0.0;
};

/// u_hat = u_hat0, xi = 0 and eta = y0/omega_h, which starts the derivative
/// estimator at rest (nu = 0).
ControllerState initial_controller_state(const EscParams& p, double y0);

/// Messages for parameter sets that break omega_h >> omega >> omega_l.
std::vector<std::string> ordering_warnings(const EscParams& p);

namespace law {

// Unchecked rate expressions shared by the public operations and the
// simulator. `rate` is dtau/dt at the evaluation time.

inline double hp_rate(double rate, double omega_h, double eta, double y) {
    return -rate * (omega_h * eta - y);
}
inline double nu_bar(double rate, double omega_h, double eta, double y) {
    return rate * (-omega_h * omega_h * eta + omega_h * y);
}
/// Without dither (A = 0) there is nothing to demodulate and xi decays.
inline double lp_rate(double rate, double omega_l, double A, double sine, double xi,
                      double nu_bar_val) {
    const double demod = A == 0.0 ? 0.0 : (2.0 / A) * sine * nu_bar_val;
    return -omega_l * rate * (xi - demod);
}
inline double uhat_rate(double rate, double k, double tau_I, double xi) {
    return -(k / tau_I) * rate * xi;
}
inline double control(double gain, double xi, double u_hat, double dither) {
    return -gain * xi + u_hat + dither;
}

}  // namespace law

double dither(double t, const EscParams& p);
double hp_deriv(double eta, double y, double t, const EscParams& p);
double nu_bar(double eta, double y, double t, const EscParams& p);
double lp_deriv(double xi, double nu_bar_val, double t, const EscParams& p);
double uhat_deriv(double xi, double t, const EscParams& p);
double control_output(const ControllerState& state, double t, const EscParams& p);

struct TargetAction {
    double u = 0.0;
    double duhat_dt = 0.0;
};

/// Model-based law using the exact L_g h in place of its estimate.
TargetAction target_control(std::span<const double> x, double u_hat, double t, const EscParams& p,
                            const PlantModel& plant);

struct AveragedRates {
    std::vector<double> dx;
    double dxi = 0.0;
    double duhat = 0.0;
    /// Averaged input u^a applied to the plant.
    double u = 0.0;
};

/// Closed loop with the dither averaged out over one tau-period.
AveragedRates averaged_rhs(std::span<const double> x_a, double xi_a, double uhat_a, double t,
                           const EscParams& p, const PlantModel& plant);

}  // namespace ptesc
