#pragma once

// Finite-horizon timescale transformation.
//
// The horizon [0, T) is stretched onto [0, inf) by tau = tT/(T - t). A law that
// converges asymptotically in tau therefore converges by t = T. All quantities
// here are computed from (T - t) directly; nothing is derived from an
// accumulated tau.

#include <optional>

namespace ptesc {

struct PrescribedTime {
    double T = 1.0;
    /// Integration halts at (1 - stop_fraction) * T.
    double stop_fraction = 1e-3;
    /// Optional ceiling on the blow-up factor T^2/(T - t)^2.
    std::optional<double> gain_clamp;

    /// Throws DomainError when an invariant is violated.
    void validate() const;

    [[nodiscard]] double t_stop() const noexcept { return (1.0 - stop_fraction) * T; }

    friend bool operator==(const PrescribedTime&, const PrescribedTime&) = default;
};

/// tau(t) = tT/(T - t), defined for 0 <= t < T.
[[nodiscard]] double tau_of_t(double t, const PrescribedTime& pt);

/// t(tau) = T tau/(T + tau), defined for tau >= 0.
[[nodiscard]] double t_of_tau(double tau, const PrescribedTime& pt);

/// dtau/dt = T^2/(T - t)^2, saturated at gain_clamp when one is set.
[[nodiscard]] double dtau_dt(double t, const PrescribedTime& pt);

/// v(t) = (T - t)^2/T^2. Never clamped.
[[nodiscard]] double v_of_t(double t, const PrescribedTime& pt);

/// K(t) = k (1 + dtau_dt(t)).
[[nodiscard]] double gain_schedule(double t, double k, const PrescribedTime& pt);

}  // namespace ptesc
