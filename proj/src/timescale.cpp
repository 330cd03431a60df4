#include "ptesc/timescale.hpp"

#include <cmath>
#include <string>

#include "ptesc/errors.hpp"

namespace ptesc {

namespace {

void require_horizon(double t, const PrescribedTime& pt, const char* fn) {
    if (!(t >= 0.0) || !(t < pt.T)) {
        throw DomainError(std::string(fn) + ": t = " + std::to_string(t) +
                              " outside [0, T) with T = " + std::to_string(pt.T),
                          t);
    }
}

}  // namespace

void PrescribedTime::validate() const {
    if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("T must be > 0", T);
    if (!(stop_fraction > 0.0 && stop_fraction < 1.0)) {
        throw DomainError("stop_fraction must lie in (0, 1)", stop_fraction);
    }
    if (gain_clamp && !(*gain_clamp >= 1.0)) {
        throw DomainError("gain_clamp must be >= 1", *gain_clamp);
    }
}

double tau_of_t(double t, const PrescribedTime& pt) {
    require_horizon(t, pt, "tau_of_t");
    return (t * pt.T) / (pt.T - t);
}

double t_of_tau(double tau, const PrescribedTime& pt) {
    if (!(tau >= 0.0)) {
        throw DomainError("t_of_tau: tau = " + std::to_string(tau) + " must be >= 0", tau);
    }
    if (std::isinf(tau)) return pt.T;
    return (pt.T * tau) / (pt.T + tau);
}

double dtau_dt(double t, const PrescribedTime& pt) {
    require_horizon(t, pt, "dtau_dt");
    const double gap = pt.T - t;
    const double rate = (pt.T * pt.T) / (gap * gap);
    if (pt.gain_clamp && rate > *pt.gain_clamp) return *pt.gain_clamp;
    return rate;
}

double v_of_t(double t, const PrescribedTime& pt) {
    require_horizon(t, pt, "v_of_t");
    const double gap = pt.T - t;
    return (gap * gap) / (pt.T * pt.T);
}

double gain_schedule(double t, double k, const PrescribedTime& pt) {
    return k * (1.0 + dtau_dt(t, pt));
}

}  // namespace ptesc
