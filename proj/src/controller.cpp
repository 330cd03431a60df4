#include "ptesc/controller.hpp"

#include <stdexcept>

#include "ptesc/errors.hpp"

namespace ptesc {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument(std::string(name) + " must be > 0");
    }
}

void require_finite(std::initializer_list<double> values, const char* fn) {
    for (double v : values) {
        if (!std::isfinite(v)) throw EvaluationError(std::string(fn) + ": non-finite input", values);
    }
}

double checked(double v, const char* fn, std::initializer_list<double> inputs) {
    if (!std::isfinite(v)) throw EvaluationError(std::string(fn) + ": non-finite result", inputs);
    return v;
}

}  // namespace

void EscParams::validate(bool require_dither) const {
    if (!(pt.T > 0.0) || !std::isfinite(pt.T)) throw std::invalid_argument("T must be > 0");
    if (!(pt.stop_fraction > 0.0 && pt.stop_fraction < 1.0)) {
        throw std::invalid_argument("stop_fraction must lie in (0, 1)");
    }
    if (pt.gain_clamp && !(*pt.gain_clamp >= 1.0)) {
        throw std::invalid_argument("gain_clamp must be >= 1");
    }
    if (require_dither) {
        require_positive(A, "A");
    } else if (!(A >= 0.0) || !std::isfinite(A)) {
        throw std::invalid_argument("A must be >= 0");
    }
    require_positive(omega, "omega");
    require_positive(omega_h, "omega_h");
    require_positive(omega_l, "omega_l");
    // k = 0 is allowed: it leaves only the dither acting on the plant.
    if (!(k >= 0.0) || !std::isfinite(k)) throw std::invalid_argument("k must be >= 0");
    require_positive(tau_I, "tau_I");
    if (!std::isfinite(u_hat0)) throw std::invalid_argument("u_hat0 must be finite");
}

ControllerState initial_controller_state(const EscParams& p, double y0) {
    return {p.u_hat0, 0.0, y0 / p.omega_h};
}

std::vector<std::string> ordering_warnings(const EscParams& p) {
    constexpr double kSeparation = 5.0;
    std::vector<std::string> out;
    if (p.omega_h < kSeparation * p.omega) {
        out.push_back("omega_h (" + std::to_string(p.omega_h) +
                      ") is not well above the dither frequency omega (" + std::to_string(p.omega) +
                      ")");
    }
    if (p.omega < kSeparation * p.omega_l) {
        out.push_back("dither frequency omega (" + std::to_string(p.omega) +
                      ") is not well above omega_l (" + std::to_string(p.omega_l) + ")");
    }
    return out;
}

double dither(double t, const EscParams& p) { return p.A * std::sin(p.omega * tau_of_t(t, p.pt)); }

double hp_deriv(double eta, double y, double t, const EscParams& p) {
    require_finite({eta, y}, "hp_deriv");
    return checked(law::hp_rate(dtau_dt(t, p.pt), p.omega_h, eta, y), "hp_deriv", {eta, y, t});
}

double nu_bar(double eta, double y, double t, const EscParams& p) {
    require_finite({eta, y}, "nu_bar");
    return checked(law::nu_bar(dtau_dt(t, p.pt), p.omega_h, eta, y), "nu_bar", {eta, y, t});
}

double lp_deriv(double xi, double nu_bar_val, double t, const EscParams& p) {
    require_finite({xi, nu_bar_val}, "lp_deriv");
    const double sine = std::sin(p.omega * tau_of_t(t, p.pt));
    return checked(law::lp_rate(dtau_dt(t, p.pt), p.omega_l, p.A, sine, xi, nu_bar_val),
                   "lp_deriv", {xi, nu_bar_val, t});
}

double uhat_deriv(double xi, double t, const EscParams& p) {
    require_finite({xi}, "uhat_deriv");
    return checked(law::uhat_rate(dtau_dt(t, p.pt), p.k, p.tau_I, xi), "uhat_deriv", {xi, t});
}

double control_output(const ControllerState& state, double t, const EscParams& p) {
    require_finite({state.u_hat, state.xi, state.eta}, "control_output");
    return checked(law::control(gain_schedule(t, p.k, p.pt), state.xi, state.u_hat, dither(t, p)),
                   "control_output", {state.u_hat, state.xi, t});
}

TargetAction target_control(std::span<const double> x, double u_hat, double t, const EscParams& p,
                            const PlantModel& plant) {
    require_finite({u_hat}, "target_control");
    const double lgh = lie_lgh(plant, x);
    TargetAction a;
    a.u = checked(law::control(gain_schedule(t, p.k, p.pt), lgh, u_hat, 0.0), "target_control",
                  {u_hat, t});
    a.duhat_dt = law::uhat_rate(dtau_dt(t, p.pt), p.k, p.tau_I, lgh);
    return a;
}

AveragedRates averaged_rhs(std::span<const double> x_a, double xi_a, double uhat_a, double t,
                           const EscParams& p, const PlantModel& plant) {
    require_finite({xi_a, uhat_a}, "averaged_rhs");
    const double rate = dtau_dt(t, p.pt);
    const double lgh = lie_lgh(plant, x_a);
    AveragedRates r;
    r.u = law::control(gain_schedule(t, p.k, p.pt), xi_a, uhat_a, 0.0);
    r.dx = eval_rhs(plant, x_a, r.u);
    r.dxi = -p.omega_l * rate * (xi_a - lgh);
    r.duhat = law::uhat_rate(rate, p.k, p.tau_I, xi_a);
    return r;
}

}  // namespace ptesc
