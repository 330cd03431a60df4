#include "ptesc/sim.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "ptesc/errors.hpp"
#include "ptesc/kernels/kernels.hpp"

namespace ptesc {

const char* to_string(Mode m) noexcept {
    switch (m) {
        case Mode::Esc: return "esc";
        case Mode::Target: return "target";
        case Mode::Averaged: return "averaged";
    }
    return "unknown";
}

Mode parse_mode(const std::string& s) {
    if (s == "esc") return Mode::Esc;
    if (s == "target") return Mode::Target;
    if (s == "averaged") return Mode::Averaged;
    throw std::invalid_argument("mode must be one of esc|target|averaged, got '" + s + "'");
}

std::vector<double> Trajectory::state(std::size_t i) const {
    std::vector<double> s(n);
    for (std::size_t j = 0; j < n; ++j) s[j] = x[j].at(i);
    return s;
}

double max_step(double t, const EscParams& p, const IntegratorConfig& cfg) {
    const double period = 2.0 * std::numbers::pi / p.omega;
    return std::min(cfg.max_step_absolute,
                    period * v_of_t(t, p.pt) / static_cast<double>(cfg.dither_resolution));
}

namespace {

/// Plant evaluation buffers reused across right-hand-side calls.
struct PlantScratch {
    explicit PlantScratch(const PlantModel& plant)
        : plant(plant), f(plant.n), g(plant.n), grad(plant.n) {}

    void eval(std::span<const double> x) {
        plant.drift(x, f);
        plant.input_map(x, g);
    }
    double lgh(std::span<const double> x) {
        if (plant.grad_cost) {
            plant.grad_cost(x, grad);
        } else {
            const auto ng = numeric_gradient(plant, x);
            std::copy(ng.begin(), ng.end(), grad.begin());
        }
        return std::inner_product(grad.begin(), grad.end(), g.begin(), 0.0);
    }
    /// dh/dt along f + g u; requires eval() and lgh() at the same x.
    double output_rate(double u) const {
        double s = 0.0;
        for (std::size_t i = 0; i < plant.n; ++i) s += grad[i] * (f[i] + g[i] * u);
        return s;
    }

    const PlantModel& plant;
    std::vector<double> f, g, grad;
};

struct Sample {
    double u, y, xi, u_hat, eta, nu_bar;
};

/// Dithered loop, z = [x; u_hat; xi; eta].
class EscSystem {
public:
    EscSystem(const PlantModel& plant, const EscParams& p) : s_(plant), p_(p), n_(plant.n) {}

    std::size_t dim() const { return n_ + 3; }

    void operator()(double t, std::span<const double> z, std::span<double> dz) {
        const auto x = z.first(n_);
        const double u_hat = z[n_], xi = z[n_ + 1], eta = z[n_ + 2];
        const double rate = dtau_dt(t, p_.pt);
        const double sine = std::sin(p_.omega * tau_of_t(t, p_.pt));
        s_.eval(x);
        const double y = s_.plant.cost(x);
        const double u = law::control(p_.k * (1.0 + rate), xi, u_hat, p_.A * sine);
        for (std::size_t i = 0; i < n_; ++i) dz[i] = s_.f[i] + s_.g[i] * u;
        const double nb = law::nu_bar(rate, p_.omega_h, eta, y);
        dz[n_] = law::uhat_rate(rate, p_.k, p_.tau_I, xi);
        dz[n_ + 1] = law::lp_rate(rate, p_.omega_l, p_.A, sine, xi, nb);
        dz[n_ + 2] = law::hp_rate(rate, p_.omega_h, eta, y);
    }

    Sample sample(double t, std::span<const double> z) {
        const auto x = z.first(n_);
        const double u_hat = z[n_], xi = z[n_ + 1], eta = z[n_ + 2];
        const double rate = dtau_dt(t, p_.pt);
        const double y = s_.plant.cost(x);
        const double u = law::control(p_.k * (1.0 + rate), xi, u_hat, dither(t, p_));
        return {u, y, xi, u_hat, eta, law::nu_bar(rate, p_.omega_h, eta, y)};
    }

    double cap(double t, const IntegratorConfig& cfg) const { return max_step(t, p_, cfg); }

private:
    PlantScratch s_;
    const EscParams& p_;
    std::size_t n_;
};

double quiet_cap(double t, const EscParams& p, const IntegratorConfig& cfg) {
    return std::min(cfg.max_step_absolute, cfg.quiet_tau_step * v_of_t(t, p.pt));
}

/// Model-based target loop, z = [x; u_hat].
class TargetSystem {
public:
    TargetSystem(const PlantModel& plant, const EscParams& p) : s_(plant), p_(p), n_(plant.n) {}

    std::size_t dim() const { return n_ + 1; }

    void operator()(double t, std::span<const double> z, std::span<double> dz) {
        const auto x = z.first(n_);
        const double rate = dtau_dt(t, p_.pt);
        s_.eval(x);
        const double lgh = s_.lgh(x);
        const double u = law::control(p_.k * (1.0 + rate), lgh, z[n_], 0.0);
        for (std::size_t i = 0; i < n_; ++i) dz[i] = s_.f[i] + s_.g[i] * u;
        dz[n_] = law::uhat_rate(rate, p_.k, p_.tau_I, lgh);
    }

    Sample sample(double t, std::span<const double> z) {
        const auto x = z.first(n_);
        const double rate = dtau_dt(t, p_.pt);
        s_.eval(x);
        const double lgh = s_.lgh(x);
        const double u = law::control(p_.k * (1.0 + rate), lgh, z[n_], 0.0);
        return {u, s_.plant.cost(x), lgh, z[n_], 0.0, s_.output_rate(u)};
    }

    double cap(double t, const IntegratorConfig& cfg) const { return quiet_cap(t, p_, cfg); }

private:
    PlantScratch s_;
    const EscParams& p_;
    std::size_t n_;
};

/// Averaged loop, z = [x; u_hat; xi]. Independent of omega and A.
class AveragedSystem {
public:
    AveragedSystem(const PlantModel& plant, const EscParams& p) : s_(plant), p_(p), n_(plant.n) {}

    std::size_t dim() const { return n_ + 2; }

    void operator()(double t, std::span<const double> z, std::span<double> dz) {
        const auto x = z.first(n_);
        const double u_hat = z[n_], xi = z[n_ + 1];
        const double rate = dtau_dt(t, p_.pt);
        s_.eval(x);
        const double lgh = s_.lgh(x);
        const double u = law::control(p_.k * (1.0 + rate), xi, u_hat, 0.0);
        for (std::size_t i = 0; i < n_; ++i) dz[i] = s_.f[i] + s_.g[i] * u;
        dz[n_] = law::uhat_rate(rate, p_.k, p_.tau_I, xi);
        dz[n_ + 1] = -p_.omega_l * rate * (xi - lgh);
    }

    Sample sample(double t, std::span<const double> z) {
        const auto x = z.first(n_);
        const double u_hat = z[n_], xi = z[n_ + 1];
        const double rate = dtau_dt(t, p_.pt);
        s_.eval(x);
        s_.lgh(x);
        const double u = law::control(p_.k * (1.0 + rate), xi, u_hat, 0.0);
        return {u, s_.plant.cost(x), xi, u_hat, 0.0, s_.output_rate(u)};
    }

    double cap(double t, const IntegratorConfig& cfg) const { return quiet_cap(t, p_, cfg); }

private:
    PlantScratch s_;
    const EscParams& p_;
    std::size_t n_;
};

bool sample_finite(const Sample& s) {
    return std::isfinite(s.u) && std::isfinite(s.y) && std::isfinite(s.xi) &&
           std::isfinite(s.u_hat) && std::isfinite(s.eta) && std::isfinite(s.nu_bar);
}

bool within_bound(std::span<const double> z, double bound) {
    for (double v : z) {
        if (!std::isfinite(v) || std::fabs(v) > bound) return false;
    }
    return true;
}

template <class System>
Trajectory integrate(System& sys, const PlantModel& plant, const EscParams& p,
                     std::vector<double> z, const IntegratorConfig& cfg) {
    const std::size_t n = plant.n;
    const double t_stop = p.pt.t_stop();
    const std::size_t samples = cfg.output_samples;

    Trajectory traj;
    traj.n = n;
    traj.x.resize(n);
    const std::size_t expected = samples / cfg.record_stride + 2;
    traj.t.reserve(expected);

    auto record = [&](double t, std::span<const double> state) {
        const Sample s = sys.sample(t, state);
        if (!sample_finite(s)) return false;
        traj.t.push_back(t);
        for (std::size_t j = 0; j < n; ++j) traj.x[j].push_back(state[j]);
        traj.u.push_back(s.u);
        traj.y.push_back(s.y);
        traj.xi.push_back(s.xi);
        traj.u_hat.push_back(s.u_hat);
        traj.eta.push_back(s.eta);
        traj.nu_bar.push_back(s.nu_bar);
        return true;
    };
    auto grid_time = [&](std::size_t i) {
        if (i + 1 == samples) return t_stop;
        return t_stop * static_cast<double>(i) / static_cast<double>(samples - 1);
    };
    auto keep = [&](std::size_t i) { return i % cfg.record_stride == 0 || i + 1 == samples; };
    auto diverge = [&](double t, std::string reason) {
        traj.status = RunStatus::Diverged;
        traj.diverged_at = t;
        traj.reason = std::move(reason);
    };

    if (!within_bound(z, cfg.divergence_bound) || !record(0.0, z)) {
        diverge(0.0, "initial state is non-finite or out of bounds");
        return traj;
    }

    Rk45Stepper rk45(z.size(), cfg.rtol, cfg.atol);
    Rk4Stepper rk4(z.size());
    std::vector<double> previous = z;
    const double h_min = 1e-14 * p.pt.T;

    double t = 0.0;
    double h = sys.cap(0.0, cfg);
    for (std::size_t next = 1; next < samples; ++next) {
        const double target = grid_time(next);
        while (t < target) {
            const double to_grid = target - t;
            const double h_cap = std::min(sys.cap(t, cfg), to_grid);
            previous = z;
            double h_used = 0.0;
            try {
                if (cfg.method == Method::Rk45) {
                    const AdaptiveStep s = rk45.step(sys, t, std::span<double>(z), h, h_cap, h_min);
                    h_used = s.h_used;
                    h = (h_used < h && h_used == h_cap) ? std::max(s.h_next, h) : s.h_next;
                } else {
                    rk4.step(sys, t, std::span<double>(z), h_cap);
                    h_used = h_cap;
                }
            } catch (const StiffnessError& e) {
                diverge(t, e.what());
            } catch (const EvaluationError& e) {
                diverge(t, e.what());
            }
            if (traj.status == RunStatus::Diverged) break;

            // A remainder below the step floor cannot be integrated; it only
            // arises from rounding in t + h, so count the grid time as reached.
            const bool landed = h_used >= to_grid - 4.0 * h_min;
            const double t_new = landed ? target : t + h_used;
            if (!within_bound(z, cfg.divergence_bound)) {
                z = previous;
                diverge(t_new, "state left the divergence bound");
                break;
            }
            t = t_new;
        }
        if (traj.status == RunStatus::Diverged) break;
        if (keep(next) && !record(t, z)) {
            diverge(t, "non-finite output signal");
            break;
        }
    }

    if (traj.status == RunStatus::Diverged) {
        // Keep the last finite state so the record ends at the failure.
        if (t > traj.t.back()) record(t, z);
        if (!(traj.diverged_at > 0.0)) traj.diverged_at = std::max(t, traj.t.back());
    }

    traj.tau.resize(traj.t.size());
    kernels::tau_of_t(traj.t, p.pt.T, traj.tau);
    return traj;
}

void check_inputs(const PlantModel& plant, const EscParams& p, std::span<const double> x0,
                  const IntegratorConfig& cfg) {
    // A = 0 is a valid open-loop ESC run; configs demand a dither separately.
    p.validate(false);
    cfg.validate();
    if (x0.size() != plant.n) {
        throw std::invalid_argument("x0 has length " + std::to_string(x0.size()) + ", plant '" +
                                    plant.name + "' expects " + std::to_string(plant.n));
    }
}

}  // namespace

std::vector<double> closed_loop_rhs(std::span<const double> z, double t, const PlantModel& plant,
                                    const EscParams& p) {
    if (z.size() != plant.n + 3) {
        throw std::invalid_argument("closed_loop_rhs: augmented state must have length n + 3");
    }
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (!std::isfinite(z[i])) {
            throw EvaluationError("closed_loop_rhs: non-finite state component at index " +
                                      std::to_string(i),
                                  std::vector<double>(z.begin(), z.end()));
        }
    }
    EscSystem sys(plant, p);
    std::vector<double> dz(z.size());
    sys(t, z, dz);
    for (std::size_t i = 0; i < dz.size(); ++i) {
        if (!std::isfinite(dz[i])) {
            throw EvaluationError("closed_loop_rhs: non-finite rate at index " + std::to_string(i),
                                  std::vector<double>(z.begin(), z.end()));
        }
    }
    return dz;
}

Trajectory simulate_esc(const PlantModel& plant, const EscParams& p, std::span<const double> x0,
                        const IntegratorConfig& cfg) {
    check_inputs(plant, p, x0, cfg);
    const ControllerState c = initial_controller_state(p, eval_cost(plant, x0));
    std::vector<double> z(x0.begin(), x0.end());
    z.push_back(c.u_hat);
    z.push_back(c.xi);
    z.push_back(c.eta);
    EscSystem sys(plant, p);
    return integrate(sys, plant, p, std::move(z), cfg);
}

Trajectory simulate_target(const PlantModel& plant, const EscParams& p,
                           std::span<const double> x0, const IntegratorConfig& cfg) {
    check_inputs(plant, p, x0, cfg);
    std::vector<double> z(x0.begin(), x0.end());
    z.push_back(p.u_hat0);
    TargetSystem sys(plant, p);
    return integrate(sys, plant, p, std::move(z), cfg);
}

Trajectory simulate_averaged(const PlantModel& plant, const EscParams& p,
                             std::span<const double> x0, const IntegratorConfig& cfg) {
    check_inputs(plant, p, x0, cfg);
    std::vector<double> z(x0.begin(), x0.end());
    z.push_back(p.u_hat0);
    z.push_back(0.0);
    AveragedSystem sys(plant, p);
    return integrate(sys, plant, p, std::move(z), cfg);
}

Trajectory simulate(Mode mode, const PlantModel& plant, const EscParams& p,
                    std::span<const double> x0, const IntegratorConfig& cfg) {
    switch (mode) {
        case Mode::Esc: return simulate_esc(plant, p, x0, cfg);
        case Mode::Target: return simulate_target(plant, p, x0, cfg);
        case Mode::Averaged: return simulate_averaged(plant, p, x0, cfg);
    }
    throw std::invalid_argument("unknown mode");
}

// IntegratorConfig lives with the steppers but is validated here with the
// rest of the run settings.
void IntegratorConfig::validate() const {
    if (!(rtol > 0.0) || !(atol > 0.0)) throw std::invalid_argument("rtol and atol must be > 0");
    if (dither_resolution < 8) throw std::invalid_argument("dither_resolution must be >= 8");
    if (!(max_step_absolute > 0.0)) throw std::invalid_argument("max_step_absolute must be > 0");
    if (!(quiet_tau_step > 0.0)) throw std::invalid_argument("quiet_tau_step must be > 0");
    if (output_samples < 2) throw std::invalid_argument("output_samples must be >= 2");
    if (record_stride < 1) throw std::invalid_argument("record_stride must be >= 1");
    if (!(divergence_bound > 0.0)) throw std::invalid_argument("divergence_bound must be > 0");
}

const char* to_string(Method m) noexcept {
    switch (m) {
        case Method::Rk4: return "rk4";
        case Method::Rk45: return "rk45";
    }
    return "unknown";
}

}  // namespace ptesc
