#include "ptesc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ptesc/errors.hpp"
#include "ptesc/kernels/kernels.hpp"

namespace ptesc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// First index of the trailing window covering `fraction` of [0, t_end],
/// widened so that it holds at least `min_samples` samples.
std::size_t window_start(const std::vector<double>& t, double fraction, std::size_t min_samples) {
    const double t_end = t.back();
    const double t_from = t_end - fraction * t_end;
    auto it = std::lower_bound(t.begin(), t.end(), t_from);
    std::size_t start = static_cast<std::size_t>(it - t.begin());
    const std::size_t n = t.size();
    if (n - start < min_samples) start = n > min_samples ? n - min_samples : 0;
    return start;
}

double state_distance(const Trajectory& traj, std::size_t i, const std::vector<double>& x) {
    double s = 0.0;
    for (std::size_t j = 0; j < traj.n; ++j) {
        const double d = traj.x[j][i] - x[j];
        s += d * d;
    }
    return std::sqrt(s);
}

}  // namespace

Optimum to_optimum(const EquilibriumOptimum& e) { return {e.x, e.u, e.y}; }

ConvergenceReport convergence_report(const Trajectory& traj, const Optimum& optimum) {
    if (!traj.completed()) {
        throw Error("convergence_report: trajectory diverged at t = " +
                    std::to_string(traj.diverged_at) + " (" + traj.reason + ")");
    }
    if (traj.size() == 0) throw Error("convergence_report: empty trajectory");
    if (optimum.x.size() != traj.n) throw std::invalid_argument("convergence_report: optimum size");

    ConvergenceReport r;
    const std::size_t last = traj.size() - 1;
    r.terminal_state_error = state_distance(traj, last, optimum.x);
    r.terminal_input_error = std::fabs(traj.u_hat[last] - optimum.u);
    r.terminal_cost_excess = traj.y[last] - optimum.y;
    const double initial = std::fabs(traj.y[0] - optimum.y);
    const double terminal = std::fabs(r.terminal_cost_excess);
    if (initial > 0.0) {
        r.reduction_ratio = terminal / initial;
    } else {
        r.reduction_ratio = terminal > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }

    const std::size_t start = window_start(traj.t, 0.05, 10);
    const std::size_t count = traj.size() - start;
    r.window_samples = count;
    const std::span<const double> ys(traj.y.data() + start, count);
    r.window_mean_cost_excess = kernels::sum(ys) / static_cast<double>(count) - optimum.y;
    double state_sum = 0.0, input_sum = 0.0;
    for (std::size_t i = start; i < traj.size(); ++i) {
        state_sum += state_distance(traj, i, optimum.x);
        input_sum += std::fabs(traj.u_hat[i] - optimum.u);
    }
    r.window_mean_state_error = state_sum / static_cast<double>(count);
    r.window_mean_input_error = input_sum / static_cast<double>(count);
    return r;
}

EnvelopeCheck decay_envelope_check(const Trajectory& traj, double y_star,
                                   const PrescribedTime& pt) {
    EnvelopeCheck out;
    const std::size_t n = traj.size();
    if (n < 2) throw Error("decay_envelope_check: trajectory has fewer than two samples");

    const double initial = traj.y[0] - y_star;
    const double tol = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(y_star));
    if (initial <= tol) {
        out.passes = true;
        out.trivial = true;
        out.fitted_rate = kNaN;
        return out;
    }
    const double floor = std::max(1e-12 * initial, tol);

    std::vector<double> v(n);
    kernels::v_of_t(traj.t, pt.T, v);

    auto scaled = [&](std::size_t i) { return (traj.y[i] - y_star) / v[i]; };
    const double r0 = scaled(0);
    const double excess_end = traj.y[n - 1] - y_star;
    const double r_end = excess_end > floor ? scaled(n - 1) : 0.0;

    auto collect = [&](std::size_t from, std::size_t to, std::vector<double>& s,
                       std::vector<double>& logr) {
        s.clear();
        logr.clear();
        for (std::size_t i = from; i < to; ++i) {
            if (traj.y[i] - y_star > floor) {
                s.push_back(traj.tau[i]);
                logr.push_back(std::log(scaled(i)));
            }
        }
    };
    std::vector<double> s, logr;
    collect(n / 10, n - n / 10, s, logr);
    if (s.size() < 3) collect(0, n, s, logr);

    if (s.size() < 3) {
        out.fitted_rate = kNaN;
        out.passes = r_end < r0;
        return out;
    }
    const auto sums = kernels::linear_fit_sums(s, logr);
    const double denom = sums.count * sums.sxx - sums.sx * sums.sx;
    out.points_used = s.size();
    out.fitted_rate = denom > 0.0 ? (sums.count * sums.sxy - sums.sx * sums.sy) / denom : kNaN;
    out.passes = r_end < r0 && out.fitted_rate < 0.0;
    return out;
}

TrajectoryDifference compare_trajectories(const Trajectory& a, const Trajectory& b,
                                          unsigned signals) {
    if (!a.completed() || !b.completed()) {
        throw Error("compare_trajectories: both trajectories must be completed");
    }
    if (a.size() != b.size() || a.n != b.n || kernels::max_abs_diff(a.t, b.t) != 0.0) {
        throw Error("compare_trajectories: trajectories are not on a common output grid");
    }
    TrajectoryDifference d;
    double sq = 0.0;
    std::size_t count = 0;
    auto add = [&](std::string name, const std::vector<double>& va, const std::vector<double>& vb) {
        const double sup = kernels::max_abs_diff(va, vb);
        const double ss = kernels::sum_sq_diff(va, vb);
        d.per_signal.push_back({std::move(name), sup, std::sqrt(ss / static_cast<double>(va.size()))});
        d.sup_error = std::max(d.sup_error, sup);
        sq += ss;
        count += va.size();
    };
    if (signals & kSignalState) {
        for (std::size_t j = 0; j < a.n; ++j) add("x" + std::to_string(j + 1), a.x[j], b.x[j]);
    }
    if (signals & kSignalInput) add("u", a.u, b.u);
    if (signals & kSignalOutput) add("y", a.y, b.y);
    if (signals & kSignalEstimate) add("xi", a.xi, b.xi);
    if (signals & kSignalIntegral) add("u_hat", a.u_hat, b.u_hat);
    d.rms_error = count > 0 ? std::sqrt(sq / static_cast<double>(count)) : 0.0;
    return d;
}

double estimate_tracking(const Trajectory& traj, const PlantModel& plant, double window) {
    if (!(window > 0.0 && window <= 1.0)) {
        throw std::invalid_argument("estimate_tracking: window must lie in (0, 1]");
    }
    if (traj.size() == 0) throw Error("estimate_tracking: empty trajectory");
    const std::size_t start = window_start(traj.t, window, 1);
    double s = 0.0;
    for (std::size_t i = start; i < traj.size(); ++i) {
        s += std::fabs(traj.xi[i] - lie_lgh(plant, traj.state(i)));
    }
    return s / static_cast<double>(traj.size() - start);
}

}  // namespace ptesc
