#include "ptesc/plant.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "ptesc/errors.hpp"
#include "ptesc/integrator.hpp"

namespace ptesc {

namespace {

constexpr double kGradStep = 1e-6;
constexpr double kHessStep = 1e-4;

void require_dim(const PlantModel& plant, std::span<const double> x, const char* fn) {
    if (x.size() != plant.n) {
        throw std::invalid_argument(std::string(fn) + ": state has length " +
                                    std::to_string(x.size()) + ", plant '" + plant.name +
                                    "' expects " + std::to_string(plant.n));
    }
}

void require_finite(std::span<const double> x, const char* what) {
    if (!detail::all_finite(x)) {
        throw EvaluationError(std::string(what) + ": non-finite value",
                              std::vector<double>(x.begin(), x.end()));
    }
}

double dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

std::vector<double> field(const VectorField& fn, std::size_t n, std::span<const double> x) {
    std::vector<double> out(n);
    fn(x, out);
    return out;
}

double coord_step(double xi, double base) { return base * std::max(1.0, std::fabs(xi)); }

}  // namespace

// ---------------------------------------------------------------------------
// Builtin plants
// ---------------------------------------------------------------------------

namespace plants {

PlantModel general_nonlinear() {
    PlantModel p;
    p.name = "general_nonlinear";
    p.n = 2;
    p.drift = [](std::span<const double> x, std::span<double> out) {
        out[0] = -x[0] + x[1] * x[1];
        out[1] = -x[0] + x[1];
    };
    p.input_map = [](std::span<const double>, std::span<double> out) {
        out[0] = 0.0;
        out[1] = 1.0;
    };
    p.cost = [](std::span<const double> x) { return 1.0 + x[1] * x[1] + x[0] * x[0]; };
    p.grad_cost = [](std::span<const double> x, std::span<double> out) {
        out[0] = 2.0 * x[0];
        out[1] = 2.0 * x[1];
    };
    p.known_optimum = KnownOptimum{{0.0, 0.0}, 0.0};
    p.box = {{-5.0, -5.0}, {5.0, 5.0}};
    p.u_range = {-5.0, 5.0};
    return p;
}

PlantModel fed_batch_bioreactor() {
    // Monod growth rate mu(S) = S/(0.2 + S), yield 1/2, feed substrate 10.
    PlantModel p;
    p.name = "fed_batch_bioreactor";
    p.n = 2;
    p.drift = [](std::span<const double> x, std::span<double> out) {
        const double growth = x[0] * x[1] / (0.2 + x[1]);
        out[0] = growth;
        out[1] = -2.0 * growth;
    };
    p.input_map = [](std::span<const double> x, std::span<double> out) {
        out[0] = -x[0];
        out[1] = 10.0 - x[1];
    };
    p.cost = [](std::span<const double> x) { return -x[0] * x[1] / (0.2 + x[1]); };
    p.grad_cost = [](std::span<const double> x, std::span<double> out) {
        const double denom = 0.2 + x[1];
        out[0] = -x[1] / denom;
        out[1] = -x[0] * 0.2 / (denom * denom);
    };
    // Washout (x1 = 0, x2 = 10) is a root for every input; keep the seed box off it.
    p.box = {{0.5, 0.01}, {9.5, 9.5}};
    p.u_range = {0.01, 0.99};
    return p;
}

PlantModel scalar_quadratic() {
    PlantModel p;
    p.name = "scalar_quadratic";
    p.n = 1;
    p.drift = [](std::span<const double> x, std::span<double> out) { out[0] = -x[0]; };
    p.input_map = [](std::span<const double>, std::span<double> out) { out[0] = 1.0; };
    p.cost = [](std::span<const double> x) {
        const double d = x[0] - 1.0;
        return d * d;
    };
    p.grad_cost = [](std::span<const double> x, std::span<double> out) {
        out[0] = 2.0 * (x[0] - 1.0);
    };
    p.known_optimum = KnownOptimum{{1.0}, 1.0};
    p.box = {{-3.0}, {5.0}};
    p.u_range = {-2.0, 4.0};
    return p;
}

const std::vector<std::string>& builtin_names() {
    static const std::vector<std::string> names{"general_nonlinear", "fed_batch_bioreactor",
                                                "scalar_quadratic"};
    return names;
}

PlantModel by_name(const std::string& name) {
    if (name == "general_nonlinear") return general_nonlinear();
    if (name == "fed_batch_bioreactor") return fed_batch_bioreactor();
    if (name == "scalar_quadratic") return scalar_quadratic();
    throw std::invalid_argument("unknown plant '" + name + "'");
}

}  // namespace plants

// ---------------------------------------------------------------------------
// Pointwise evaluation
// ---------------------------------------------------------------------------

std::vector<double> eval_rhs(const PlantModel& plant, std::span<const double> x, double u) {
    require_dim(plant, x, "eval_rhs");
    require_finite(x, "eval_rhs: state");
    if (!std::isfinite(u)) {
        std::vector<double> point(x.begin(), x.end());
        point.push_back(u);
        throw EvaluationError("eval_rhs: non-finite input", std::move(point));
    }
    auto f = field(plant.drift, plant.n, x);
    const auto g = field(plant.input_map, plant.n, x);
    for (std::size_t i = 0; i < plant.n; ++i) f[i] += g[i] * u;
    require_finite(f, "eval_rhs: result");
    return f;
}

double eval_cost(const PlantModel& plant, std::span<const double> x) {
    require_dim(plant, x, "eval_cost");
    require_finite(x, "eval_cost: state");
    const double y = plant.cost(x);
    if (!std::isfinite(y)) {
        throw EvaluationError("eval_cost: non-finite cost", std::vector<double>(x.begin(), x.end()));
    }
    return y;
}

std::vector<double> numeric_gradient(const PlantModel& plant, std::span<const double> x) {
    require_dim(plant, x, "numeric_gradient");
    std::vector<double> probe(x.begin(), x.end());
    std::vector<double> grad(plant.n);
    for (std::size_t i = 0; i < plant.n; ++i) {
        const double step = coord_step(x[i], kGradStep);
        probe[i] = x[i] + step;
        const double up = plant.cost(probe);
        probe[i] = x[i] - step;
        const double down = plant.cost(probe);
        probe[i] = x[i];
        grad[i] = (up - down) / (2.0 * step);
    }
    return grad;
}

std::vector<double> cost_gradient(const PlantModel& plant, std::span<const double> x) {
    require_dim(plant, x, "cost_gradient");
    if (plant.grad_cost) return field(plant.grad_cost, plant.n, x);
    return numeric_gradient(plant, x);
}

std::vector<double> numeric_hessian(const PlantModel& plant, std::span<const double> x) {
    require_dim(plant, x, "numeric_hessian");
    const std::size_t n = plant.n;
    std::vector<double> H(n * n);
    std::vector<double> probe(x.begin(), x.end());
    if (plant.grad_cost) {
        // Central differences of the analytic gradient, then symmetrized.
        std::vector<double> gp(n), gm(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double step = coord_step(x[j], kGradStep);
            probe[j] = x[j] + step;
            plant.grad_cost(probe, gp);
            probe[j] = x[j] - step;
            plant.grad_cost(probe, gm);
            probe[j] = x[j];
            for (std::size_t i = 0; i < n; ++i) H[i * n + j] = (gp[i] - gm[i]) / (2.0 * step);
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double s = 0.5 * (H[i * n + j] + H[j * n + i]);
                H[i * n + j] = s;
                H[j * n + i] = s;
            }
        }
        return H;
    }
    const double h0 = plant.cost(x);
    for (std::size_t i = 0; i < n; ++i) {
        const double si = coord_step(x[i], kHessStep);
        probe[i] = x[i] + si;
        const double up = plant.cost(probe);
        probe[i] = x[i] - si;
        const double down = plant.cost(probe);
        probe[i] = x[i];
        H[i * n + i] = (up - 2.0 * h0 + down) / (si * si);
        for (std::size_t j = i + 1; j < n; ++j) {
            const double sj = coord_step(x[j], kHessStep);
            auto at = [&](double di, double dj) {
                probe[i] = x[i] + di;
                probe[j] = x[j] + dj;
                const double v = plant.cost(probe);
                probe[i] = x[i];
                probe[j] = x[j];
                return v;
            };
            const double hij = (at(si, sj) - at(si, -sj) - at(-si, sj) + at(-si, -sj)) /
                               (4.0 * si * sj);
            H[i * n + j] = hij;
            H[j * n + i] = hij;
        }
    }
    return H;
}

double lie_lgh(const PlantModel& plant, std::span<const double> x) {
    require_dim(plant, x, "lie_lgh");
    const double v = dot(cost_gradient(plant, x), field(plant.input_map, plant.n, x));
    if (!std::isfinite(v)) {
        throw EvaluationError("lie_lgh: non-finite result", std::vector<double>(x.begin(), x.end()));
    }
    return v;
}

double lie_lfh(const PlantModel& plant, std::span<const double> x) {
    require_dim(plant, x, "lie_lfh");
    const double v = dot(cost_gradient(plant, x), field(plant.drift, plant.n, x));
    if (!std::isfinite(v)) {
        throw EvaluationError("lie_lfh: non-finite result", std::vector<double>(x.begin(), x.end()));
    }
    return v;
}

double lie_lg2h(const PlantModel& plant, std::span<const double> x) {
    require_dim(plant, x, "lie_lg2h");
    // Directional central difference of L_g h along g.
    const auto g = field(plant.input_map, plant.n, x);
    const double gnorm = norm(g);
    if (gnorm == 0.0) return 0.0;
    const double step = 1e-5 * std::max(1.0, norm(x)) / gnorm;
    std::vector<double> up(x.begin(), x.end()), down(x.begin(), x.end());
    for (std::size_t i = 0; i < plant.n; ++i) {
        up[i] += step * g[i];
        down[i] -= step * g[i];
    }
    const double v = (lie_lgh(plant, up) - lie_lgh(plant, down)) / (2.0 * step);
    if (!std::isfinite(v)) {
        throw EvaluationError("lie_lg2h: non-finite result", std::vector<double>(x.begin(), x.end()));
    }
    return v;
}

// ---------------------------------------------------------------------------
// Steady-state manifold
// ---------------------------------------------------------------------------

std::vector<double> steady_state_residual(const PlantModel& plant, std::span<const double> x,
                                          double u_hat, double k) {
    require_dim(plant, x, "steady_state_residual");
    auto r = field(plant.drift, plant.n, x);
    const auto g = field(plant.input_map, plant.n, x);
    const double lgh = dot(cost_gradient(plant, x), g);
    const double effective = u_hat - k * lgh;
    for (std::size_t i = 0; i < plant.n; ++i) r[i] += g[i] * effective;
    return r;
}

namespace {

double residual_norm(const PlantModel& plant, std::span<const double> x, double u_hat, double k) {
    const auto r = steady_state_residual(plant, x, u_hat, k);
    const double v = norm(r);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

double manifold_tolerance(std::span<const double> x) { return 1e-10 * (1.0 + norm(x)); }

bool inside(const StateBox& box, std::span<const double> x) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] >= box.lower[i] && x[i] <= box.upper[i])) return false;
    }
    return true;
}

/// Damped Newton with a central-difference Jacobian, iterates confined to
/// `box`. Returns true on success.
bool newton(const PlantModel& plant, double u_hat, double k, const StateBox& box,
            std::vector<double>& x, int max_iterations, double& best) {
    if (!inside(box, x)) return false;
    const std::size_t n = plant.n;
    Eigen::MatrixXd J(n, n);
    Eigen::VectorXd r(n);
    std::vector<double> probe(n), trial(n);
    double rn = residual_norm(plant, x, u_hat, k);
    best = std::min(best, rn);
    for (int it = 0; it < max_iterations; ++it) {
        if (rn <= manifold_tolerance(x)) return true;
        const auto r0 = steady_state_residual(plant, x, u_hat, k);
        for (std::size_t i = 0; i < n; ++i) r(i) = r0[i];
        probe = x;
        for (std::size_t j = 0; j < n; ++j) {
            const double step = coord_step(x[j], kGradStep);
            probe[j] = x[j] + step;
            const auto rp = steady_state_residual(plant, probe, u_hat, k);
            probe[j] = x[j] - step;
            const auto rm = steady_state_residual(plant, probe, u_hat, k);
            probe[j] = x[j];
            for (std::size_t i = 0; i < n; ++i) J(i, j) = (rp[i] - rm[i]) / (2.0 * step);
        }
        if (!J.allFinite()) return false;
        const Eigen::VectorXd dx = J.colPivHouseholderQr().solve(-r);
        if (!dx.allFinite()) return false;

        double lambda = 1.0;
        double trial_norm = std::numeric_limits<double>::infinity();
        while (lambda > 1e-8) {
            for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] + lambda * dx(i);
            trial_norm = inside(box, trial) ? residual_norm(plant, trial, u_hat, k)
                                            : std::numeric_limits<double>::infinity();
            if (trial_norm < (1.0 - 1e-4 * lambda) * rn) break;
            lambda *= 0.5;
        }
        if (!(trial_norm < rn)) return rn <= manifold_tolerance(x);
        x = trial;
        rn = trial_norm;
        best = std::min(best, rn);
    }
    return rn <= manifold_tolerance(x);
}

/// Integrates dx/dt = residual(x) towards a stable equilibrium.
bool relax(const PlantModel& plant, double u_hat, double k, const StateBox& box,
           std::vector<double>& x, double horizon) {
    auto rhs = [&](double, std::span<const double> z, std::span<double> dz) {
        const auto r = steady_state_residual(plant, z, u_hat, k);
        std::copy(r.begin(), r.end(), dz.begin());
    };
    Rk45Stepper stepper(plant.n, 1e-10, 1e-12);
    double t = 0.0;
    double h = 1e-3;
    try {
        while (t < horizon) {
            const auto s = stepper.step(rhs, t, std::span<double>(x), h, horizon - t, 1e-14);
            t += s.h_used;
            h = s.h_next;
            if (!detail::all_finite(x) || norm(x) > 1e8) return false;
        }
    } catch (const Error&) {
        return false;
    }
    return inside(box, x);
}

std::vector<std::vector<double>> lattice(const StateBox& box, std::size_t per_axis) {
    const std::size_t n = box.lower.size();
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= per_axis;
    std::vector<std::vector<double>> points;
    points.reserve(total);
    std::vector<std::size_t> idx(n, 0);
    for (std::size_t c = 0; c < total; ++c) {
        std::vector<double> p(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double frac = static_cast<double>(idx[i]) / static_cast<double>(per_axis - 1);
            p[i] = box.lower[i] + frac * (box.upper[i] - box.lower[i]);
        }
        points.push_back(std::move(p));
        for (std::size_t i = 0; i < n; ++i) {
            if (++idx[i] < per_axis) break;
            idx[i] = 0;
        }
    }
    return points;
}

}  // namespace

std::vector<double> steady_state_map(const PlantModel& plant, double u_hat, double k,
                                     const SteadyStateOptions& options) {
    if (!std::isfinite(u_hat)) throw EvaluationError("steady_state_map: non-finite input", {u_hat});
    double best = std::numeric_limits<double>::infinity();

    const StateBox& box = options.box ? *options.box : plant.box;
    if (box.lower.size() != plant.n || box.upper.size() != plant.n) {
        throw std::invalid_argument("steady_state_map: search box dimension mismatch for plant '" +
                                    plant.name + "'");
    }
    if (options.initial_guess) {
        auto x = *options.initial_guess;
        require_dim(plant, x, "steady_state_map");
        if (newton(plant, u_hat, k, box, x, options.max_newton_iterations, best)) return x;
    }

    auto seeds = lattice(box, 11);
    std::vector<std::pair<double, std::size_t>> ranked;
    ranked.reserve(seeds.size());
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        ranked.emplace_back(residual_norm(plant, seeds[i], u_hat, k), i);
    }
    std::sort(ranked.begin(), ranked.end());

    const std::size_t attempts = std::min<std::size_t>(3, ranked.size());
    for (std::size_t a = 0; a < attempts; ++a) {
        auto x = seeds[ranked[a].second];
        if (newton(plant, u_hat, k, box, x, options.max_newton_iterations, best)) return x;
    }

    auto x = seeds[ranked.front().second];
    if (relax(plant, u_hat, k, box, x, options.relaxation_horizon) &&
        newton(plant, u_hat, k, box, x, options.max_newton_iterations, best)) {
        return x;
    }
    throw SolverError("steady_state_map: no root for u_hat = " + std::to_string(u_hat) +
                          " on plant '" + plant.name + "' (best residual " +
                          std::to_string(best) + ")",
                      best);
}

double steady_state_cost(const PlantModel& plant, double u_hat, double k,
                         const SteadyStateOptions& options) {
    return eval_cost(plant, steady_state_map(plant, u_hat, k, options));
}

EquilibriumOptimum find_equilibrium_optimum(const PlantModel& plant, double k, Interval u_range,
                                            std::size_t grid_points) {
    if (!(u_range.hi > u_range.lo)) {
        throw std::invalid_argument("find_equilibrium_optimum: empty input range");
    }
    grid_points = std::max<std::size_t>(grid_points, 1000);

    EquilibriumOptimum result;
    std::vector<double> us(grid_points), costs(grid_points, std::numeric_limits<double>::infinity());
    std::vector<std::vector<double>> states(grid_points);
    std::optional<std::vector<double>> seed;
    for (std::size_t i = 0; i < grid_points; ++i) {
        us[i] = u_range.lo + (u_range.hi - u_range.lo) * static_cast<double>(i) /
                                 static_cast<double>(grid_points - 1);
        SteadyStateOptions opts;
        opts.initial_guess = seed;
        try {
            states[i] = steady_state_map(plant, us[i], k, opts);
            costs[i] = eval_cost(plant, states[i]);
            seed = states[i];
        } catch (const Error&) {
            result.failed_inputs.push_back(us[i]);
            seed.reset();
        }
    }
    const auto best_it = std::min_element(costs.begin(), costs.end());
    if (!std::isfinite(*best_it)) {
        throw SolverError("find_equilibrium_optimum: no steady state found on plant '" +
                              plant.name + "'",
                          std::numeric_limits<double>::infinity());
    }
    const std::size_t ib = static_cast<std::size_t>(best_it - costs.begin());

    double a = us[ib > 0 ? ib - 1 : ib];
    double b = us[ib + 1 < grid_points ? ib + 1 : ib];
    std::vector<double> anchor = states[ib];
    auto ell = [&](double u) {
        SteadyStateOptions opts;
        opts.initial_guess = anchor;
        try {
            return eval_cost(plant, steady_state_map(plant, u, k, opts));
        } catch (const Error&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = ell(c), fd = ell(d);
    while (b - a > 1e-8) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = ell(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = ell(d);
        }
    }
    double u_star = 0.5 * (a + b);
    double y_star = ell(u_star);
    if (!(y_star <= costs[ib])) {
        u_star = us[ib];
        y_star = costs[ib];
    }
    SteadyStateOptions opts;
    opts.initial_guess = anchor;
    result.u = u_star;
    result.x = steady_state_map(plant, u_star, k, opts);
    result.y = eval_cost(plant, result.x);
    return result;
}

EquilibriumOptimum resolve_optimum(const PlantModel& plant, double k) {
    if (plant.known_optimum) {
        EquilibriumOptimum r;
        r.u = plant.known_optimum->u;
        r.x = plant.known_optimum->x;
        r.y = eval_cost(plant, r.x);
        return r;
    }
    return find_equilibrium_optimum(plant, k, plant.u_range);
}

// ---------------------------------------------------------------------------
// Assumption audit
// ---------------------------------------------------------------------------

const char* to_string(ViolationKind kind) noexcept {
    switch (kind) {
        case ViolationKind::CostBelowMinimum: return "cost_below_minimum";
        case ViolationKind::HessianNotPositive: return "hessian_not_positive";
        case ViolationKind::LghBelowBound: return "lgh_below_bound";
        case ViolationKind::Lg2hNotPositive: return "lg2h_not_positive";
    }
    return "unknown";
}

namespace {

double radical_inverse(std::size_t index, std::size_t base) {
    double result = 0.0;
    double f = 1.0 / static_cast<double>(base);
    while (index > 0) {
        result += f * static_cast<double>(index % base);
        index /= base;
        f /= static_cast<double>(base);
    }
    return result;
}

std::size_t nth_prime(std::size_t i) {
    static const std::size_t primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47};
    if (i >= std::size(primes)) throw std::invalid_argument("halton: dimension too large");
    return primes[i];
}

double min_hessian_eigenvalue(const PlantModel& plant, std::span<const double> x) {
    const std::size_t n = plant.n;
    const auto H = numeric_hessian(plant, x);
    Eigen::MatrixXd M(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) M(i, j) = H[i * n + j];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(M, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

double lgh_ratio(const PlantModel& plant, std::span<const double> x, double h_star) {
    const double excess = plant.cost(x) - h_star;
    const double lgh = lie_lgh(plant, x);
    return lgh * lgh / excess;
}

}  // namespace

AssumptionReport check_assumptions(const PlantModel& plant, const StateBox& box, double k,
                                   std::size_t samples, const AssumptionCheckOptions& options) {
    if (samples < 100) throw std::invalid_argument("check_assumptions: samples must be >= 100");
    if (box.lower.size() != plant.n || box.upper.size() != plant.n) {
        throw std::invalid_argument("check_assumptions: box dimension mismatch");
    }

    AssumptionReport report;
    const auto optimum = resolve_optimum(plant, k);
    report.x_star = optimum.x;
    report.u_star = optimum.u;
    report.h_star = eval_cost(plant, optimum.x);

    std::vector<std::vector<double>> points;
    std::size_t lattice_size = 1;
    for (std::size_t i = 0; i < plant.n; ++i) lattice_size *= 11;
    if (lattice_size <= 100000) points = lattice(box, 11);
    for (std::size_t s = 1; s <= samples; ++s) {
        std::vector<double> p(plant.n);
        for (std::size_t i = 0; i < plant.n; ++i) {
            p[i] = box.lower[i] + radical_inverse(s, nth_prime(i)) * (box.upper[i] - box.lower[i]);
        }
        points.push_back(std::move(p));
    }

    double diameter = 0.0;
    for (std::size_t i = 0; i < plant.n; ++i) {
        diameter = std::max(diameter, box.upper[i] - box.lower[i]);
    }
    const double exclusion = options.exclusion_radius * std::max(1.0, diameter);

    // Steady states for the alpha1 statistic, on inputs bracketing u*.
    std::vector<std::pair<double, std::vector<double>>> manifold;
    const double spread = 0.05 * (plant.u_range.hi - plant.u_range.lo);
    for (std::size_t j = 0; j < options.alpha1_inputs; ++j) {
        const double frac = options.alpha1_inputs > 1
                                ? static_cast<double>(j) / static_cast<double>(options.alpha1_inputs - 1)
                                : 0.5;
        const double u = report.u_star + spread * (2.0 * frac - 1.0);
        SteadyStateOptions opts;
        opts.initial_guess = report.x_star;
        try {
            manifold.emplace_back(u, steady_state_map(plant, u, k, opts));
        } catch (const Error&) {
        }
    }

    const double inf = std::numeric_limits<double>::infinity();
    report.alpha_h_min = inf;
    report.beta1 = inf;
    report.beta2 = -inf;
    report.beta3 = inf;
    report.beta4 = -inf;
    report.alpha1_min = inf;

    for (const auto& x : points) {
        std::vector<double> diff(plant.n);
        for (std::size_t i = 0; i < plant.n; ++i) diff[i] = x[i] - report.x_star[i];
        const bool at_optimum = norm(diff) <= exclusion;

        const double eig = min_hessian_eigenvalue(plant, x);
        report.alpha_h_min = std::min(report.alpha_h_min, eig);
        if (eig <= 0.0) report.violations.push_back({ViolationKind::HessianNotPositive, x, eig});

        const double lg2h = lie_lg2h(plant, x);
        report.beta3 = std::min(report.beta3, lg2h);
        report.beta4 = std::max(report.beta4, lg2h);
        if (lg2h <= 0.0) report.violations.push_back({ViolationKind::Lg2hNotPositive, x, lg2h});

        const double lgh = lie_lgh(plant, x);
        const double lfh = lie_lfh(plant, x);
        for (const auto& [u, pi] : manifold) {
            double dist2 = 0.0;
            for (std::size_t i = 0; i < plant.n; ++i) dist2 += (x[i] - pi[i]) * (x[i] - pi[i]);
            if (std::sqrt(dist2) <= exclusion) continue;
            const double q = -(lfh + lgh * u - k * lgh * lgh) / dist2;
            report.alpha1_min = std::min(report.alpha1_min, q);
        }

        if (at_optimum) continue;
        const double excess = plant.cost(x) - report.h_star;
        if (excess <= 0.0) {
            report.violations.push_back({ViolationKind::CostBelowMinimum, x, excess});
            continue;
        }
        const double ratio = lgh * lgh / excess;
        report.beta1 = std::min(report.beta1, ratio);
        report.beta2 = std::max(report.beta2, ratio);
        if (ratio < options.ratio_floor) {
            report.violations.push_back({ViolationKind::LghBelowBound, x, ratio});
        }
    }
    report.samples = points.size();
    return report;
}

bool violation_reproduces(const PlantModel& plant, const AssumptionReport& report,
                          const AssumptionViolation& violation,
                          const AssumptionCheckOptions& options) {
    const auto& x = violation.x;
    switch (violation.kind) {
        case ViolationKind::CostBelowMinimum: return plant.cost(x) - report.h_star <= 0.0;
        case ViolationKind::HessianNotPositive: return min_hessian_eigenvalue(plant, x) <= 0.0;
        case ViolationKind::LghBelowBound: {
            if (plant.cost(x) - report.h_star <= 0.0) return false;
            return lgh_ratio(plant, x, report.h_star) < options.ratio_floor;
        }
        case ViolationKind::Lg2hNotPositive: return lie_lg2h(plant, x) <= 0.0;
    }
    return false;
}

}  // namespace ptesc
