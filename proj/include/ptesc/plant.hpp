#pragma once

// Control-affine plants  dx/dt = f(x) + g(x) u,  y = h(x)  with scalar input.
//
// The controller never looks inside a PlantModel except through the measured
// output y. Derivatives (Lie derivatives, Hessians, steady-state manifold) are
// only used by the model-based target controller, oracles and audits.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ptesc {

using VectorField = std::function<void(std::span<const double> x, std::span<double> out)>;
using ScalarField = std::function<double(std::span<const double> x)>;

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Axis-aligned box in state space.
struct StateBox {
    std::vector<double> lower;
    std::vector<double> upper;
    friend bool operator==(const StateBox&, const StateBox&) = default;
};

struct KnownOptimum {
    std::vector<double> x;
    double u = 0.0;
};

struct PlantModel {
    std::string name;
    std::size_t n = 0;
    VectorField drift;
    VectorField input_map;
    ScalarField cost;
    /// Analytic dh/dx; a central-difference gradient is used when empty.
    VectorField grad_cost;
    std::optional<KnownOptimum> known_optimum;
    /// Region searched for steady states and audited by check_assumptions.
    StateBox box;
    /// Input interval bracketing the optimum of the steady-state cost.
    Interval u_range;
};

namespace plants {

/// x1' = -x1 + x2^2, x2' = -x1 + x2 + u, y = 1 + x1^2 + x2^2.
PlantModel general_nonlinear();
/// Monod-kinetics fed-batch bioreactor; x1 biomass, x2 substrate, u feed rate.
PlantModel fed_batch_bioreactor();
/// x' = -x + u, y = (x - 1)^2. Optimum (x, u) = (1, 1).
PlantModel scalar_quadratic();

[[nodiscard]] const std::vector<std::string>& builtin_names();
/// Throws std::invalid_argument for an unknown name.
PlantModel by_name(const std::string& name);

}  // namespace plants

// ---------------------------------------------------------------------------
// Pointwise evaluation
// ---------------------------------------------------------------------------

std::vector<double> eval_rhs(const PlantModel& plant, std::span<const double> x, double u);
double eval_cost(const PlantModel& plant, std::span<const double> x);

/// dh/dx, analytic when available.
std::vector<double> cost_gradient(const PlantModel& plant, std::span<const double> x);
/// Central differences with step 1e-6 max(1, |x_i|), ignoring grad_cost.
std::vector<double> numeric_gradient(const PlantModel& plant, std::span<const double> x);
/// Symmetric Hessian of h by finite differences.
std::vector<double> numeric_hessian(const PlantModel& plant, std::span<const double> x);

double lie_lgh(const PlantModel& plant, std::span<const double> x);
double lie_lfh(const PlantModel& plant, std::span<const double> x);
/// L_g(L_g h): derivative of L_g h along g.
double lie_lg2h(const PlantModel& plant, std::span<const double> x);

// ---------------------------------------------------------------------------
// Steady-state manifold
// ---------------------------------------------------------------------------

struct SteadyStateOptions {
    std::optional<std::vector<double>> initial_guess;
    /// Overrides plant.box for the seed grid.
    std::optional<StateBox> box;
    int max_newton_iterations = 60;
    /// Horizon of the relaxation fallback.
    double relaxation_horizon = 200.0;
};

/// f(x) + g(x) u_hat - k g(x) g(x)^T dh/dx(x)^T.
std::vector<double> steady_state_residual(const PlantModel& plant, std::span<const double> x,
                                          double u_hat, double k);

/// Solves the residual to 1e-10 (1 + |x|). Throws SolverError.
std::vector<double> steady_state_map(const PlantModel& plant, double u_hat, double k,
                                     const SteadyStateOptions& options = {});

double steady_state_cost(const PlantModel& plant, double u_hat, double k,
                         const SteadyStateOptions& options = {});

struct EquilibriumOptimum {
    double u = 0.0;
    std::vector<double> x;
    double y = 0.0;
    /// Grid inputs at which the steady-state solve failed.
    std::vector<double> failed_inputs;
};

/// Dense grid over u_range followed by golden-section refinement to 1e-8.
EquilibriumOptimum find_equilibrium_optimum(const PlantModel& plant, double k, Interval u_range,
                                            std::size_t grid_points = 1001);

/// known_optimum when the plant carries one, otherwise a search over plant.u_range.
EquilibriumOptimum resolve_optimum(const PlantModel& plant, double k);

// ---------------------------------------------------------------------------
// Assumption audit
// ---------------------------------------------------------------------------

enum class ViolationKind {
    CostBelowMinimum,    // h - h* <= 0 away from x*
    HessianNotPositive,  // smallest Hessian eigenvalue <= 0
    LghBelowBound,       // |L_g h|^2 < ratio_floor (h - h*)
    Lg2hNotPositive,     // L_g^2 h <= 0
};

[[nodiscard]] const char* to_string(ViolationKind kind) noexcept;

struct AssumptionViolation {
    ViolationKind kind;
    std::vector<double> x;
    double value = 0.0;
};

struct AssumptionCheckOptions {
    double ratio_floor = 1e-8;
    /// Samples closer than this (relative to box size) to x* are skipped.
    double exclusion_radius = 1e-6;
    /// Inputs sampled around u* for the alpha1 statistic.
    std::size_t alpha1_inputs = 11;
};

struct AssumptionReport {
    std::vector<double> x_star;
    double u_star = 0.0;
    double h_star = 0.0;
    double alpha_h_min = 0.0;
    double beta1 = 0.0;
    double beta2 = 0.0;
    double beta3 = 0.0;
    double beta4 = 0.0;
    /// min of -(L_f h + L_g h u - k|L_g h|^2)/|x - pi(u)|^2 over sampled (x, u).
    double alpha1_min = 0.0;
    std::size_t samples = 0;
    std::vector<AssumptionViolation> violations;
};

/// Samples `box` with a Halton sequence plus the 11^n lattice and records
/// empirical constants for the cost, L_g h and L_g^2 h conditions.
AssumptionReport check_assumptions(const PlantModel& plant, const StateBox& box, double k,
                                   std::size_t samples, const AssumptionCheckOptions& options = {});

/// Re-evaluates a recorded violation at its point; true when it still fails.
bool violation_reproduces(const PlantModel& plant, const AssumptionReport& report,
                          const AssumptionViolation& violation,
                          const AssumptionCheckOptions& options = {});

}  // namespace ptesc
