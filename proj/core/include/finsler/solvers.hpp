#pragma once

#include <string>
#include <vector>

#include "finsler/bounds.hpp"
#include "finsler/manifold.hpp"
#include "finsler/measure.hpp"

namespace finsler::solvers {

enum class Termination { gradient_tolerance, max_iterations, atom_criterion, flow_horizon };

std::string to_string(Termination t);

/// One recorded iterate. Check fields not applicable to an algorithm are NaN.
struct IterateRecord {
    Vector point;
    double objective = 0.0;
    double grad_dual_norm = 0.0;
    /// Discrete descent: E(x_{k+1}) - (E(x_k) - F(grad)^2 / (2 C_H)); must be
    /// <= slack for the step constant to be consistent.
    double descent_slack = std::numeric_limits<double>::quiet_NaN();
    /// Flows: E(x_{k+1}) - E(x_k); nonincreasing trace keeps this <= 0.
    double monotonic_delta = std::numeric_limits<double>::quiet_NaN();
    /// Flows: relative mismatch between the observed objective rate and the
    /// predicted decay rate of the continuous flow.
    double rate_rel_err = std::numeric_limits<double>::quiet_NaN();
    bool in_ball = true;
};

struct SolverReport {
    Vector final_point;
    double final_objective = 0.0;
    double final_grad_dual_norm = 0.0;
    int iterations = 0;
    Termination termination = Termination::max_iterations;
    std::vector<IterateRecord> trace;
    /// Discrete descent only.
    double step_constant = std::numeric_limits<double>::quiet_NaN();
    bool start_condition_met = true;
    bool containment_ok = true;
    /// Median flow: support lies on (or near) a single line in coordinates,
    /// where uniqueness is not guaranteed.
    bool collinear_support_risk = false;
};

struct FlowOptions {
    double horizon = 100.0;
    double dt = 1e-2;
    double grad_tolerance = 1e-9;
    int max_iterations = 10000;
};

struct DescentOptions {
    double grad_tolerance = 1e-9;
    int max_iterations = 10000;
};

/// p-energy E_{mu,p}(x) = sum_i w_i rho(x, z_i)^p; p = 1 is the median
/// functional.
double p_energy(const Manifold& manifold, const WeightedMeasure& mu, const Vector& x, double p);

/// Differential d E_{mu,p} at x, assembled per atom from the first variation
/// of the distance. Requires p > 1 unless no atom sits at x; atoms at x with
/// p < 2 are rejected (median path applies there).
Covector p_energy_differential(const Manifold& manifold, const WeightedMeasure& mu,
                               const Vector& x, double p);

/// Gradient L^{-1}(d E_{mu,p}).
TangentVector p_energy_gradient(const Manifold& manifold, const WeightedMeasure& mu,
                                const Vector& x, double p);

/// Continuous gradient flow x' = grad(-E_{mu,p}) discretized by explicit
/// geodesic Euler steps.
SolverReport mean_gradient_flow(const Manifold& manifold, const WeightedMeasure& mu, double p,
                                const Vector& x0, const FlowOptions& opts = {});

/// Discrete gradient descent with the universal step t_k = F(grad)/C_H; each
/// iterate must obey the guaranteed-decrease inequality.
SolverReport mean_gradient_descent(const Manifold& manifold, const WeightedMeasure& mu, double p,
                                   const Vector& x0, const bounds::MeanProblemBounds& problem,
                                   const DescentOptions& opts = {});

/// Median direction vector H(x) = L^{-1}(d F_{mu_x}), the gradient of the
/// median functional with the atom at x removed.
TangentVector median_direction(const Manifold& manifold, const WeightedMeasure& mu,
                               const Vector& x);

/// Local-minimum criterion for the median functional at x:
/// mu({x}) >= F*(d F_{mu_x}).
bool atom_local_min_test(const Manifold& manifold, const WeightedMeasure& mu, const Vector& x);

/// Median flow x' = -H(x), stopping at atoms where the local-minimum
/// criterion fires or when the dual gradient norm is below tolerance.
SolverReport median_flow(const Manifold& manifold, const WeightedMeasure& mu, const Vector& x0,
                         const FlowOptions& opts = {});

} // namespace finsler::solvers
