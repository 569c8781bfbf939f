#pragma once

#include "finsler/manifold.hpp"
#include "finsler/measure.hpp"

namespace finsler::bounds {

/// x * cot(x) extended continuously through x = 0.
double x_cot_x(double x);

/// x * coth(x) extended continuously through x = 0.
double x_coth_x(double x);

/// Uniqueness radius R(p, k, delta, C) = min((p-1)/(C^2 delta),
/// arctan(sqrt(k)/(C^2 delta)) / sqrt(k)). Exact zeros of k or delta select
/// the analytic limits; negative values are rejected.
double uniqueness_radius(double p, double k, double delta, double C);

/// Lower bound on D_p''(0) at distance r:
/// p r^{p-2} (min(p-1, sqrt(k) r cot(sqrt(k) r)) / C^2 - delta r).
/// Requires sqrt(k) * r < pi.
double hessian_lower_bound(double p, double r, double k, double delta, double C);

/// Upper bound on D_p''(0) at distance r:
/// p r^{p-2} (D^2 max(p-1, beta r coth(beta r)) + delta' r).
double hessian_upper_bound(double p, double r, double beta, double delta_prime, double D);

/// Step-bound function H(r); coincides with hessian_upper_bound pointwise.
double step_majorant(double p, double r, double beta, double delta_prime, double D);

/// H_mu(x) = sum_i w_i H(rho(x, z_i)); majorizes the second derivative of the
/// p-energy along unit-speed geodesics. Unbounded (error) when p < 2 and an
/// atom sits at distance zero.
double step_majorant_measure(const Manifold& manifold, const WeightedMeasure& mu, const Vector& x,
                             double p, double beta, double delta_prime, double D);

/// Conservative constant C_H bounding H_mu on the closed ball around
/// region_center: max over a coordinate grid (9 points per axis, restricted
/// to the forward ball) times a 1.25 safety factor.
double step_constant_CH(const Manifold& manifold, const WeightedMeasure& mu, double p,
                        const CurvatureBounds& bounds, const Vector& region_center,
                        double region_radius);

/// Radius C(1+C)R of the ball guaranteed to contain a minimizer.
double existence_ball(double C, double R);

/// Support-radius condition R <= R(p, k, delta, C) / (C (C+1)^2).
bool support_condition(double p, double k, double delta, double C, double R);

/// Convexity margin eta - delta for the median functional: eta estimated by
/// minimizing the comparison integrand over a deterministic sample of unit
/// directions at each region point. A positive return certifies strict
/// convexity on the region.
double median_convexity_margin(const Manifold& manifold, const WeightedMeasure& mu,
                               const std::vector<Vector>& region, double k, double delta,
                               int directions = 512);

/// Parameters of a mean problem: exponent, curvature data, support radius,
/// and the support-ball center.
struct MeanProblemBounds {
    double p = 2.0;
    CurvatureBounds curvature;
    double R = 1.0;
    Vector x0;

    void validate() const;
};

} // namespace finsler::bounds
