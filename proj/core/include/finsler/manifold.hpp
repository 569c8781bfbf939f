#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "finsler/norm.hpp"
#include "finsler/tangent.hpp"

namespace finsler {

/// Coordinate domain of the single chart. Bundled models use a box or a
/// predicate; the default accepts every point.
class ChartDomain {
public:
    static ChartDomain all();
    static ChartDomain box(Vector lo, Vector hi);
    static ChartDomain predicate(std::function<bool(const Vector&)> pred);

    bool contains(const Vector& x) const;

private:
    std::function<bool(const Vector&)> pred_;
};

/// One sampled state of a geodesic: parameter, point, velocity.
struct GeodesicSample {
    double t;
    Vector point;
    Vector velocity;
};

/// Result of integrating the geodesic spray. Immutable after construction.
struct GeodesicSolution {
    Vector initial_point;
    Vector initial_velocity;
    int steps = 0;
    double step_size = 0.0;
    std::vector<GeodesicSample> trajectory;
    /// max_t |F(v(t)) - F(v(0))| / F(v(0)); zero for the zero geodesic.
    double speed_drift = 0.0;

    const Vector& endpoint() const { return trajectory.back().point; }
    const Vector& end_velocity() const { return trajectory.back().velocity; }
};

/// User-supplied curvature data: flag-curvature bounds -beta^2 <= K <= k,
/// tangent-curvature bounds -delta <= T <= delta', norm-ratio bounds
/// C, D >= 1, and an injectivity-radius lower bound. Zero values of k, beta,
/// delta, delta' select the analytic flat limits of the bound formulas.
struct CurvatureBounds {
    double k = 0.0;
    double beta = 0.0;
    double delta = 0.0;
    double delta_prime = 0.0;
    double C = 1.0;
    double D = 1.0;
    double inj = std::numeric_limits<double>::infinity();

    void validate() const;
};

/// Numeric second derivative of s -> rho^p(gamma(s), z) along a unit-speed
/// geodesic, together with the comparison bounds evaluated from curvature
/// data.
struct SecondVariationDiag {
    double numeric = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double distance = 0.0;
    bool within_bounds = false;
};

/// Estimated norm-ratio constants over a region (both >= 1).
struct NormRatioConstants {
    double C = 1.0;
    double D = 1.0;
};

/// Single-chart Finsler manifold: a point-dependent Minkowski norm over a
/// coordinate domain. Geodesics integrate the spray ODE with fixed-step RK4;
/// the inverse exponential solves a shooting problem.
class Manifold {
public:
    static constexpr int kDefaultSteps = 128;

    Manifold(MinkowskiNorm norm_field, ChartDomain domain);

    /// Flat model: the norm does not vary with the base point.
    static Manifold flat(MinkowskiNorm norm);

    /// Hyperbolic ball model: metric 4 I / (1 - |x|^2)^2 on the open unit
    /// ball, closed-form metric derivative.
    static Manifold poincare_disk(int dimension = 2);

    int dimension() const { return dim_; }
    const MinkowskiNorm& norm() const { return norm_; }
    const ChartDomain& domain() const { return domain_; }

    /// True when the norm field is base-independent (straight-line geodesics).
    bool is_flat() const { return !norm_.depends_on_base(); }

    /// Manifold with the reverse structure F(-v); same chart.
    Manifold reversed() const;

    /// Geodesic spray coefficients G^i(x, y), positively 2-homogeneous in y.
    Vector geodesic_coefficients(const Vector& x, const Vector& y) const;

    /// Chern-connection Christoffel symbols; result[k](i,j) = Gamma^k_ij at
    /// (x, y), symmetric in (i, j).
    std::vector<Matrix> chern_christoffel(const Vector& x, const Vector& y) const;

    /// Integrates the spray over t in [0, 1] from (x, v); the trajectory must
    /// stay inside the chart domain.
    GeodesicSolution exp_map(const Vector& x, const Vector& v, int steps = kDefaultSteps) const;

    /// Integrates the spray over t in [0, t_end] (t_end may be negative).
    GeodesicSolution integrate_geodesic(const Vector& x, const Vector& v, double t_end,
                                        int steps = kDefaultSteps) const;

    /// Inverse exponential map: v with exp_x(v) = y. Exact chord on flat
    /// models, Newton shooting otherwise.
    TangentVector log_map(const Vector& x, const Vector& y) const;

    /// Shooting solver used by log_map on curved models; exposed so the
    /// machinery can be exercised on models with a known answer.
    TangentVector log_map_shooting(const Vector& x, const Vector& y,
                                   int steps = kDefaultSteps) const;

    /// Forward distance rho(x, y) = F(log_map(x, y)); asymmetric in general.
    double distance(const Vector& x, const Vector& y) const;

    /// Endpoint of the geodesic with initial data (x, v); straight step on
    /// flat models, RK4 otherwise.
    Vector geodesic_endpoint(const Vector& x, const Vector& v, int steps = kDefaultSteps) const;

    /// Tangent curvature T_V(W) of two nonzero vectors at the same base point.
    double tangent_curvature(const TangentVector& V, const TangentVector& W) const;

    /// Norm-ratio constants C(x), D(x) maximized over the region points, each
    /// estimated on a deterministic direction sample and polished by a local
    /// hill climb.
    NormRatioConstants norm_ratio_constants(const std::vector<Vector>& region,
                                            int directions = 64) const;

    /// Central second difference of s -> rho^p(gamma(s), z) at s = 0 along
    /// the unit-speed geodesic with initial direction `s_direction`
    /// (normalized internally), plus comparison bounds from `bounds`.
    SecondVariationDiag second_variation_diag(const Vector& x, const Vector& z,
                                              const Vector& s_direction, double p,
                                              const CurvatureBounds& bounds) const;

private:
    std::vector<Matrix> spray_state(const Vector& x, const Vector& y) const; // dG/dy helper

    int dim_;
    MinkowskiNorm norm_;
    ChartDomain domain_;
};

} // namespace finsler
