#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "finsler/tangent.hpp"

namespace finsler {

/// A Minkowski norm F on the tangent spaces of a chart: smooth away from 0,
/// strongly convex, positively 1-homogeneous, and generally asymmetric
/// (F(v) != F(-v)). Point-independent kinds (euclidean, randers) ignore the
/// base point; field kinds (riemannian_field, custom) evaluate at the base
/// carried by each TangentVector.
///
/// Provides the derived algebra: fundamental tensor g_V, Cartan term,
/// Legendre transform and its inverse, dual norm, and the reverse structure
/// v -> F(-v).
class MinkowskiNorm {
public:
    enum class Kind { euclidean, randers, riemannian_field, custom };

    using MetricFn = std::function<Matrix(const Vector& x)>;
    // Returns d(metric)/dx^l for l = 0..dim-1.
    using MetricDerivativeFn = std::function<std::vector<Matrix>(const Vector& x)>;
    using ValueFn = std::function<double(const Vector& x, const Vector& y)>;
    // Optional closed-form fundamental matrix [g_ij(x, y)] for custom norms.
    using FundamentalFn = std::function<Matrix(const Vector& x, const Vector& y)>;
    // Optional closed-form Cartan coefficients C_ijk contracted with nothing:
    // returns the full rank-3 array as a vector of matrices, C[k](i,j).
    using CartanFn = std::function<std::vector<Matrix>(const Vector& x, const Vector& y)>;

    /// F(v) = sqrt(v' A v) with A symmetric positive definite.
    static MinkowskiNorm euclidean(Matrix metric);

    /// Randers norm F(v) = sqrt(v' A v) + b.v with ||b||_{A^{-1}} < 1.
    static MinkowskiNorm randers(Matrix metric, Vector drift);

    /// Riemannian norm induced by a point-dependent metric A(x); the
    /// derivative callback is optional (finite differences otherwise).
    static MinkowskiNorm riemannian_field(int dimension, MetricFn metric,
                                          MetricDerivativeFn metric_derivative = nullptr);

    /// Custom norm from a callback evaluating F(x, v); optional closed-form
    /// fundamental tensor and Cartan coefficients, finite differences as the
    /// fallback.
    static MinkowskiNorm custom(int dimension, ValueFn value, bool depends_on_base = true,
                                FundamentalFn fundamental = nullptr, CartanFn cartan = nullptr);

    int dimension() const { return dim_; }
    Kind kind() const { return kind_; }

    /// True when the norm varies with the base point (field kinds).
    bool depends_on_base() const { return depends_on_base_; }

    /// F(v). Zero vectors map to 0; non-finite input is an error.
    double value(const TangentVector& v) const;
    double value(const Vector& base, const Vector& y) const;

    /// Fundamental tensor g_V(X, Y); requires V != 0.
    double fundamental_tensor(const TangentVector& V, const TangentVector& X,
                              const TangentVector& Y) const;

    /// Matrix [g_ij] of the fundamental tensor at reference vector y != 0.
    Matrix fundamental_matrix(const Vector& base, const Vector& y) const;

    /// Cartan term <X, Y, Z>_V; totally symmetric, vanishes when a slot
    /// equals V. Requires V != 0.
    double cartan_term(const TangentVector& V, const TangentVector& X, const TangentVector& Y,
                       const TangentVector& Z) const;

    /// Full Cartan coefficient array C[k](i,j) = C_ijk at reference y != 0,
    /// so that d g_ij / d y^k = 2 C_ijk.
    std::vector<Matrix> cartan_array(const Vector& base, const Vector& y) const;

    /// Legendre transform L(v) = g_v(v, .); L(0) = 0.
    Covector legendre(const TangentVector& v) const;

    /// Inverse Legendre transform: solves L(v) = xi by damped Newton
    /// iteration (the map's Jacobian is the fundamental matrix).
    TangentVector legendre_inverse(const Covector& xi) const;

    /// Dual norm F*(xi) = F(L^{-1}(xi)).
    double dual_norm(const Covector& xi) const;

    /// Reverse structure: a norm whose value at v is F(-v).
    MinkowskiNorm reversed() const;

    /// d g_ij / d x^l at (base, y) for l = 0..dim-1. Exact zero for
    /// point-independent kinds, closed form when a metric derivative was
    /// supplied, central finite differences otherwise (step 1e-4).
    std::vector<Matrix> metric_base_derivative(const Vector& base, const Vector& y) const;

    /// Accessors for the defining data (empty when not applicable).
    const Matrix& metric() const { return metric_; }
    const Vector& drift() const { return drift_; }

private:
    MinkowskiNorm() = default;

    Matrix fundamental_matrix_fd(const Vector& base, const Vector& y) const;
    std::vector<Matrix> cartan_array_fd(const Vector& base, const Vector& y) const;
    Matrix point_metric(const Vector& base) const;

    Kind kind_ = Kind::euclidean;
    int dim_ = 0;
    bool depends_on_base_ = false;

    Matrix metric_;      // euclidean, randers
    Vector drift_;       // randers
    MetricFn metric_fn_; // riemannian_field
    MetricDerivativeFn metric_derivative_fn_;
    ValueFn value_fn_; // custom
    FundamentalFn fundamental_fn_;
    CartanFn cartan_fn_;
};

} // namespace finsler
