#include "finsler/norm.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace finsler {

namespace {

constexpr double kFdStepSecond = 1e-4; // mixed second differences of F^2
constexpr double kFdStepThird = 1e-3;  // mixed third differences of F^2
constexpr double kFdStepBase = 1e-4;   // dg/dx fallback
constexpr int kLegendreMaxIters = 50;
constexpr double kLegendreTol = 1e-10;

void check_spd(const Matrix& a, const char* what) {
    if (a.rows() != a.cols() || a.rows() == 0)
        throw invalid_input(std::string(what) + ": metric must be square and nonempty");
    if (!a.allFinite()) throw invalid_input(std::string(what) + ": non-finite metric");
    if (!a.isApprox(a.transpose(), 1e-12))
        throw invalid_input(std::string(what) + ": metric must be symmetric");
    Eigen::LLT<Matrix> llt(a);
    if (llt.info() != Eigen::Success)
        throw invalid_input(std::string(what) + ": metric must be positive definite");
}

struct RandersParts {
    double alpha;  // sqrt(y' A y)
    double beta;   // b . y
    double F;      // alpha + beta
    Vector l;      // A y / alpha
};

RandersParts randers_parts(const Matrix& a, const Vector& b, const Vector& y) {
    RandersParts p;
    const Vector ay = a * y;
    p.alpha = std::sqrt(y.dot(ay));
    p.beta = b.dot(y);
    p.F = p.alpha + p.beta;
    p.l = ay / p.alpha;
    return p;
}

// g = (F/alpha)(A - l l') + (l + b)(l + b')  for F = alpha + beta.
Matrix randers_fundamental(const Matrix& a, const Vector& b, const Vector& y) {
    const RandersParts p = randers_parts(a, b, y);
    const Vector lb = p.l + b;
    return (p.F / p.alpha) * (a - p.l * p.l.transpose()) + lb * lb.transpose();
}

// C_ijk = (h_ij e_k + h_jk e_i + h_ki e_j) / (2 alpha) with
// h = A - l l' and e = b - (beta/alpha) l.
std::vector<Matrix> randers_cartan(const Matrix& a, const Vector& b, const Vector& y) {
    const RandersParts p = randers_parts(a, b, y);
    const Matrix h = a - p.l * p.l.transpose();
    const Vector e = b - (p.beta / p.alpha) * p.l;
    const auto n = a.rows();
    std::vector<Matrix> c(static_cast<std::size_t>(n));
    for (Eigen::Index k = 0; k < n; ++k) {
        Matrix ck = h * e(k);
        ck += h.col(k) * e.transpose();
        ck += e * h.col(k).transpose();
        c[static_cast<std::size_t>(k)] = ck / (2.0 * p.alpha);
    }
    return c;
}

} // namespace

MinkowskiNorm MinkowskiNorm::euclidean(Matrix metric) {
    check_spd(metric, "euclidean norm");
    MinkowskiNorm n;
    n.kind_ = Kind::euclidean;
    n.dim_ = static_cast<int>(metric.rows());
    n.depends_on_base_ = false;
    n.metric_ = std::move(metric);
    return n;
}

MinkowskiNorm MinkowskiNorm::randers(Matrix metric, Vector drift) {
    check_spd(metric, "randers norm");
    if (drift.size() != metric.rows())
        throw invalid_input("randers norm: drift length must match metric dimension");
    require_finite(drift, "randers drift");
    // Strong convexity: the drift covector must satisfy ||b||_{A^{-1}} < 1.
    const double bn = std::sqrt(drift.dot(metric.llt().solve(drift)));
    if (bn >= 1.0)
        throw invalid_input("randers norm: drift must have dual metric norm < 1, got " +
                            std::to_string(bn));
    MinkowskiNorm n;
    n.kind_ = Kind::randers;
    n.dim_ = static_cast<int>(metric.rows());
    n.depends_on_base_ = false;
    n.metric_ = std::move(metric);
    n.drift_ = std::move(drift);
    return n;
}

MinkowskiNorm MinkowskiNorm::riemannian_field(int dimension, MetricFn metric,
                                              MetricDerivativeFn metric_derivative) {
    if (dimension <= 0) throw invalid_input("riemannian field: dimension must be positive");
    if (!metric) throw invalid_input("riemannian field: metric callback required");
    MinkowskiNorm n;
    n.kind_ = Kind::riemannian_field;
    n.dim_ = dimension;
    n.depends_on_base_ = true;
    n.metric_fn_ = std::move(metric);
    n.metric_derivative_fn_ = std::move(metric_derivative);
    return n;
}

MinkowskiNorm MinkowskiNorm::custom(int dimension, ValueFn value, bool depends_on_base,
                                    FundamentalFn fundamental, CartanFn cartan) {
    if (dimension <= 0) throw invalid_input("custom norm: dimension must be positive");
    if (!value) throw invalid_input("custom norm: value callback required");
    MinkowskiNorm n;
    n.kind_ = Kind::custom;
    n.dim_ = dimension;
    n.depends_on_base_ = depends_on_base;
    n.value_fn_ = std::move(value);
    n.fundamental_fn_ = std::move(fundamental);
    n.cartan_fn_ = std::move(cartan);
    return n;
}

Matrix MinkowskiNorm::point_metric(const Vector& base) const {
    if (kind_ == Kind::riemannian_field) return metric_fn_(base);
    return metric_;
}

double MinkowskiNorm::value(const Vector& base, const Vector& y) const {
    if (y.size() != dim_) throw invalid_input("norm: vector dimension mismatch");
    require_finite(y, "norm argument");
    switch (kind_) {
    case Kind::euclidean:
        return std::sqrt(y.dot(metric_ * y));
    case Kind::randers:
        return std::sqrt(y.dot(metric_ * y)) + drift_.dot(y);
    case Kind::riemannian_field: {
        const Matrix a = metric_fn_(base);
        return std::sqrt(y.dot(a * y));
    }
    case Kind::custom:
        if (y.isZero(0.0)) return 0.0;
        return value_fn_(base, y);
    }
    return 0.0;
}

double MinkowskiNorm::value(const TangentVector& v) const { return value(v.base, v.components); }

Matrix MinkowskiNorm::fundamental_matrix(const Vector& base, const Vector& y) const {
    if (y.size() != dim_) throw invalid_input("fundamental tensor: dimension mismatch");
    require_finite(y, "fundamental tensor reference");
    if (value(base, y) <= 0.0) throw degenerate_reference_vector();
    switch (kind_) {
    case Kind::euclidean:
        return metric_;
    case Kind::randers:
        return randers_fundamental(metric_, drift_, y);
    case Kind::riemannian_field:
        return metric_fn_(base);
    case Kind::custom:
        if (fundamental_fn_) return fundamental_fn_(base, y);
        return fundamental_matrix_fd(base, y);
    }
    return Matrix();
}

// Mixed central second differences of F^2(V + sX + tY) on Euclidean-unit
// slot vectors, step scaled by F(V).
Matrix MinkowskiNorm::fundamental_matrix_fd(const Vector& base, const Vector& y) const {
    const double h = kFdStepSecond * value(base, y);
    Matrix g(dim_, dim_);
    auto f2 = [&](const Vector& w) {
        const double f = value_fn_(base, w);
        return f * f;
    };
    for (int i = 0; i < dim_; ++i) {
        for (int j = i; j < dim_; ++j) {
            Vector ei = Vector::Zero(dim_);
            Vector ej = Vector::Zero(dim_);
            ei(i) = h;
            ej(j) = h;
            const double v = (f2(y + ei + ej) - f2(y + ei - ej) - f2(y - ei + ej) +
                              f2(y - ei - ej)) /
                             (8.0 * h * h);
            g(i, j) = v;
            g(j, i) = v;
        }
    }
    return g;
}

double MinkowskiNorm::fundamental_tensor(const TangentVector& V, const TangentVector& X,
                                         const TangentVector& Y) const {
    require_finite(X.components, "fundamental tensor slot");
    require_finite(Y.components, "fundamental tensor slot");
    const Matrix g = fundamental_matrix(V.base, V.components);
    return X.components.dot(g * Y.components);
}

std::vector<Matrix> MinkowskiNorm::cartan_array(const Vector& base, const Vector& y) const {
    if (y.size() != dim_) throw invalid_input("cartan term: dimension mismatch");
    require_finite(y, "cartan reference");
    if (value(base, y) <= 0.0) throw degenerate_reference_vector();
    switch (kind_) {
    case Kind::euclidean:
    case Kind::riemannian_field:
        return std::vector<Matrix>(static_cast<std::size_t>(dim_), Matrix::Zero(dim_, dim_));
    case Kind::randers:
        return randers_cartan(metric_, drift_, y);
    case Kind::custom:
        if (cartan_fn_) return cartan_fn_(base, y);
        return cartan_array_fd(base, y);
    }
    return {};
}

// Mixed central third differences of F^2, step scaled by F(V).
std::vector<Matrix> MinkowskiNorm::cartan_array_fd(const Vector& base, const Vector& y) const {
    const double h = kFdStepThird * value(base, y);
    auto f2 = [&](const Vector& w) {
        const double f = value_fn_(base, w);
        return f * f;
    };
    std::vector<Matrix> c(static_cast<std::size_t>(dim_), Matrix::Zero(dim_, dim_));
    for (int i = 0; i < dim_; ++i) {
        for (int j = i; j < dim_; ++j) {
            for (int k = j; k < dim_; ++k) {
                Vector ei = Vector::Zero(dim_), ej = Vector::Zero(dim_), ek = Vector::Zero(dim_);
                ei(i) = h;
                ej(j) = h;
                ek(k) = h;
                double d = 0.0;
                for (int si = -1; si <= 1; si += 2)
                    for (int sj = -1; sj <= 1; sj += 2)
                        for (int sk = -1; sk <= 1; sk += 2)
                            d += si * sj * sk * f2(y + si * ei + sj * ej + sk * ek);
                const double v = 0.25 * d / (8.0 * h * h * h);
                // totally symmetric fill
                c[static_cast<std::size_t>(k)](i, j) = v;
                c[static_cast<std::size_t>(k)](j, i) = v;
                c[static_cast<std::size_t>(j)](i, k) = v;
                c[static_cast<std::size_t>(j)](k, i) = v;
                c[static_cast<std::size_t>(i)](j, k) = v;
                c[static_cast<std::size_t>(i)](k, j) = v;
            }
        }
    }
    return c;
}

double MinkowskiNorm::cartan_term(const TangentVector& V, const TangentVector& X,
                                  const TangentVector& Y, const TangentVector& Z) const {
    require_finite(X.components, "cartan slot");
    require_finite(Y.components, "cartan slot");
    require_finite(Z.components, "cartan slot");
    switch (kind_) {
    case Kind::euclidean:
    case Kind::riemannian_field:
        if (value(V.base, V.components) <= 0.0) throw degenerate_reference_vector();
        return 0.0;
    default: {
        const auto c = cartan_array(V.base, V.components);
        double s = 0.0;
        for (int k = 0; k < dim_; ++k)
            s += Z.components(k) * X.components.dot(c[static_cast<std::size_t>(k)] * Y.components);
        return s;
    }
    }
}

Covector MinkowskiNorm::legendre(const TangentVector& v) const {
    require_finite(v.components, "legendre argument");
    if (v.components.isZero(0.0)) return Covector(v.base, Vector::Zero(dim_));
    switch (kind_) {
    case Kind::euclidean:
        return Covector(v.base, metric_ * v.components);
    case Kind::riemannian_field:
        return Covector(v.base, metric_fn_(v.base) * v.components);
    case Kind::randers: {
        const RandersParts p = randers_parts(metric_, drift_, v.components);
        return Covector(v.base, p.F * (p.l + drift_));
    }
    case Kind::custom: {
        const Matrix g = fundamental_matrix(v.base, v.components);
        return Covector(v.base, g * v.components);
    }
    }
    return Covector();
}

TangentVector MinkowskiNorm::legendre_inverse(const Covector& xi) const {
    require_finite(xi.components, "legendre inverse argument");
    if (xi.components.isZero(0.0)) return TangentVector(xi.base, Vector::Zero(dim_));

    // Normalize the target; the inverse is positively 1-homogeneous.
    const double scale = xi.components.norm();
    const Vector target = xi.components / scale;

    // Initialize at the metric raise of the target under g_w for a fixed unit w.
    Vector w = Vector::Zero(dim_);
    w(0) = 1.0;
    Matrix g = fundamental_matrix(xi.base, w);
    Vector v = g.ldlt().solve(target);

    // Damped Newton on L(v) = target; Jacobian of L is the fundamental matrix,
    // merit function phi(v) = F(v)^2 / 2 - <target, v> is strictly convex.
    auto merit = [&](const Vector& u) {
        const double f = value(xi.base, u);
        return 0.5 * f * f - target.dot(u);
    };
    double best_res = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < kLegendreMaxIters; ++iter) {
        const Vector lv = legendre(TangentVector(xi.base, v)).components;
        const Vector r = target - lv;
        g = fundamental_matrix(xi.base, v);
        Eigen::LDLT<Matrix> ldlt(g);
        const double res = std::sqrt(r.dot(ldlt.solve(r)));
        best_res = std::min(best_res, res);
        if (res <= kLegendreTol)
            return TangentVector(xi.base, scale * v);
        const Vector step = ldlt.solve(r);
        if (res < 1e-6) {
            // quadratic basin: undamped Newton, no merit comparison (the
            // decrease is below floating-point resolution there)
            const Vector cand = v + step;
            v = cand.isZero(0.0) ? Vector(v + 0.5 * step) : cand;
            continue;
        }
        double lambda = 1.0;
        const double m0 = merit(v);
        const double slope = -r.dot(step); // directional derivative of the merit
        for (int ls = 0; ls < 40; ++ls) {
            const Vector cand = v + lambda * step;
            if (!cand.isZero(0.0) && merit(cand) <= m0 + 1e-4 * lambda * slope) {
                v = cand;
                break;
            }
            lambda *= 0.5;
            if (ls == 39) v = v + lambda * step;
        }
    }
    throw numerical_failure("legendre inverse did not converge", best_res);
}

double MinkowskiNorm::dual_norm(const Covector& xi) const {
    if (xi.components.isZero(0.0)) return 0.0;
    return value(legendre_inverse(xi));
}

MinkowskiNorm MinkowskiNorm::reversed() const {
    switch (kind_) {
    case Kind::euclidean:
        return *this;
    case Kind::randers:
        return randers(metric_, -drift_);
    case Kind::riemannian_field:
        return *this; // quadratic norms are symmetric
    case Kind::custom: {
        // F_rev(v) = F(-v); the algebra transforms as g_rev(x, y) = g(x, -y)
        // and C_rev(x, y) = -C(x, -y).
        ValueFn vf = value_fn_;
        FundamentalFn ff = fundamental_fn_;
        CartanFn cf = cartan_fn_;
        FundamentalFn ff_rev = nullptr;
        if (ff) ff_rev = [ff](const Vector& x, const Vector& y) { return ff(x, -y); };
        CartanFn cf_rev = nullptr;
        if (cf)
            cf_rev = [cf](const Vector& x, const Vector& y) {
                auto c = cf(x, -y);
                for (auto& m : c) m = -m;
                return c;
            };
        return custom(
            dim_, [vf](const Vector& x, const Vector& y) { return vf(x, -y); }, depends_on_base_,
            std::move(ff_rev), std::move(cf_rev));
    }
    }
    return *this;
}

std::vector<Matrix> MinkowskiNorm::metric_base_derivative(const Vector& base,
                                                          const Vector& y) const {
    if (!depends_on_base_)
        return std::vector<Matrix>(static_cast<std::size_t>(dim_), Matrix::Zero(dim_, dim_));
    if (kind_ == Kind::riemannian_field && metric_derivative_fn_)
        return metric_derivative_fn_(base);
    std::vector<Matrix> d(static_cast<std::size_t>(dim_));
    for (int l = 0; l < dim_; ++l) {
        Vector e = Vector::Zero(dim_);
        e(l) = kFdStepBase;
        d[static_cast<std::size_t>(l)] =
            (fundamental_matrix(base + e, y) - fundamental_matrix(base - e, y)) /
            (2.0 * kFdStepBase);
    }
    return d;
}

} // namespace finsler
