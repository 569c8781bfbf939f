#include "finsler/manifold.hpp"

#include <cmath>

#include "finsler/bounds.hpp"
#include "finsler/sampling.hpp"

namespace finsler {

namespace {

constexpr double kSprayFdStep = 1e-4;   // dG/dy
constexpr double kShootFdStep = 1e-5;   // shooting Jacobian
constexpr double kShootTol = 1e-8;      // coordinate residual
constexpr int kShootMaxIters = 50;
constexpr double kDiagStep = 1e-3;      // second-variation central difference

} // namespace

ChartDomain ChartDomain::all() {
    ChartDomain d;
    d.pred_ = [](const Vector&) { return true; };
    return d;
}

ChartDomain ChartDomain::box(Vector lo, Vector hi) {
    if (lo.size() != hi.size()) throw invalid_input("chart box: bound lengths differ");
    ChartDomain d;
    d.pred_ = [lo = std::move(lo), hi = std::move(hi)](const Vector& x) {
        if (x.size() != lo.size()) return false;
        return (x.array() >= lo.array()).all() && (x.array() <= hi.array()).all();
    };
    return d;
}

ChartDomain ChartDomain::predicate(std::function<bool(const Vector&)> pred) {
    if (!pred) throw invalid_input("chart predicate: callback required");
    ChartDomain d;
    d.pred_ = std::move(pred);
    return d;
}

bool ChartDomain::contains(const Vector& x) const { return pred_(x); }

void CurvatureBounds::validate() const {
    if (k < 0.0 || delta < 0.0 || delta_prime < 0.0)
        throw invalid_input("curvature bounds: k, delta, delta' must be >= 0");
    if (beta < 0.0) throw invalid_input("curvature bounds: beta must be >= 0");
    if (C < 1.0 || D < 1.0) throw invalid_input("curvature bounds: C, D must be >= 1");
    if (!(inj > 0.0)) throw invalid_input("curvature bounds: injectivity radius must be > 0");
}

Manifold::Manifold(MinkowskiNorm norm_field, ChartDomain domain)
    : dim_(norm_field.dimension()), norm_(std::move(norm_field)), domain_(std::move(domain)) {}

Manifold Manifold::flat(MinkowskiNorm norm) {
    if (norm.depends_on_base()) throw invalid_input("flat manifold: norm must be base-independent");
    return Manifold(std::move(norm), ChartDomain::all());
}

Manifold Manifold::poincare_disk(int dimension) {
    if (dimension <= 0) throw invalid_input("poincare disk: dimension must be positive");
    auto metric = [dimension](const Vector& x) -> Matrix {
        const double s = 1.0 - x.squaredNorm();
        return Matrix::Identity(dimension, dimension) * (4.0 / (s * s));
    };
    auto dmetric = [dimension](const Vector& x) -> std::vector<Matrix> {
        const double s = 1.0 - x.squaredNorm();
        std::vector<Matrix> d(static_cast<std::size_t>(dimension));
        for (int l = 0; l < dimension; ++l)
            d[static_cast<std::size_t>(l)] =
                Matrix::Identity(dimension, dimension) * (16.0 * x(l) / (s * s * s));
        return d;
    };
    auto norm = MinkowskiNorm::riemannian_field(dimension, metric, dmetric);
    auto domain = ChartDomain::predicate([](const Vector& x) { return x.squaredNorm() < 1.0; });
    return Manifold(std::move(norm), std::move(domain));
}

Manifold Manifold::reversed() const { return Manifold(norm_.reversed(), domain_); }

Vector Manifold::geodesic_coefficients(const Vector& x, const Vector& y) const {
    if (norm_.value(x, y) <= 0.0) throw degenerate_reference_vector();
    if (!domain_.contains(x)) throw invalid_input("geodesic coefficients: point outside chart");
    if (is_flat()) return Vector::Zero(dim_);

    const Matrix g = norm_.fundamental_matrix(x, y);
    const auto dg = norm_.metric_base_derivative(x, y);
    // T_k = (2 dg_jk/dx^l - dg_jl/dx^k) y^j y^l,  G = g^{-1} T / 4
    Vector t = Vector::Zero(dim_);
    for (int k = 0; k < dim_; ++k) {
        double acc = 0.0;
        for (int l = 0; l < dim_; ++l)
            acc += 2.0 * y(l) * y.dot(dg[static_cast<std::size_t>(l)].col(k));
        acc -= y.dot(dg[static_cast<std::size_t>(k)] * y);
        t(k) = acc;
    }
    return 0.25 * g.ldlt().solve(t);
}

std::vector<Matrix> Manifold::chern_christoffel(const Vector& x, const Vector& y) const {
    if (norm_.value(x, y) <= 0.0) throw degenerate_reference_vector();
    if (is_flat())
        return std::vector<Matrix>(static_cast<std::size_t>(dim_), Matrix::Zero(dim_, dim_));

    // N^i_j = dG^i/dy^j by central differences.
    const double h = kSprayFdStep * std::max(1.0, y.lpNorm<Eigen::Infinity>());
    Matrix N(dim_, dim_);
    for (int j = 0; j < dim_; ++j) {
        Vector e = Vector::Zero(dim_);
        e(j) = h;
        N.col(j) = (geodesic_coefficients(x, y + e) - geodesic_coefficients(x, y - e)) / (2.0 * h);
    }

    const Matrix g = norm_.fundamental_matrix(x, y);
    const auto dgx = norm_.metric_base_derivative(x, y);
    const auto cart = norm_.cartan_array(x, y); // dg_ij/dy^m = 2 C_ijm

    // delta g_ij / delta x^l = dg_ij/dx^l - N^m_l * 2 C_ijm
    std::vector<Matrix> dgd(static_cast<std::size_t>(dim_));
    for (int l = 0; l < dim_; ++l) {
        Matrix m = dgx[static_cast<std::size_t>(l)];
        for (int mm = 0; mm < dim_; ++mm) m -= 2.0 * N(mm, l) * cart[static_cast<std::size_t>(mm)];
        dgd[static_cast<std::size_t>(l)] = m;
    }

    Eigen::LDLT<Matrix> ldlt(g);
    std::vector<Matrix> gamma(static_cast<std::size_t>(dim_), Matrix::Zero(dim_, dim_));
    for (int i = 0; i < dim_; ++i) {
        for (int j = i; j < dim_; ++j) {
            Vector rhs(dim_);
            for (int l = 0; l < dim_; ++l)
                rhs(l) = 0.5 * (dgd[static_cast<std::size_t>(i)](l, j) +
                                dgd[static_cast<std::size_t>(j)](i, l) -
                                dgd[static_cast<std::size_t>(l)](i, j));
            const Vector gk = ldlt.solve(rhs);
            for (int k = 0; k < dim_; ++k) {
                gamma[static_cast<std::size_t>(k)](i, j) = gk(k);
                gamma[static_cast<std::size_t>(k)](j, i) = gk(k);
            }
        }
    }
    return gamma;
}

GeodesicSolution Manifold::integrate_geodesic(const Vector& x, const Vector& v, double t_end,
                                              int steps) const {
    if (x.size() != dim_ || v.size() != dim_)
        throw invalid_input("geodesic integration: dimension mismatch");
    require_finite(x, "geodesic start");
    require_finite(v, "geodesic velocity");
    if (steps <= 0) throw invalid_input("geodesic integration: steps must be positive");
    if (!domain_.contains(x)) throw domain_escape(0.0);

    GeodesicSolution sol;
    sol.initial_point = x;
    sol.initial_velocity = v;
    sol.steps = steps;
    sol.step_size = t_end / steps;
    sol.trajectory.reserve(static_cast<std::size_t>(steps) + 1);
    sol.trajectory.push_back({0.0, x, v});

    if (v.isZero(0.0) || t_end == 0.0) {
        // Degenerate cases: the constant curve.
        for (int i = 1; i <= steps; ++i) sol.trajectory.push_back({sol.step_size * i, x, v});
        return sol;
    }

    const double f0 = norm_.value(x, v);
    double stage_t = 0.0;
    auto accel = [this, &stage_t](const Vector& pt, const Vector& vel) -> Vector {
        if (!domain_.contains(pt)) throw domain_escape(stage_t);
        return -2.0 * geodesic_coefficients(pt, vel);
    };

    Vector p = x, w = v;
    const double h = sol.step_size;
    double drift = 0.0;
    for (int i = 0; i < steps; ++i) {
        stage_t = h * i;
        if (is_flat()) {
            p += h * w;
        } else {
            const Vector k1p = w, k1v = accel(p, w);
            const Vector k2p = w + 0.5 * h * k1v, k2v = accel(p + 0.5 * h * k1p, w + 0.5 * h * k1v);
            const Vector k3p = w + 0.5 * h * k2v, k3v = accel(p + 0.5 * h * k2p, w + 0.5 * h * k2v);
            const Vector k4p = w + h * k3v, k4v = accel(p + h * k3p, w + h * k3v);
            p += (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
            w += (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        }
        const double t = h * (i + 1);
        if (!domain_.contains(p)) throw domain_escape(t);
        sol.trajectory.push_back({t, p, w});
        drift = std::max(drift, std::abs(norm_.value(p, w) - f0));
    }
    sol.speed_drift = f0 > 0.0 ? drift / f0 : 0.0;
    return sol;
}

GeodesicSolution Manifold::exp_map(const Vector& x, const Vector& v, int steps) const {
    return integrate_geodesic(x, v, 1.0, steps);
}

Vector Manifold::geodesic_endpoint(const Vector& x, const Vector& v, int steps) const {
    if (is_flat()) {
        const Vector p = x + v;
        if (!domain_.contains(p)) throw domain_escape(1.0);
        return p;
    }
    return exp_map(x, v, steps).endpoint();
}

TangentVector Manifold::log_map(const Vector& x, const Vector& y) const {
    if (x.size() != dim_ || y.size() != dim_) throw invalid_input("log map: dimension mismatch");
    if (is_flat()) return TangentVector(x, y - x);
    if ((y - x).isZero(0.0)) return TangentVector(x, Vector::Zero(dim_));
    return log_map_shooting(x, y);
}

TangentVector Manifold::log_map_shooting(const Vector& x, const Vector& y, int steps) const {
    if ((y - x).isZero(0.0)) return TangentVector(x, Vector::Zero(dim_));

    auto endpoint = [&](const Vector& v) -> Vector {
        return integrate_geodesic(x, v, 1.0, steps).endpoint();
    };

    Vector v = y - x; // chord initialization
    Vector r = endpoint(v) - y;
    double best = r.lpNorm<Eigen::Infinity>();
    for (int iter = 0; iter < kShootMaxIters; ++iter) {
        if (r.lpNorm<Eigen::Infinity>() <= kShootTol) return TangentVector(x, v);

        Matrix J(dim_, dim_);
        const Vector base_end = r + y;
        for (int j = 0; j < dim_; ++j) {
            Vector e = Vector::Zero(dim_);
            e(j) = kShootFdStep * std::max(1.0, std::abs(v(j)));
            J.col(j) = (endpoint(v + e) - base_end) / e(j);
        }
        const Vector step = J.fullPivLu().solve(-r);

        double lambda = 1.0;
        bool advanced = false;
        for (int ls = 0; ls < 30; ++ls) {
            try {
                const Vector cand = v + lambda * step;
                const Vector rc = endpoint(cand) - y;
                if (rc.lpNorm<Eigen::Infinity>() < r.lpNorm<Eigen::Infinity>()) {
                    v = cand;
                    r = rc;
                    advanced = true;
                    break;
                }
            } catch (const domain_escape&) {
                // trial trajectory left the chart; shorten the step
            }
            lambda *= 0.5;
        }
        best = std::min(best, r.lpNorm<Eigen::Infinity>());
        if (!advanced) break;
    }
    if (r.lpNorm<Eigen::Infinity>() <= kShootTol) return TangentVector(x, v);
    throw numerical_failure("log map shooting did not converge", best);
}

double Manifold::distance(const Vector& x, const Vector& y) const {
    const TangentVector v = log_map(x, y);
    if (v.components.isZero(0.0)) return 0.0;
    return norm_.value(v);
}

double Manifold::tangent_curvature(const TangentVector& V, const TangentVector& W) const {
    if (!(V.base - W.base).isZero(0.0))
        throw invalid_input("tangent curvature: vectors at different points");
    if (norm_.value(V) <= 0.0 || norm_.value(W) <= 0.0) throw degenerate_reference_vector();
    if (is_flat()) return 0.0;

    // With the constant-components extension of W, both covariant derivatives
    // reduce to Christoffel contractions and the extension term cancels:
    // T_V(W) = < (Gamma(W) - Gamma(V)) W W , V >_V.
    const auto gw = chern_christoffel(V.base, W.components);
    const auto gv = chern_christoffel(V.base, V.components);
    Vector diff(dim_);
    for (int k = 0; k < dim_; ++k)
        diff(k) = W.components.dot((gw[static_cast<std::size_t>(k)] -
                                    gv[static_cast<std::size_t>(k)]) *
                                   W.components);
    const Matrix g = norm_.fundamental_matrix(V.base, V.components);
    return diff.dot(g * V.components);
}

namespace {

double ratio_cd(const MinkowskiNorm& norm, const Vector& x, const Vector& v, const Vector& w,
                bool forward) {
    const Matrix gw = norm.fundamental_matrix(x, w);
    const double fw = v.dot(gw * v);
    const double fv = norm.value(x, v);
    const double vv = fv * fv; // <v,v>_v = F(v)^2
    return forward ? std::sqrt(vv / fw) : std::sqrt(fw / vv);
}

// Deterministic hill climb on the (v, w) direction pair, shrinking step.
double polish_ratio(const MinkowskiNorm& norm, const Vector& x, Vector v, Vector w, bool forward,
                    double value) {
    const int dim = static_cast<int>(v.size());
    double step = 0.1;
    for (int round = 0; round < 60; ++round) {
        bool improved = false;
        for (int slot = 0; slot < 2; ++slot) {
            Vector& target = slot == 0 ? v : w;
            for (int i = 0; i < dim; ++i) {
                for (double s : {step, -step}) {
                    Vector cand = target;
                    cand(i) += s;
                    if (cand.norm() < 1e-9) continue;
                    cand.normalize();
                    std::swap(target, cand);
                    const double r = ratio_cd(norm, x, v, w, forward);
                    if (r > value) {
                        value = r;
                        improved = true;
                    } else {
                        std::swap(target, cand);
                    }
                }
            }
        }
        if (!improved) {
            step *= 0.5;
            if (step < 1e-10) break;
        }
    }
    return value;
}

} // namespace

NormRatioConstants Manifold::norm_ratio_constants(const std::vector<Vector>& region,
                                                  int directions) const {
    if (region.empty()) throw invalid_input("norm ratio constants: empty region");
    const auto dirs = sampling::unit_directions(dim_, directions);
    NormRatioConstants out;
    for (const Vector& x : region) {
        for (bool forward : {true, false}) {
            double best = 1.0;
            Vector bv = dirs.front(), bw = dirs.front();
            for (const Vector& v : dirs) {
                for (const Vector& w : dirs) {
                    const double r = ratio_cd(norm_, x, v, w, forward);
                    if (r > best) {
                        best = r;
                        bv = v;
                        bw = w;
                    }
                }
            }
            best = polish_ratio(norm_, x, bv, bw, forward, best);
            if (forward)
                out.C = std::max(out.C, best);
            else
                out.D = std::max(out.D, best);
        }
    }
    return out;
}

SecondVariationDiag Manifold::second_variation_diag(const Vector& x, const Vector& z,
                                                    const Vector& s_direction, double p,
                                                    const CurvatureBounds& cb) const {
    if (p <= 1.0) throw invalid_input("second variation: requires p > 1");
    const double fd = norm_.value(x, s_direction);
    if (fd <= 0.0) throw degenerate_reference_vector();
    const Vector dir = s_direction / fd; // unit speed

    SecondVariationDiag out;
    out.distance = distance(x, z);
    if (out.distance <= 0.0) throw invalid_input("second variation: x and z must differ");

    const double h = kDiagStep;
    const Vector xp = integrate_geodesic(x, dir, h).endpoint();
    const Vector xm = integrate_geodesic(x, dir, -h).endpoint();
    const double dp0 = std::pow(out.distance, p);
    const double dpp = std::pow(distance(xp, z), p);
    const double dpm = std::pow(distance(xm, z), p);
    out.numeric = (dpp - 2.0 * dp0 + dpm) / (h * h);

    out.lower = bounds::hessian_lower_bound(p, out.distance, cb.k, cb.delta, cb.C);
    out.upper = bounds::hessian_upper_bound(p, out.distance, cb.beta, cb.delta_prime, cb.D);
    const double tol = 0.05 * (out.upper - out.lower) + 1e-4 * std::max(1.0, std::abs(out.numeric));
    out.within_bounds = out.numeric >= out.lower - tol && out.numeric <= out.upper + tol;
    return out;
}

} // namespace finsler
