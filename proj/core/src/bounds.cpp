#include "finsler/bounds.hpp"

#include <cmath>
#include <numbers>

#include "finsler/sampling.hpp"

namespace finsler::bounds {

double x_cot_x(double x) {
    if (std::abs(x) < 1e-4) {
        const double x2 = x * x;
        return 1.0 - x2 / 3.0 - x2 * x2 / 45.0;
    }
    return x * std::cos(x) / std::sin(x);
}

double x_coth_x(double x) {
    if (std::abs(x) < 1e-4) {
        const double x2 = x * x;
        return 1.0 + x2 / 3.0 - x2 * x2 / 45.0;
    }
    return x / std::tanh(x);
}

double uniqueness_radius(double p, double k, double delta, double C) {
    if (!(p > 1.0)) throw invalid_input("uniqueness radius: requires p > 1");
    if (C < 1.0) throw invalid_input("uniqueness radius: requires C >= 1");
    if (k < 0.0 || delta < 0.0)
        throw invalid_input("uniqueness radius: k and delta must be >= 0 (0 selects the limit)");
    const double c2d = C * C * delta;
    const double linear =
        delta == 0.0 ? std::numeric_limits<double>::infinity() : (p - 1.0) / c2d;
    double arc;
    if (k == 0.0)
        arc = delta == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / c2d;
    else if (delta == 0.0)
        arc = std::numbers::pi / (2.0 * std::sqrt(k));
    else
        arc = std::atan(std::sqrt(k) / c2d) / std::sqrt(k);
    return std::min(linear, arc);
}

double hessian_lower_bound(double p, double r, double k, double delta, double C) {
    if (!(p > 1.0) || !(r > 0.0))
        throw invalid_input("hessian lower bound: requires p > 1 and r > 0");
    if (k < 0.0 || delta < 0.0 || C < 1.0)
        throw invalid_input("hessian lower bound: invalid constants");
    const double skr = std::sqrt(k) * r;
    if (skr >= std::numbers::pi)
        throw out_of_comparison_range("hessian lower bound: sqrt(k) * r must be < pi");
    const double cot_term = x_cot_x(skr);
    return p * std::pow(r, p - 2.0) * (std::min(p - 1.0, cot_term) / (C * C) - delta * r);
}

double hessian_upper_bound(double p, double r, double beta, double delta_prime, double D) {
    if (!(p > 1.0) || !(r > 0.0))
        throw invalid_input("hessian upper bound: requires p > 1 and r > 0");
    if (beta < 0.0 || delta_prime < 0.0 || D < 1.0)
        throw invalid_input("hessian upper bound: invalid constants");
    const double coth_term = x_coth_x(beta * r);
    return p * std::pow(r, p - 2.0) * (D * D * std::max(p - 1.0, coth_term) + delta_prime * r);
}

double step_majorant(double p, double r, double beta, double delta_prime, double D) {
    return hessian_upper_bound(p, r, beta, delta_prime, D);
}

double step_majorant_measure(const Manifold& manifold, const WeightedMeasure& mu, const Vector& x,
                             double p, double beta, double delta_prime, double D) {
    std::vector<double> terms;
    terms.reserve(mu.size());
    for (const Atom& a : mu.atoms()) {
        const double r = manifold.distance(x, a.point);
        if (r == 0.0) {
            if (p < 2.0)
                throw singular_majorant("step majorant: atom at distance zero with p < 2");
            // continuous extension at r = 0: H -> p r^{p-2} D^2 max(p-1, 1)
            const double limit = p == 2.0 ? 2.0 * D * D * std::max(p - 1.0, 1.0) : 0.0;
            terms.push_back(a.weight * limit);
            continue;
        }
        terms.push_back(a.weight * step_majorant(p, r, beta, delta_prime, D));
    }
    return sampling::pairwise_sum(terms);
}

double step_constant_CH(const Manifold& manifold, const WeightedMeasure& mu, double p,
                        const CurvatureBounds& cb, const Vector& region_center,
                        double region_radius) {
    if (!(region_radius > 0.0)) throw invalid_input("step constant: radius must be > 0");
    const int dim = manifold.dimension();
    const int per_axis = 9;
    std::vector<int> idx(static_cast<std::size_t>(dim), 0);
    double best = 0.0;
    bool done = false;
    while (!done) {
        Vector x = region_center;
        for (int d = 0; d < dim; ++d)
            x(d) += region_radius * (2.0 * idx[static_cast<std::size_t>(d)] / (per_axis - 1) - 1.0);
        if (manifold.domain().contains(x) &&
            manifold.distance(region_center, x) <= region_radius + 1e-12) {
            best = std::max(best,
                            step_majorant_measure(manifold, mu, x, p, cb.beta, cb.delta_prime,
                                                  cb.D));
        }
        // odometer increment
        int d = 0;
        while (d < dim) {
            if (++idx[static_cast<std::size_t>(d)] < per_axis) break;
            idx[static_cast<std::size_t>(d)] = 0;
            ++d;
        }
        done = d == dim;
    }
    if (best == 0.0) {
        // grid missed the forward ball entirely; fall back to the center
        best = step_majorant_measure(manifold, mu, region_center, p, cb.beta, cb.delta_prime,
                                     cb.D);
    }
    return 1.25 * best;
}

double existence_ball(double C, double R) {
    if (C < 1.0 || !(R > 0.0)) throw invalid_input("existence ball: requires C >= 1 and R > 0");
    return C * (1.0 + C) * R;
}

bool support_condition(double p, double k, double delta, double C, double R) {
    return R <= uniqueness_radius(p, k, delta, C) / (C * (C + 1.0) * (C + 1.0));
}

double median_convexity_margin(const Manifold& manifold, const WeightedMeasure& mu,
                               const std::vector<Vector>& region, double k, double delta,
                               int directions) {
    if (region.empty()) throw invalid_input("median convexity margin: empty region");
    if (k < 0.0 || delta < 0.0)
        throw invalid_input("median convexity margin: k and delta must be >= 0");
    const auto dirs = sampling::unit_directions(manifold.dimension(), directions);
    const MinkowskiNorm& norm = manifold.norm();

    double eta = std::numeric_limits<double>::infinity();
    for (const Vector& x : region) {
        // Per-atom data at this region point.
        std::vector<Vector> logs;
        std::vector<double> dists, weights;
        for (const Atom& a : mu.atoms()) {
            const TangentVector w = manifold.log_map(x, a.point);
            const double r = manifold.distance(x, a.point);
            if (r < 1e-12) continue; // an atom at x contributes a nonnegative limit
            const double skr = std::sqrt(k) * r;
            if (skr >= std::numbers::pi)
                throw out_of_comparison_range(
                    "median convexity margin: sqrt(k) * rho must be < pi");
            logs.push_back(w.components);
            dists.push_back(r);
            weights.push_back(a.weight);
        }
        for (const Vector& d : dirs) {
            const double fd = norm.value(x, d);
            const Vector v = d / fd; // F-unit direction
            std::vector<double> terms;
            terms.reserve(logs.size());
            for (std::size_t i = 0; i < logs.size(); ++i) {
                const Vector& w = logs[i];
                const Matrix g = norm.fundamental_matrix(x, w);
                const double ww = w.dot(g * w);
                const Vector vn = v - (v.dot(g * w) / ww) * w; // normal part wrt g_w
                // sqrt(k) cot(sqrt(k) rho) = x_cot_x(sqrt(k) rho) / rho; the
                // k -> 0 limit is 1 / rho.
                const double cot = x_cot_x(std::sqrt(k) * dists[i]) / dists[i];
                terms.push_back(weights[i] * cot * vn.dot(g * vn));
            }
            eta = std::min(eta, sampling::pairwise_sum(terms));
        }
    }
    return eta - delta;
}

void MeanProblemBounds::validate() const {
    if (!(p >= 1.0)) throw invalid_input("mean problem bounds: p must be >= 1");
    if (!(R > 0.0)) throw invalid_input("mean problem bounds: R must be > 0");
    curvature.validate();
}

} // namespace finsler::bounds
