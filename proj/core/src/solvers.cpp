#include "finsler/solvers.hpp"

#include <Eigen/SVD>
#include <cmath>

#include "finsler/sampling.hpp"

namespace finsler::solvers {

namespace {

constexpr double kDescentSlack = 1e-12;
constexpr double kAtomClip = 1e-9;

void check_measure(const Manifold& manifold, const WeightedMeasure& mu) {
    if (mu.dimension() != manifold.dimension())
        throw invalid_input("measure dimension does not match the manifold");
    for (const Atom& a : mu.atoms())
        if (!manifold.domain().contains(a.point))
            throw invalid_input("measure atom outside the chart domain");
}

/// Differential of F_{mu_x} (median functional with the atom at x removed).
Covector median_differential(const Manifold& manifold, const WeightedMeasure& mu,
                             const Vector& x) {
    const MinkowskiNorm& norm = manifold.norm();
    std::vector<Vector> terms;
    terms.reserve(mu.size());
    for (const Atom& a : mu.atoms()) {
        if (WeightedMeasure::same_point(a.point, x)) continue;
        const TangentVector w = manifold.log_map(x, a.point);
        const double r = norm.value(w);
        // d rho(., z) = -L(xz / rho)
        const Covector lw = norm.legendre(TangentVector(x, w.components / r));
        terms.push_back(-a.weight * lw.components);
    }
    return Covector(x, sampling::pairwise_sum(terms, manifold.dimension()));
}

bool support_collinear(const WeightedMeasure& mu) {
    const Eigen::Index n = static_cast<Eigen::Index>(mu.size());
    const Eigen::Index d = mu.dimension();
    if (d == 1 || n <= 2) return true;
    Matrix pts(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
        pts.row(i) = mu.atoms()[static_cast<std::size_t>(i)].point.transpose();
    pts.rowwise() -= pts.colwise().mean();
    const auto svd = pts.jacobiSvd();
    const auto& s = svd.singularValues();
    return s.size() < 2 || s(1) <= 1e-9 * std::max(1.0, s(0));
}

} // namespace

std::string to_string(Termination t) {
    switch (t) {
    case Termination::gradient_tolerance: return "gradient-tolerance";
    case Termination::max_iterations: return "max-iterations";
    case Termination::atom_criterion: return "atom-criterion";
    case Termination::flow_horizon: return "flow-horizon";
    }
    return "unknown";
}

double p_energy(const Manifold& manifold, const WeightedMeasure& mu, const Vector& x, double p) {
    if (!(p >= 1.0)) throw invalid_input("p-energy: p must be >= 1");
    check_measure(manifold, mu);
    std::vector<double> terms;
    terms.reserve(mu.size());
    for (const Atom& a : mu.atoms())
        terms.push_back(a.weight * std::pow(manifold.distance(x, a.point), p));
    return sampling::pairwise_sum(terms);
}

Covector p_energy_differential(const Manifold& manifold, const WeightedMeasure& mu,
                               const Vector& x, double p) {
    if (!(p > 1.0)) throw invalid_input("p-energy differential: p must be > 1");
    check_measure(manifold, mu);
    const MinkowskiNorm& norm = manifold.norm();
    std::vector<Vector> terms;
    terms.reserve(mu.size());
    for (const Atom& a : mu.atoms()) {
        if (WeightedMeasure::same_point(a.point, x)) {
            if (p < 2.0)
                throw nondifferentiable_point(
                    "p-energy differential: atom at x with p < 2; use the median path");
            continue; // the term's differential vanishes for p >= 2
        }
        const TangentVector w = manifold.log_map(x, a.point);
        const double r = norm.value(w);
        const Covector lw = norm.legendre(TangentVector(x, w.components / r));
        terms.push_back(-a.weight * p * std::pow(r, p - 1.0) * lw.components);
    }
    return Covector(x, sampling::pairwise_sum(terms, manifold.dimension()));
}

TangentVector p_energy_gradient(const Manifold& manifold, const WeightedMeasure& mu,
                                const Vector& x, double p) {
    return manifold.norm().legendre_inverse(p_energy_differential(manifold, mu, x, p));
}

SolverReport mean_gradient_flow(const Manifold& manifold, const WeightedMeasure& mu, double p,
                                const Vector& x0, const FlowOptions& opts) {
    if (!(p > 1.0)) throw invalid_input("mean gradient flow: p must be > 1");
    if (!(opts.dt > 0.0) || !(opts.horizon > 0.0))
        throw invalid_input("mean gradient flow: dt and horizon must be > 0");
    check_measure(manifold, mu);
    const MinkowskiNorm& norm = manifold.norm();

    SolverReport rep;
    Vector x = x0;
    double energy = p_energy(manifold, mu, x, p);
    const int max_steps =
        std::min<long long>(opts.max_iterations,
                            static_cast<long long>(std::ceil(opts.horizon / opts.dt)));
    rep.termination = Termination::flow_horizon;
    for (int iter = 0;; ++iter) {
        const Covector diff = p_energy_differential(manifold, mu, x, p);
        Covector neg(x, -diff.components);
        const double gn = norm.dual_norm(neg); // F*(d(-E)) = F(grad(-E))

        IterateRecord rec;
        rec.point = x;
        rec.objective = energy;
        rec.grad_dual_norm = gn;

        if (gn <= opts.grad_tolerance) {
            rep.trace.push_back(rec);
            rep.termination = Termination::gradient_tolerance;
            break;
        }
        if (iter >= max_steps) {
            rep.trace.push_back(rec);
            rep.termination = iter >= opts.max_iterations ? Termination::max_iterations
                                                          : Termination::flow_horizon;
            break;
        }

        const TangentVector dir = norm.legendre_inverse(neg); // grad(-E)
        Vector xn = manifold.geodesic_endpoint(x, opts.dt * dir.components);

        if (p < 2.0) {
            // Keep iterates off atoms, where the energy is only C^1.
            for (const Atom& a : mu.atoms()) {
                if ((xn - a.point).norm() < kAtomClip) {
                    const Vector away = (x - a.point).normalized();
                    xn = a.point + kAtomClip * away;
                    break;
                }
            }
        }

        const double en = p_energy(manifold, mu, xn, p);
        rec.monotonic_delta = en - energy;
        const double predicted = gn * gn; // -dE/da along the continuous flow
        rec.rate_rel_err = std::abs((energy - en) / opts.dt - predicted) / predicted;
        rep.trace.push_back(rec);
        x = xn;
        energy = en;
    }
    rep.final_point = x;
    rep.final_objective = energy;
    rep.final_grad_dual_norm = rep.trace.back().grad_dual_norm;
    rep.iterations = static_cast<int>(rep.trace.size()) - 1;
    return rep;
}

SolverReport mean_gradient_descent(const Manifold& manifold, const WeightedMeasure& mu, double p,
                                   const Vector& x0, const bounds::MeanProblemBounds& problem,
                                   const DescentOptions& opts) {
    if (!(p >= 2.0))
        throw invalid_input(
            "mean gradient descent: requires p >= 2 with atomic measures (the step majorant is "
            "unbounded otherwise); use mean_gradient_flow for p in (1, 2)");
    problem.validate();
    check_measure(manifold, mu);
    const MinkowskiNorm& norm = manifold.norm();

    const double ball_radius = bounds::existence_ball(problem.curvature.C, problem.R);
    const double CH = bounds::step_constant_CH(manifold, mu, p, problem.curvature, problem.x0,
                                               ball_radius);

    SolverReport rep;
    rep.step_constant = CH;
    Vector x = x0;
    double energy = p_energy(manifold, mu, x, p);
    rep.start_condition_met = energy <= std::pow(problem.R, p);
    rep.termination = Termination::max_iterations;

    for (int iter = 0;; ++iter) {
        const Covector diff = p_energy_differential(manifold, mu, x, p);
        Covector neg(x, -diff.components);
        const double gn = norm.dual_norm(neg);

        IterateRecord rec;
        rec.point = x;
        rec.objective = energy;
        rec.grad_dual_norm = gn;
        rec.in_ball = manifold.distance(problem.x0, x) <= ball_radius + 1e-9;
        if (!rec.in_ball) rep.containment_ok = false;

        if (gn <= opts.grad_tolerance) {
            rep.trace.push_back(rec);
            rep.termination = Termination::gradient_tolerance;
            break;
        }
        if (iter >= opts.max_iterations) {
            rep.trace.push_back(rec);
            break;
        }

        const TangentVector grad = norm.legendre_inverse(neg);
        const Vector v = grad.components / gn; // F-unit descent direction
        const double t = gn / CH;
        const Vector xn = manifold.geodesic_endpoint(x, t * v);
        const double en = p_energy(manifold, mu, xn, p);

        rec.descent_slack = en - (energy - gn * gn / (2.0 * CH));
        rep.trace.push_back(rec);
        if (rec.descent_slack > kDescentSlack)
            throw inconsistent_step_constant(
                "descent inequality violated (slack " + std::to_string(rec.descent_slack) +
                "); the supplied curvature bounds are inconsistent with the manifold");
        x = xn;
        energy = en;
    }
    rep.final_point = x;
    rep.final_objective = energy;
    rep.final_grad_dual_norm = rep.trace.back().grad_dual_norm;
    rep.iterations = static_cast<int>(rep.trace.size()) - 1;
    return rep;
}

TangentVector median_direction(const Manifold& manifold, const WeightedMeasure& mu,
                               const Vector& x) {
    check_measure(manifold, mu);
    return manifold.norm().legendre_inverse(median_differential(manifold, mu, x));
}

bool atom_local_min_test(const Manifold& manifold, const WeightedMeasure& mu, const Vector& x) {
    check_measure(manifold, mu);
    const Covector diff = median_differential(manifold, mu, x);
    const double fstar = manifold.norm().dual_norm(diff);
    return mu.weight_at(x) >= fstar - 1e-12;
}

SolverReport median_flow(const Manifold& manifold, const WeightedMeasure& mu, const Vector& x0,
                         const FlowOptions& opts) {
    if (!(opts.dt > 0.0) || !(opts.horizon > 0.0))
        throw invalid_input("median flow: dt and horizon must be > 0");
    check_measure(manifold, mu);
    const MinkowskiNorm& norm = manifold.norm();

    SolverReport rep;
    rep.collinear_support_risk = support_collinear(mu);
    Vector x = x0;
    double objective = p_energy(manifold, mu, x, 1.0);
    const int max_steps =
        std::min<long long>(opts.max_iterations,
                            static_cast<long long>(std::ceil(opts.horizon / opts.dt)));
    rep.termination = Termination::flow_horizon;

    for (int iter = 0;; ++iter) {
        const Covector diff = median_differential(manifold, mu, x);
        const double fstar = norm.dual_norm(diff);
        const double wx = mu.weight_at(x);

        IterateRecord rec;
        rec.point = x;
        rec.objective = objective;
        rec.grad_dual_norm = fstar;

        if (wx > 0.0 && wx >= fstar - 1e-12) {
            rep.trace.push_back(rec);
            rep.termination = Termination::atom_criterion;
            break;
        }
        if (fstar <= opts.grad_tolerance) {
            rep.trace.push_back(rec);
            rep.termination = Termination::gradient_tolerance;
            break;
        }
        if (iter >= max_steps) {
            rep.trace.push_back(rec);
            rep.termination = iter >= opts.max_iterations ? Termination::max_iterations
                                                          : Termination::flow_horizon;
            break;
        }

        const TangentVector H = norm.legendre_inverse(diff);
        const Vector step = -opts.dt * H.components;
        const double step_len = norm.value(TangentVector(x, step));

        // An atom reachable within this step: snap to it if it satisfies the
        // local-minimum criterion, so the flow can terminate exactly there.
        bool snapped = false;
        for (const Atom& a : mu.atoms()) {
            if (WeightedMeasure::same_point(a.point, x)) continue;
            if (manifold.distance(x, a.point) > step_len) continue;
            const double obj = p_energy(manifold, mu, a.point, 1.0);
            if (obj <= objective && atom_local_min_test(manifold, mu, a.point)) {
                rec.monotonic_delta = obj - objective;
                rep.trace.push_back(rec);
                x = a.point;
                objective = obj;
                snapped = true;
                break;
            }
        }
        if (snapped) continue;

        const Vector xn = manifold.geodesic_endpoint(x, step);
        const double on = p_energy(manifold, mu, xn, 1.0);
        rec.monotonic_delta = on - objective;
        // Eq-of-motion decay rate: f' = -F*(F* - mu({x})).
        const double predicted = fstar * (fstar - wx);
        if (predicted > 0.0)
            rec.rate_rel_err = std::abs((objective - on) / opts.dt - predicted) / predicted;
        rep.trace.push_back(rec);
        x = xn;
        objective = on;
    }
    rep.final_point = x;
    rep.final_objective = objective;
    rep.final_grad_dual_norm = rep.trace.back().grad_dual_norm;
    rep.iterations = static_cast<int>(rep.trace.size()) - 1;
    return rep;
}

} // namespace finsler::solvers
