#include "finsler/measure.hpp"

#include <cmath>

#include "finsler/sampling.hpp"

namespace finsler {

WeightedMeasure::WeightedMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    if (atoms_.empty()) throw invalid_input("measure: at least one atom required");
    const Eigen::Index dim = atoms_.front().point.size();
    std::vector<double> weights;
    weights.reserve(atoms_.size());
    for (const Atom& a : atoms_) {
        if (a.point.size() != dim) throw invalid_input("measure: atom dimension mismatch");
        require_finite(a.point, "measure atom");
        if (!(a.weight > 0.0)) throw invalid_input("measure: weights must be strictly positive");
        weights.push_back(a.weight);
    }
    const double total = sampling::pairwise_sum(weights);
    if (std::abs(total - 1.0) > 1e-12)
        throw invalid_input("measure: weights must sum to 1, got " + std::to_string(total));
}

bool WeightedMeasure::same_point(const Vector& atom, const Vector& x) {
    const double scale = std::max(1.0, x.lpNorm<Eigen::Infinity>());
    return (atom - x).lpNorm<Eigen::Infinity>() <= 1e-12 * scale;
}

double WeightedMeasure::weight_at(const Vector& x) const {
    double w = 0.0;
    for (const Atom& a : atoms_)
        if (same_point(a.point, x)) w += a.weight;
    return w;
}

} // namespace finsler
