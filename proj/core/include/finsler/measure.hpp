#pragma once

#include <vector>

#include "finsler/tangent.hpp"

namespace finsler {

/// One weighted atom of a discrete measure.
struct Atom {
    Vector point;
    double weight;
};

/// Finite weighted point set with strictly positive weights summing to 1.
class WeightedMeasure {
public:
    explicit WeightedMeasure(std::vector<Atom> atoms);

    const std::vector<Atom>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }
    Eigen::Index dimension() const { return atoms_.front().point.size(); }

    /// Total weight of atoms coinciding with x (coordinate match within a
    /// relative 1e-12 tolerance), i.e. mu({x}).
    double weight_at(const Vector& x) const;

    /// True when the given atom coincides with x under the same tolerance
    /// used by weight_at.
    static bool same_point(const Vector& atom, const Vector& x);

private:
    std::vector<Atom> atoms_;
};

} // namespace finsler
