#pragma once

#include <Eigen/Dense>
#include <utility>

#include "finsler/errors.hpp"

namespace finsler {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A tangent vector: base point plus components, both in chart coordinates.
struct TangentVector {
    Vector base;
    Vector components;

    TangentVector() = default;
    TangentVector(Vector base_point, Vector comps)
        : base(std::move(base_point)), components(std::move(comps)) {
        if (base.size() != components.size())
            throw invalid_input("tangent vector: base and components must have equal length");
    }

    Eigen::Index dimension() const { return components.size(); }
};

/// A covector at a base point, components in the dual frame.
struct Covector {
    Vector base;
    Vector components;

    Covector() = default;
    Covector(Vector base_point, Vector comps)
        : base(std::move(base_point)), components(std::move(comps)) {
        if (base.size() != components.size())
            throw invalid_input("covector: base and components must have equal length");
    }

    Eigen::Index dimension() const { return components.size(); }

    /// Natural pairing <xi, v>.
    double pair(const TangentVector& v) const { return components.dot(v.components); }
};

inline void require_finite(const Vector& v, const char* what) {
    if (!v.allFinite()) throw invalid_input(std::string(what) + ": non-finite components");
}

} // namespace finsler
