#pragma once

#include <cstdint>
#include <vector>

#include "finsler/tangent.hpp"

namespace finsler::sampling {

/// Seed for the deterministic samplers. Reads FINSLER_SEED from the
/// environment once; falls back to a fixed constant.
std::uint64_t default_seed();

/// Deterministic low-discrepancy set of unit directions (Euclidean norm 1).
/// dim 1: {+1, -1}; dim 2: uniform angles; dim 3: Fibonacci sphere;
/// higher dims: normalized Gaussian draws from a generator seeded with `seed`.
std::vector<Vector> unit_directions(int dim, int count, std::uint64_t seed = default_seed());

/// Pairwise (cascade) summation in fixed index order. Deterministic regardless
/// of how the terms were produced.
double pairwise_sum(const std::vector<double>& terms);
Vector pairwise_sum(const std::vector<Vector>& terms, Eigen::Index dim);

} // namespace finsler::sampling
