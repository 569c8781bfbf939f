#include "finsler/sampling.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>

namespace finsler::sampling {

std::uint64_t default_seed() {
    static const std::uint64_t seed = [] {
        if (const char* env = std::getenv("FINSLER_SEED")) {
            char* end = nullptr;
            const unsigned long long v = std::strtoull(env, &end, 10);
            if (end != env) return static_cast<std::uint64_t>(v);
        }
        return std::uint64_t{0x46494E53u}; // fixed default
    }();
    return seed;
}

std::vector<Vector> unit_directions(int dim, int count, std::uint64_t seed) {
    std::vector<Vector> dirs;
    if (dim == 1) {
        Vector p(1), m(1);
        p << 1.0;
        m << -1.0;
        dirs = {p, m};
        return dirs;
    }
    dirs.reserve(static_cast<std::size_t>(count));
    if (dim == 2) {
        for (int j = 0; j < count; ++j) {
            const double th = 2.0 * std::numbers::pi * j / count;
            Vector v(2);
            v << std::cos(th), std::sin(th);
            dirs.push_back(v);
        }
        return dirs;
    }
    if (dim == 3) {
        // Fibonacci sphere
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (int j = 0; j < count; ++j) {
            const double z = 1.0 - 2.0 * (j + 0.5) / count;
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double th = golden * j;
            Vector v(3);
            v << r * std::cos(th), r * std::sin(th), z;
            dirs.push_back(v);
        }
        return dirs;
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int j = 0; j < count; ++j) {
        Vector v(dim);
        do {
            for (int i = 0; i < dim; ++i) v(i) = gauss(rng);
        } while (v.norm() < 1e-12);
        dirs.push_back(v / v.norm());
    }
    return dirs;
}

double pairwise_sum(const std::vector<double>& terms) {
    if (terms.empty()) return 0.0;
    std::vector<double> work = terms;
    std::size_t n = work.size();
    while (n > 1) {
        std::size_t half = (n + 1) / 2;
        for (std::size_t i = 0; i + half < n; ++i) work[i] += work[i + half];
        n = half;
    }
    return work[0];
}

Vector pairwise_sum(const std::vector<Vector>& terms, Eigen::Index dim) {
    if (terms.empty()) return Vector::Zero(dim);
    std::vector<Vector> work = terms;
    std::size_t n = work.size();
    while (n > 1) {
        std::size_t half = (n + 1) / 2;
        for (std::size_t i = 0; i + half < n; ++i) work[i] += work[i + half];
        n = half;
    }
    return work[0];
}

} // namespace finsler::sampling
