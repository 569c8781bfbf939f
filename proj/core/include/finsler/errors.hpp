#pragma once

#include <stdexcept>
#include <string>

namespace finsler {

/// Bad user input: non-finite components, dimension mismatches, parameters
/// outside their documented ranges.
class invalid_input : public std::invalid_argument {
public:
    explicit invalid_input(const std::string& what) : std::invalid_argument(what) {}
};

/// The fundamental tensor (and everything built on it) is undefined at a zero
/// reference vector.
class degenerate_reference_vector : public invalid_input {
public:
    degenerate_reference_vector()
        : invalid_input("reference vector must be nonzero") {}
    explicit degenerate_reference_vector(const std::string& what) : invalid_input(what) {}
};

/// An iterative solve (Legendre inversion, geodesic shooting) ran out of
/// iterations; carries the best residual reached.
class numerical_failure : public std::runtime_error {
public:
    numerical_failure(const std::string& what, double residual)
        : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
          residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// A geodesic left the coordinate chart; carries the first parameter value at
/// which the trajectory was outside.
class domain_escape : public std::runtime_error {
public:
    explicit domain_escape(double exit_time)
        : std::runtime_error("trajectory left the chart domain at t = " +
                             std::to_string(exit_time)),
          exit_time_(exit_time) {}
    double exit_time() const noexcept { return exit_time_; }

private:
    double exit_time_;
};

/// Comparison-geometry formulas are only valid for sqrt(k) * r < pi.
class out_of_comparison_range : public std::runtime_error {
public:
    explicit out_of_comparison_range(const std::string& what) : std::runtime_error(what) {}
};

/// The step majorant is unbounded: p < 2 with an atom at distance zero.
class singular_majorant : public std::runtime_error {
public:
    explicit singular_majorant(const std::string& what) : std::runtime_error(what) {}
};

/// The p-energy is not differentiable at this point for the requested p;
/// callers should switch to the median path.
class nondifferentiable_point : public std::runtime_error {
public:
    explicit nondifferentiable_point(const std::string& what) : std::runtime_error(what) {}
};

/// A gradient-descent iterate violated the guaranteed decrease; the supplied
/// curvature bounds (and hence the step constant) are inconsistent.
class inconsistent_step_constant : public std::runtime_error {
public:
    explicit inconsistent_step_constant(const std::string& what) : std::runtime_error(what) {}
};

} // namespace finsler
