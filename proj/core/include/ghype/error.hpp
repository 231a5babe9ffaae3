#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ghype {

/// Malformed input: out-of-range indices, dimension mismatches, bad multiplicities.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The requested model cannot exist, e.g. more draws than drawable balls.
class InfeasibleModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A dyad whose multiplicity equals its ball count; its fitted propensity would be infinite.
class SaturatedDyadError : public InfeasibleModelError {
public:
    SaturatedDyadError(std::size_t i, std::size_t j)
        : InfeasibleModelError("saturated dyad (" + std::to_string(i) + ", " + std::to_string(j) +
                               "): multiplicity equals its ball count"),
          i_(i), j_(j) {}

    std::size_t source() const noexcept { return i_; }
    std::size_t target() const noexcept { return j_; }

private:
    std::size_t i_;
    std::size_t j_;
};

/// Adaptive quadrature ran out of subdivisions before meeting its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace ghype
