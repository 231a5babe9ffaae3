#pragma once

#include <cstdint>
#include <functional>
#include <limits>

namespace ghype {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// ln C(n, k); -inf outside 0 <= k <= n. Exact (correctly rounded log of the
/// integer) for n <= 60.
double log_binomial(std::int64_t n, std::int64_t k);

/// ln(1 - e^x) for x <= 0.
double log1mexp(double x);

/// ln(e^a + e^b).
double log_add(double a, double b);

/// Neumaier's compensated sum.
class CompensatedSum {
public:
    void add(double x) noexcept;
    double value() const noexcept { return sum_ + correction_; }

private:
    double sum_ = 0.0;
    double correction_ = 0.0;
};

struct QuadratureConfig {
    double rel_tol = 1e-10;
    int max_subdivisions = 2048;

    /// Throws InputError unless rel_tol is in (0, 1e-2] and max_subdivisions >= 16.
    void validate() const;
};

/// Log of an integrand on (0, 1), evaluated at ln z rather than z so that
/// mass concentrated at z ~ e^{-1e5} stays representable.
using LogIntegrand = std::function<double(double log_z)>;

/// ln of the integral over (0, 1) of exp(log_integrand).
///
/// Intended for unimodal integrands (after the change of variable below),
/// such as the Wallenius integrand, which may be sharply peaked anywhere.
/// The substitution z = u^p moves the supplied peak to u = 1/2; the peak is
/// then re-located independently, so a poor hint costs evaluations, not
/// accuracy. Panels around the peak are refined adaptively with 15-point
/// Gauss-Kronrod rules in log space.
///
/// Returns -inf for an identically zero integrand. Throws ConvergenceError
/// when cfg.max_subdivisions panels do not reach cfg.rel_tol.
double integrate_unit_interval(const LogIntegrand& log_integrand, double log_peak_hint,
                               const QuadratureConfig& cfg = {});

} // namespace ghype
