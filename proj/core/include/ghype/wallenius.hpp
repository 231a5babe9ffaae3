#pragma once

#include <cstdint>
#include <span>

#include "ghype/graph.hpp"
#include "ghype/matrix.hpp"
#include "ghype/numeric.hpp"

namespace ghype {

/// Dyadic odds weights Omega. Only ratios matter: Omega and c * Omega define
/// the same ensemble for any c > 0.
class PropensityMatrix {
public:
    /// Entries must be finite and non-negative; symmetric when undirected.
    PropensityMatrix(Matrix<double> omega, bool directed);

    static PropensityMatrix uniform(std::size_t n, bool directed, double value = 1.0);

    std::size_t size() const noexcept { return omega_.size(); }
    bool directed() const noexcept { return directed_; }
    const Matrix<double>& values() const noexcept { return omega_; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return omega_(i, j); }

    PropensityMatrix scaled(double c) const;

private:
    Matrix<double> omega_;
    bool directed_;
};

/// Generalised hypergeometric ensemble: m draws from the urn of Xi where a
/// ball of colour (i, j) is picked with odds Omega_ij.
class GHypEModel {
public:
    /// Requires matching sizes and directedness, and m no larger than the
    /// number of balls carrying positive propensity.
    GHypEModel(CombinatorialMatrix xi, PropensityMatrix omega, count_t m);

    const CombinatorialMatrix& xi() const noexcept { return xi_; }
    const PropensityMatrix& omega() const noexcept { return omega_; }
    count_t draws() const noexcept { return m_; }
    bool directed() const noexcept { return xi_.directed(); }
    std::size_t size() const noexcept { return xi_.size(); }

    /// Balls whose colour has Omega > 0.
    count_t drawable_balls() const noexcept { return drawable_; }

private:
    CombinatorialMatrix xi_;
    PropensityMatrix omega_;
    count_t m_;
    count_t drawable_ = 0;
};

/// ln int_0^1 prod_c (1 - z^{w_c / S})^{a_c} dz for explicit weights w, draw
/// counts a and S > 0. Colours with a_c = 0 drop out; a drawn colour with
/// w_c = 0 gives -inf.
double log_wallenius_integral(std::span<const double> weights, std::span<const count_t> draws,
                              double remaining_weight, const QuadratureConfig& cfg = {});

/// Multivariate Wallenius log-probability of g:
///   ln prod C(balls, a) + ln int_0^1 prod (1 - z^{Omega/S})^a dz,
///   S = sum Omega (balls - a),
/// over the model's colours (upper triangle for undirected models).
/// -inf outside the support.
double log_pmf_wallenius(const GHypEModel& model, const MultiGraph& g,
                         const QuadratureConfig& cfg = {});

/// Exact Pr(X_ij = a), adjacency units as in the soft configuration model.
///
/// Uses the competing-clock form of the urn: each ball rings after an
/// exponential time with rate Omega and the first m rings are the draws, so
/// the marginal is a one-dimensional integral over the time of the m-th ring
/// of the binomial counts of (i, j) against the convolution of all other
/// colours. Cost grows as (colours) * m^2 per integrand evaluation.
double marginal_pmf_wallenius(const GHypEModel& model, std::size_t i, std::size_t j, count_t a,
                              const QuadratureConfig& cfg = {});

/// Two-colour reduction: dyad (i, j) against all other balls pooled with the
/// ball-weighted mean propensity. Exact when Omega is uniform or the model has
/// two colours; an approximation otherwise.
double approximate_marginal_pmf_wallenius(const GHypEModel& model, std::size_t i, std::size_t j,
                                          count_t a, const QuadratureConfig& cfg = {});

/// Solves (1 - E_ij / balls_ij)^{1 / Omega_ij} = C for a common C with
/// sum E = m. Exact for uniform Omega; for general Omega this is the standard
/// mean approximation, and the inverse of fit_propensity.
Matrix<double> mean_wallenius(const GHypEModel& model);

/// E[X] as the sum over exact marginals. Small models only.
Matrix<double> exact_mean_wallenius(const GHypEModel& model, const QuadratureConfig& cfg = {});

/// Omega_ij = -ln(1 - A_ij / balls_ij), the propensities under which
/// mean_wallenius reproduces g. Throws SaturatedDyadError when A_ij equals
/// its ball count and InputError when it exceeds it.
PropensityMatrix fit_propensity(const MultiGraph& g, const CombinatorialMatrix& xi);

/// Runs the biased urn process: m single draws, each picking a colour with
/// probability proportional to Omega times its remaining balls.
MultiGraph sample_ghype(const GHypEModel& model, std::uint64_t seed);

} // namespace ghype
