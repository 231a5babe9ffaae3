#pragma once

#include <cstdint>
#include <random>

#include "ghype/graph.hpp"
#include "ghype/matrix.hpp"

namespace ghype {

/// Uniform edge sampling: m balls drawn without replacement from the urn
/// whose colours are the dyads and whose colour counts are the ball counts
/// of the combinatorial matrix.
class SoftConfigModel {
public:
    /// Requires 0 <= m <= xi.total().
    SoftConfigModel(CombinatorialMatrix xi, count_t m);

    /// The model induced by g: Xi from its degree sequences, m its edge count.
    static SoftConfigModel induced_by(const MultiGraph& g);

    const CombinatorialMatrix& xi() const noexcept { return xi_; }
    count_t draws() const noexcept { return m_; }
    bool directed() const noexcept { return xi_.directed(); }
    std::size_t size() const noexcept { return xi_.size(); }

private:
    CombinatorialMatrix xi_;
    count_t m_;
};

/// ln Pr(X = x) for X ~ Hypergeometric(N balls, K marked, n drawn).
double hypergeometric_log_pmf(count_t N, count_t K, count_t n, count_t x);

/// One draw from Hypergeometric(N, K, n) by inverting the CDF in order of
/// decreasing probability, starting at the mode.
count_t sample_hypergeometric(std::mt19937_64& gen, count_t N, count_t K, count_t n);

/// Multivariate hypergeometric log-probability of g; -inf outside the support.
/// Throws InputError when g's size or directedness differ from the model's.
double log_pmf(const SoftConfigModel& model, const MultiGraph& g);

/// Pr(X_ij = a) in adjacency units (an undirected self-loop count a is A_ii,
/// so odd a has probability 0).
double marginal_pmf(const SoftConfigModel& model, std::size_t i, std::size_t j, count_t a);
double log_marginal_pmf(const SoftConfigModel& model, std::size_t i, std::size_t j, count_t a);

/// E[X]. Undirected diagonals use the doubled A_ii convention so row sums
/// reproduce the degree sequence.
Matrix<double> expected_adjacency(const SoftConfigModel& model);

/// Exact draw from the model by sequential conditional hypergeometric draws.
MultiGraph sample(const SoftConfigModel& model, std::uint64_t seed);

} // namespace ghype
