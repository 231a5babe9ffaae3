#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "ghype/graph.hpp"
#include "ghype/matrix.hpp"
#include "ghype/wallenius.hpp"

/// Independent ground truth for small instances: exhaustive enumeration with
/// exact rational arithmetic, the urn process recursion, and naive
/// ball-by-ball simulation. Nothing here calls the quadrature or the
/// samplers it is meant to check.
namespace ghype::oracle {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline constexpr std::size_t kDefaultSupportCap = 1'000'000;

/// GHYPE_MAX_SUPPORT if set to a positive integer, else kDefaultSupportCap.
std::size_t support_cap_from_env();

template <typename Probability>
struct SupportEnumeration {
    struct Entry {
        MultiGraph graph;
        Probability probability;
    };
    std::vector<Entry> entries;
    Probability total{};
};

/// Every graph with m draws and per-colour counts within the ball counts, in
/// lexicographic order of the colour counts. Throws InputError beyond cap.
std::vector<MultiGraph> enumerate_support(const CombinatorialMatrix& xi, count_t m,
                                          std::size_t cap = kDefaultSupportCap);

BigInt exact_binomial(count_t n, count_t k);

/// Multivariate hypergeometric probability of g as an exact rational.
Rational exact_central_probability(const CombinatorialMatrix& xi, count_t m, const MultiGraph& g);

SupportEnumeration<Rational> central_support_distribution(const CombinatorialMatrix& xi, count_t m,
                                                          std::size_t cap = kDefaultSupportCap);

/// m Xi_ij / M (directed) or 2 m Xi_ij / M (undirected) as exact rationals.
Matrix<Rational> exact_expected_adjacency(const CombinatorialMatrix& xi, count_t m);

/// Probability of every support point of the biased urn, obtained by the
/// forward recursion over draw compositions
///   P(x) = sum_c P(x - e_c) w_c (n_c - x_c + 1) / sum_d w_d (n_d - (x - e_c)_d).
SupportEnumeration<long double> urn_support_distribution(const CombinatorialMatrix& xi,
                                                         const PropensityMatrix& omega, count_t m,
                                                         std::size_t cap = kDefaultSupportCap);

/// Every directed graph whose undirected projection is g.
std::vector<MultiGraph> directed_preimages(const MultiGraph& g);

/// Outcome counts keyed by the per-colour draw counts.
struct UrnHistogram {
    std::size_t n = 0;
    bool directed = true;
    std::uint64_t trials = 0;
    std::map<std::vector<count_t>, std::uint64_t> counts;

    std::uint64_t count(const MultiGraph& g) const;
    /// Associative merge of two histograms of the same model.
    void merge(const UrnHistogram& other);
};

/// Per-colour draw counts of g in dyad_cells order.
std::vector<count_t> cell_counts(const MultiGraph& g);

/// Ball-by-ball simulation of the urn: each draw scans all colours and picks
/// one with probability proportional to Omega times its remaining balls.
/// Each trial is seeded independently from (seed, trial index).
UrnHistogram simulate_urn(const CombinatorialMatrix& xi, const PropensityMatrix& omega, count_t m,
                          std::uint64_t trials, std::uint64_t seed);

/// Number of support points, saturating at cap + 1.
std::size_t support_size(const CombinatorialMatrix& xi, count_t m, std::size_t cap = kDefaultSupportCap);

/// A graph with m edges placed independently and uniformly over the dyads of
/// dyad_cells(n, directed). Undirected self-loops count as one edge.
MultiGraph random_graph(std::mt19937_64& gen, std::size_t n, count_t m, bool directed);

struct ChiSquareResult {
    double statistic = 0.0;
    int degrees_of_freedom = 0;
    double p_value = 1.0;
};

/// Pearson goodness of fit. Bins with expected count below min_expected are
/// pooled in order with their neighbours before the statistic is formed.
ChiSquareResult chi_square_goodness_of_fit(std::span<const std::uint64_t> observed,
                                           std::span<const double> probabilities,
                                           double min_expected = 5.0);

/// Pearson test that two count vectors over the same bins share one
/// distribution, with the same pooling rule applied to the pooled counts.
ChiSquareResult chi_square_homogeneity(std::span<const std::uint64_t> first,
                                       std::span<const std::uint64_t> second,
                                       double min_expected = 5.0);

/// Observed counts of the histogram in the order of the given support.
template <typename Probability>
std::vector<std::uint64_t> histogram_counts(const UrnHistogram& hist,
                                            const SupportEnumeration<Probability>& support) {
    std::vector<std::uint64_t> out;
    out.reserve(support.entries.size());
    for (const auto& entry : support.entries) out.push_back(hist.count(entry.graph));
    return out;
}

} // namespace ghype::oracle
