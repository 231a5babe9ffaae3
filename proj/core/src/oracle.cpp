#include "ghype/oracle.hpp"

#include <cstdlib>
#include <functional>
#include <limits>
#include <random>
#include <string>

#include <boost/math/distributions/chi_squared.hpp>

#include "ghype/error.hpp"

namespace ghype::oracle {
namespace {

std::vector<count_t> ball_counts(const CombinatorialMatrix& xi) {
    std::vector<count_t> out;
    out.reserve(xi.cells().size());
    for (const auto [i, j] : xi.cells()) out.push_back(xi.ball_count(i, j));
    return out;
}

// Calls visit(counts) for each bounded composition of m, lexicographically.
void for_each_composition(const std::vector<count_t>& bounds, count_t m, std::size_t cap,
                          const std::function<void(const std::vector<count_t>&)>& visit) {
    std::vector<count_t> suffix_capacity(bounds.size() + 1, 0);
    for (std::size_t c = bounds.size(); c-- > 0;)
        suffix_capacity[c] = suffix_capacity[c + 1] + bounds[c];
    std::vector<count_t> counts(bounds.size(), 0);
    std::size_t visited = 0;
    std::function<void(std::size_t, count_t)> recurse = [&](std::size_t c, count_t left) {
        if (c == bounds.size()) {
            if (left != 0) return;
            if (++visited > cap)
                throw InputError("support enumeration exceeds the cap of " + std::to_string(cap));
            visit(counts);
            return;
        }
        if (left > suffix_capacity[c]) return;
        const count_t top = std::min(bounds[c], left);
        for (count_t x = 0; x <= top; ++x) {
            counts[c] = x;
            recurse(c + 1, left - x);
        }
        counts[c] = 0;
    };
    recurse(0, m);
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

std::size_t support_cap_from_env() {
    if (const char* env = std::getenv("GHYPE_MAX_SUPPORT")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    return kDefaultSupportCap;
}

std::vector<count_t> cell_counts(const MultiGraph& g) {
    std::vector<count_t> out;
    for (const auto [i, j] : dyad_cells(g.vertex_count(), g.directed()))
        out.push_back(g.multiplicity(i, j));
    return out;
}

std::vector<MultiGraph> enumerate_support(const CombinatorialMatrix& xi, count_t m, std::size_t cap) {
    std::vector<MultiGraph> out;
    for_each_composition(ball_counts(xi), m, cap, [&](const std::vector<count_t>& counts) {
        out.push_back(MultiGraph::from_cell_counts(xi.size(), xi.directed(), counts));
    });
    return out;
}

BigInt exact_binomial(count_t n, count_t k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    BigInt result = 1;
    for (count_t t = 1; t <= k; ++t) {
        result *= n - k + t;
        result /= t;
    }
    return result;
}

Rational exact_central_probability(const CombinatorialMatrix& xi, count_t m, const MultiGraph& g) {
    if (g.edge_count() != m) return 0;
    BigInt numerator = 1;
    for (const auto [i, j] : xi.cells()) numerator *= exact_binomial(xi.ball_count(i, j), g.multiplicity(i, j));
    return Rational(numerator, exact_binomial(xi.total(), m));
}

SupportEnumeration<Rational> central_support_distribution(const CombinatorialMatrix& xi, count_t m,
                                                          std::size_t cap) {
    SupportEnumeration<Rational> out;
    const BigInt denominator = exact_binomial(xi.total(), m);
    const auto bounds = ball_counts(xi);
    for_each_composition(bounds, m, cap, [&](const std::vector<count_t>& counts) {
        BigInt numerator = 1;
        for (std::size_t c = 0; c < counts.size(); ++c) numerator *= exact_binomial(bounds[c], counts[c]);
        Rational p(numerator, denominator);
        out.total += p;
        out.entries.push_back({MultiGraph::from_cell_counts(xi.size(), xi.directed(), counts), p});
    });
    return out;
}

Matrix<Rational> exact_expected_adjacency(const CombinatorialMatrix& xi, count_t m) {
    Matrix<Rational> out(xi.size(), Rational(0));
    if (xi.total() == 0) return out;
    const count_t factor = xi.directed() ? 1 : 2;
    for (std::size_t i = 0; i < xi.size(); ++i)
        for (std::size_t j = 0; j < xi.size(); ++j)
            out(i, j) = Rational(BigInt(factor) * m * xi.xi(i, j), BigInt(xi.total()));
    return out;
}

SupportEnumeration<long double> urn_support_distribution(const CombinatorialMatrix& xi,
                                                         const PropensityMatrix& omega, count_t m,
                                                         std::size_t cap) {
    const auto bounds = ball_counts(xi);
    std::vector<long double> weights;
    for (const auto [i, j] : xi.cells()) weights.push_back(omega(i, j));

    // Layer k holds the probability of every composition reached after k draws.
    std::map<std::vector<count_t>, long double> layer{{std::vector<count_t>(bounds.size(), 0), 1.0L}};
    for (count_t k = 0; k < m; ++k) {
        std::map<std::vector<count_t>, long double> next;
        for (const auto& [state, p] : layer) {
            long double remaining = 0.0L;
            for (std::size_t c = 0; c < bounds.size(); ++c)
                remaining += weights[c] * static_cast<long double>(bounds[c] - state[c]);
            if (remaining == 0.0L) continue;
            for (std::size_t c = 0; c < bounds.size(); ++c) {
                const long double w = weights[c] * static_cast<long double>(bounds[c] - state[c]);
                if (w == 0.0L) continue;
                auto successor = state;
                ++successor[c];
                next[successor] += p * w / remaining;
            }
            if (next.size() > cap)
                throw InputError("urn recursion exceeds the support cap of " + std::to_string(cap));
        }
        layer = std::move(next);
    }

    SupportEnumeration<long double> out;
    for_each_composition(bounds, m, cap, [&](const std::vector<count_t>& counts) {
        const auto it = layer.find(counts);
        const long double p = it == layer.end() ? 0.0L : it->second;
        out.total += p;
        out.entries.push_back({MultiGraph::from_cell_counts(xi.size(), xi.directed(), counts), p});
    });
    return out;
}

std::vector<MultiGraph> directed_preimages(const MultiGraph& g) {
    if (g.directed()) throw InputError("directed_preimages expects an undirected graph");
    const std::size_t n = g.vertex_count();
    std::vector<Dyad> pairs;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (g.adjacency(i, j) > 0) pairs.push_back({i, j});

    Matrix<count_t> base(n);
    for (std::size_t i = 0; i < n; ++i) base(i, i) = g.adjacency(i, i) / 2;

    std::vector<MultiGraph> out;
    std::function<void(std::size_t, Matrix<count_t>&)> recurse = [&](std::size_t p, Matrix<count_t>& adj) {
        if (p == pairs.size()) {
            out.push_back(MultiGraph::from_adjacency(adj, true));
            return;
        }
        const auto [i, j] = pairs[p];
        const count_t total = g.adjacency(i, j);
        for (count_t forward = 0; forward <= total; ++forward) {
            adj(i, j) = forward;
            adj(j, i) = total - forward;
            recurse(p + 1, adj);
        }
        adj(i, j) = adj(j, i) = 0;
    };
    recurse(0, base);
    return out;
}

std::uint64_t UrnHistogram::count(const MultiGraph& g) const {
    const auto it = counts.find(cell_counts(g));
    return it == counts.end() ? 0 : it->second;
}

void UrnHistogram::merge(const UrnHistogram& other) {
    if (other.n != n || other.directed != directed)
        throw InputError("cannot merge histograms of different models");
    trials += other.trials;
    for (const auto& [key, c] : other.counts) counts[key] += c;
}

UrnHistogram simulate_urn(const CombinatorialMatrix& xi, const PropensityMatrix& omega, count_t m,
                          std::uint64_t trials, std::uint64_t seed) {
    const GHypEModel feasibility(xi, omega, m);  // rejects infeasible m
    (void)feasibility;
    const auto bounds = ball_counts(xi);
    std::vector<double> weights;
    for (const auto [i, j] : xi.cells()) weights.push_back(omega(i, j));

    UrnHistogram hist;
    hist.n = xi.size();
    hist.directed = xi.directed();
    hist.trials = trials;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<count_t> remaining(bounds.size()), drawn(bounds.size());
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        std::ranlux48 gen(splitmix64(seed ^ splitmix64(trial)));
        remaining = bounds;
        std::fill(drawn.begin(), drawn.end(), 0);
        for (count_t d = 0; d < m; ++d) {
            double total = 0.0;
            for (std::size_t c = 0; c < bounds.size(); ++c)
                total += weights[c] * static_cast<double>(remaining[c]);
            double target = unit(gen) * total;
            std::size_t pick = bounds.size();
            for (std::size_t c = 0; c < bounds.size(); ++c) {
                const double w = weights[c] * static_cast<double>(remaining[c]);
                if (w == 0.0) continue;
                pick = c;
                if (target < w) break;
                target -= w;
            }
            --remaining[pick];
            ++drawn[pick];
        }
        ++hist.counts[drawn];
    }
    return hist;
}

std::size_t support_size(const CombinatorialMatrix& xi, count_t m, std::size_t cap) {
    if (m < 0) return 0;
    const std::size_t limit = cap + 1;
    // ways[s]: bounded compositions of s over the colours seen so far, saturated at limit.
    std::vector<std::size_t> ways(static_cast<std::size_t>(m) + 1, 0), next(ways.size());
    ways[0] = 1;
    for (const auto bound : ball_counts(xi)) {
        std::fill(next.begin(), next.end(), 0);
        for (std::size_t s = 0; s < ways.size(); ++s) {
            if (ways[s] == 0) continue;
            for (count_t x = 0; x <= bound && s + x < ways.size(); ++x)
                next[s + x] = std::min(limit, next[s + x] + ways[s]);
        }
        ways.swap(next);
    }
    return ways.back();
}

MultiGraph random_graph(std::mt19937_64& gen, std::size_t n, count_t m, bool directed) {
    const auto cells = dyad_cells(n, directed);
    std::uniform_int_distribution<std::size_t> pick(0, cells.size() - 1);
    std::vector<count_t> counts(cells.size(), 0);
    for (count_t e = 0; e < m; ++e) ++counts[pick(gen)];
    return MultiGraph::from_cell_counts(n, directed, counts);
}

namespace {

// Pools consecutive bins until each pooled bin reaches min_expected (by the
// supplied weights); a short remainder joins the last pooled bin.
std::vector<std::size_t> pooled_bins(std::span<const double> expected, double min_expected) {
    std::vector<std::size_t> group(expected.size());
    std::size_t current = 0;
    double accumulated = 0.0;
    bool open = false;
    for (std::size_t b = 0; b < expected.size(); ++b) {
        group[b] = current;
        accumulated += expected[b];
        open = true;
        if (accumulated >= min_expected) {
            ++current;
            accumulated = 0.0;
            open = false;
        }
    }
    if (open && current > 0)
        for (auto& g : group)
            if (g == current) g = current - 1;
    return group;
}

ChiSquareResult finish(double statistic, int dof) {
    ChiSquareResult out;
    out.statistic = statistic;
    out.degrees_of_freedom = dof;
    if (dof <= 0) {
        out.p_value = 1.0;
        return out;
    }
    const boost::math::chi_squared_distribution<double> dist(dof);
    out.p_value = boost::math::cdf(boost::math::complement(dist, statistic));
    return out;
}

} // namespace

ChiSquareResult chi_square_goodness_of_fit(std::span<const std::uint64_t> observed,
                                           std::span<const double> probabilities, double min_expected) {
    if (observed.size() != probabilities.size()) throw InputError("bin counts differ in length");
    double trials = 0.0;
    for (auto c : observed) trials += static_cast<double>(c);
    double unexplained = 0.0;
    std::vector<double> expected(observed.size());
    for (std::size_t b = 0; b < observed.size(); ++b) {
        expected[b] = trials * probabilities[b];
        if (probabilities[b] <= 0.0) unexplained += static_cast<double>(observed[b]);
    }
    if (unexplained > 0.0) return {std::numeric_limits<double>::infinity(), 1, 0.0};
    const auto group = pooled_bins(expected, min_expected);
    const std::size_t groups = group.empty() ? 0 : group.back() + 1;
    std::vector<double> e(groups, 0.0), o(groups, 0.0);
    for (std::size_t b = 0; b < observed.size(); ++b) {
        e[group[b]] += expected[b];
        o[group[b]] += static_cast<double>(observed[b]);
    }
    double statistic = 0.0;
    for (std::size_t g = 0; g < groups; ++g)
        if (e[g] > 0.0) statistic += (o[g] - e[g]) * (o[g] - e[g]) / e[g];
    return finish(statistic, static_cast<int>(groups) - 1);
}

ChiSquareResult chi_square_homogeneity(std::span<const std::uint64_t> first,
                                       std::span<const std::uint64_t> second, double min_expected) {
    if (first.size() != second.size()) throw InputError("bin counts differ in length");
    double n1 = 0.0, n2 = 0.0;
    for (auto c : first) n1 += static_cast<double>(c);
    for (auto c : second) n2 += static_cast<double>(c);
    if (n1 == 0.0 || n2 == 0.0) throw InputError("homogeneity test needs two non-empty samples");
    // Pool on the smaller expected count of the two samples.
    std::vector<double> weight(first.size());
    const double scale = std::min(n1, n2) / (n1 + n2);
    for (std::size_t b = 0; b < first.size(); ++b)
        weight[b] = scale * static_cast<double>(first[b] + second[b]);
    const auto group = pooled_bins(weight, min_expected);
    const std::size_t groups = group.empty() ? 0 : group.back() + 1;
    std::vector<double> o1(groups, 0.0), o2(groups, 0.0);
    for (std::size_t b = 0; b < first.size(); ++b) {
        o1[group[b]] += static_cast<double>(first[b]);
        o2[group[b]] += static_cast<double>(second[b]);
    }
    double statistic = 0.0;
    int used = 0;
    for (std::size_t g = 0; g < groups; ++g) {
        const double total = o1[g] + o2[g];
        if (total == 0.0) continue;
        ++used;
        const double e1 = total * n1 / (n1 + n2), e2 = total * n2 / (n1 + n2);
        statistic += (o1[g] - e1) * (o1[g] - e1) / e1 + (o2[g] - e2) * (o2[g] - e2) / e2;
    }
    return finish(statistic, used - 1);
}

} // namespace ghype::oracle
