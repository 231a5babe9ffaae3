#include "ghype/soft_config.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ghype/error.hpp"
#include "ghype/numeric.hpp"
#include "ghype/random.hpp"

namespace ghype {
namespace {

void check_vertex(const SoftConfigModel& model, std::size_t i, std::size_t j) {
    if (i >= model.size() || j >= model.size())
        throw InputError("vertex index out of range: (" + std::to_string(i) + ", " +
                         std::to_string(j) + ")");
}

} // namespace

SoftConfigModel::SoftConfigModel(CombinatorialMatrix xi, count_t m) : xi_(std::move(xi)), m_(m) {
    if (m_ < 0) throw InputError("number of draws must be non-negative");
    if (m_ > xi_.total())
        throw InfeasibleModelError("cannot draw " + std::to_string(m_) + " edges from " +
                                   std::to_string(xi_.total()) + " stub combinations");
}

SoftConfigModel SoftConfigModel::induced_by(const MultiGraph& g) {
    return SoftConfigModel(combinatorial_matrix(degree_sequences(g)), g.edge_count());
}

double hypergeometric_log_pmf(count_t N, count_t K, count_t n, count_t x) {
    if (x < 0 || x > K || n - x < 0 || n - x > N - K) return kNegInf;
    return log_binomial(K, x) + log_binomial(N - K, n - x) - log_binomial(N, n);
}

count_t sample_hypergeometric(std::mt19937_64& gen, count_t N, count_t K, count_t n) {
    const count_t lo = std::max<count_t>(0, n - (N - K));
    const count_t hi = std::min(K, n);
    if (lo >= hi) return lo;

    __extension__ using wide_t = __int128;
    const auto mode_wide = (static_cast<wide_t>(n) + 1) * (static_cast<wide_t>(K) + 1) /
                           (static_cast<wide_t>(N) + 2);
    const count_t mode = std::clamp(static_cast<count_t>(mode_wide), lo, hi);
    const double p_mode = std::exp(hypergeometric_log_pmf(N, K, n, mode));
    const double u = uniform01(gen);

    count_t left = mode, right = mode;
    double p_left = p_mode, p_right = p_mode;
    double cumulative = p_mode;
    if (u < cumulative) return mode;
    const auto rest = static_cast<double>(N - K - n);
    while (true) {
        double next_left = -1.0, next_right = -1.0;
        if (left > lo) {
            const auto l = static_cast<double>(left);
            next_left = p_left * l * (rest + l) / ((static_cast<double>(K) - l + 1.0) *
                                                   (static_cast<double>(n) - l + 1.0));
        }
        if (right < hi) {
            const auto r = static_cast<double>(right);
            next_right = p_right * (static_cast<double>(K) - r) * (static_cast<double>(n) - r) /
                         ((r + 1.0) * (rest + r + 1.0));
        }
        if (next_left < 0.0 && next_right < 0.0) return right;  // u beyond the rounded total
        if (next_right >= next_left) {
            ++right;
            p_right = next_right;
            cumulative += p_right;
            if (u < cumulative) return right;
        } else {
            --left;
            p_left = next_left;
            cumulative += p_left;
            if (u < cumulative) return left;
        }
    }
}

double log_pmf(const SoftConfigModel& model, const MultiGraph& g) {
    if (g.vertex_count() != model.size() || g.directed() != model.directed())
        throw InputError("graph does not match the model's vertex count or directedness");
    if (g.edge_count() != model.draws()) return kNegInf;
    const auto& xi = model.xi();
    CompensatedSum sum;
    for (const auto [i, j] : xi.cells()) {
        const count_t a = g.multiplicity(i, j);
        if (a == 0) continue;
        const double term = log_binomial(xi.ball_count(i, j), a);
        if (term == kNegInf) return kNegInf;
        sum.add(term);
    }
    return sum.value() - log_binomial(xi.total(), model.draws());
}

double log_marginal_pmf(const SoftConfigModel& model, std::size_t i, std::size_t j, count_t a) {
    check_vertex(model, i, j);
    if (a < 0) return kNegInf;
    count_t draws = a;
    if (!model.directed() && i == j) {
        if (a % 2 != 0) return kNegInf;
        draws = a / 2;
    }
    return hypergeometric_log_pmf(model.xi().total(), model.xi().ball_count(i, j), model.draws(),
                                  draws);
}

double marginal_pmf(const SoftConfigModel& model, std::size_t i, std::size_t j, count_t a) {
    return std::exp(log_marginal_pmf(model, i, j, a));
}

Matrix<double> expected_adjacency(const SoftConfigModel& model) {
    const std::size_t n = model.size();
    const auto& xi = model.xi();
    Matrix<double> expected(n, 0.0);
    if (xi.total() == 0) return expected;
    const double scale = static_cast<double>(model.draws()) / static_cast<double>(xi.total());
    const double factor = model.directed() ? 1.0 : 2.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            expected(i, j) = factor * scale * static_cast<double>(xi.xi(i, j));
    return expected;
}

MultiGraph sample(const SoftConfigModel& model, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    const auto& xi = model.xi();
    const auto& cells = xi.cells();
    std::vector<count_t> counts(cells.size(), 0);
    count_t balls_left = xi.total();
    count_t draws_left = model.draws();
    for (std::size_t c = 0; c < cells.size() && draws_left > 0; ++c) {
        const count_t balls = xi.ball_count(cells[c].i, cells[c].j);
        if (balls == 0) continue;
        const count_t x = sample_hypergeometric(gen, balls_left, balls, draws_left);
        counts[c] = x;
        balls_left -= balls;
        draws_left -= x;
    }
    return MultiGraph::from_cell_counts(model.size(), model.directed(), counts);
}

} // namespace ghype
