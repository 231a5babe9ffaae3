#include <doctest.h>

#include <cmath>
#include <random>

#include "ghype/error.hpp"
#include "ghype/oracle.hpp"
#include "ghype/soft_config.hpp"

using namespace ghype;

namespace {

Matrix<count_t> mat(std::size_t n, std::vector<count_t> v) { return Matrix<count_t>(n, std::move(v)); }

CombinatorialMatrix all_ones() { return CombinatorialMatrix(mat(2, {1, 1, 1, 1}), true); }

CombinatorialMatrix undirected_22() { return combinatorial_matrix(DegreeSequence::undirected({2, 2})); }

double to_double(const oracle::Rational& r) { return r.convert_to<double>(); }

} // namespace

TEST_CASE("SoftConfigModel construction") {
    CHECK_NOTHROW(SoftConfigModel(all_ones(), 4));
    CHECK_THROWS_AS(SoftConfigModel(all_ones(), 5), InfeasibleModelError);
    CHECK_THROWS_AS(SoftConfigModel(all_ones(), -1), InputError);
    const auto g = MultiGraph::from_adjacency(mat(2, {0, 2, 1, 0}), true);
    const auto induced = SoftConfigModel::induced_by(g);
    CHECK(induced.draws() == 3);
    CHECK(induced.xi().xi() == mat(2, {2, 4, 1, 2}));
}

TEST_CASE("log_pmf examples") {
    const SoftConfigModel model(all_ones(), 2);
    const auto reciprocal = MultiGraph::from_adjacency(mat(2, {0, 1, 1, 0}), true);
    CHECK(log_pmf(model, reciprocal) == doctest::Approx(std::log(1.0 / 6.0)).epsilon(1e-15));

    const SoftConfigModel undirected(undirected_22(), 2);
    const auto pair = MultiGraph::from_adjacency(mat(2, {0, 2, 2, 0}), false);
    CHECK(log_pmf(undirected, pair) == doctest::Approx(std::log(28.0 / 120.0)).epsilon(1e-15));

    CHECK(log_pmf(model, MultiGraph::from_adjacency(mat(2, {0, 1, 0, 0}), true)) == kNegInf);
    CHECK(log_pmf(model, MultiGraph::from_adjacency(mat(2, {2, 0, 0, 0}), true)) == kNegInf);
    CHECK_THROWS_AS(log_pmf(model, MultiGraph(3, true)), InputError);
    CHECK_THROWS_AS(log_pmf(model, MultiGraph(2, false)), InputError);
}

TEST_CASE("marginal_pmf examples") {
    const SoftConfigModel model(all_ones(), 2);
    CHECK(marginal_pmf(model, 0, 1, 1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(marginal_pmf(model, 0, 1, 2) == 0.0);
    CHECK(marginal_pmf(model, 0, 1, -1) == 0.0);
    double total = 0.0;
    for (count_t a = 0; a <= 2; ++a) total += marginal_pmf(model, 1, 0, a);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(marginal_pmf(model, 2, 0, 0), InputError);

    const SoftConfigModel undirected(undirected_22(), 2);
    CHECK(marginal_pmf(undirected, 0, 0, 1) == 0.0);
    // Pr(A_00 = 2) = C(4,1) C(12,1) / C(16,2)
    CHECK(marginal_pmf(undirected, 0, 0, 2) == doctest::Approx(48.0 / 120.0).epsilon(1e-14));
    CHECK(marginal_pmf(undirected, 1, 0, 2) == doctest::Approx(28.0 / 120.0).epsilon(1e-14));
}

TEST_CASE("hypergeometric_log_pmf") {
    CHECK(std::exp(hypergeometric_log_pmf(4, 1, 2, 1)) == doctest::Approx(0.5));
    CHECK(hypergeometric_log_pmf(4, 1, 2, 2) == kNegInf);
    CHECK(hypergeometric_log_pmf(10, 8, 5, 2) == kNegInf);  // needs at least 3 marked
    double total = 0.0;
    for (count_t x = 0; x <= 30; ++x) total += std::exp(hypergeometric_log_pmf(1000, 300, 30, x));
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("expected_adjacency") {
    const SoftConfigModel model(all_ones(), 2);
    const auto e = expected_adjacency(model);
    for (double v : e.data()) CHECK(v == doctest::Approx(0.5));

    const SoftConfigModel undirected(undirected_22(), 2);
    const auto u = expected_adjacency(undirected);
    CHECK(u(0, 1) == doctest::Approx(1.0));
    CHECK(u(1, 0) == doctest::Approx(1.0));
    CHECK(u(0, 0) + u(0, 1) == doctest::Approx(2.0));

    // Against the enumeration mean of the same model.
    const auto exact = oracle::central_support_distribution(undirected.xi(), 2);
    double mean_01 = 0.0, mean_00 = 0.0;
    for (const auto& entry : exact.entries) {
        mean_01 += to_double(entry.probability) * static_cast<double>(entry.graph.adjacency(0, 1));
        mean_00 += to_double(entry.probability) * static_cast<double>(entry.graph.adjacency(0, 0));
    }
    CHECK(u(0, 1) == doctest::Approx(mean_01).epsilon(1e-14));
    CHECK(u(0, 0) == doctest::Approx(mean_00).epsilon(1e-14));
}

TEST_CASE("degree preservation in expectation") {
    std::mt19937_64 gen(3);
    for (int t = 0; t < 60; ++t) {
        const bool directed = t % 2 == 0;
        const auto g = oracle::random_graph(gen, 2 + t % 5, 1 + t % 9, directed);
        const auto model = SoftConfigModel::induced_by(g);
        const auto d = degree_sequences(g);
        const auto e = expected_adjacency(model);
        const auto exact = oracle::exact_expected_adjacency(model.xi(), model.draws());
        for (std::size_t i = 0; i < g.vertex_count(); ++i) {
            double row = 0.0, col = 0.0;
            oracle::Rational row_exact = 0, col_exact = 0;
            for (std::size_t j = 0; j < g.vertex_count(); ++j) {
                row += e(i, j);
                col += e(j, i);
                row_exact += exact(i, j);
                col_exact += exact(j, i);
            }
            CHECK(row_exact == d.out_degrees()[i]);
            CHECK(col_exact == d.in_degrees()[i]);
            CHECK(row == doctest::Approx(static_cast<double>(d.out_degrees()[i])).epsilon(1e-12));
            CHECK(col == doctest::Approx(static_cast<double>(d.in_degrees()[i])).epsilon(1e-12));
        }
    }
}

TEST_CASE("normalisation and marginal consistency over enumerated support") {
    std::mt19937_64 gen(11);
    int checked = 0;
    while (checked < 40) {
        const bool directed = checked % 2 == 0;
        std::uniform_int_distribution<std::size_t> pick_n(2, 3);
        std::uniform_int_distribution<count_t> pick_m(1, 6);
        const auto g = oracle::random_graph(gen, pick_n(gen), pick_m(gen), directed);
        const auto model = SoftConfigModel::induced_by(g);
        if (oracle::support_size(model.xi(), model.draws()) > 2000) continue;
        ++checked;
        const auto support = oracle::enumerate_support(model.xi(), model.draws());
        CompensatedSum total;
        for (const auto& s : support) {
            const double lp = log_pmf(model, s);
            CHECK(std::exp(lp) == doctest::Approx(to_double(oracle::exact_central_probability(model.xi(), model.draws(), s)))
                                      .epsilon(1e-12));
            total.add(std::exp(lp));
        }
        CHECK(std::abs(total.value() - 1.0) <= 1e-9);

        for (const auto [i, j] : model.xi().cells()) {
            const count_t unit = (!directed && i == j) ? 2 : 1;
            for (count_t x = 0; x <= model.draws(); ++x) {
                double sum = 0.0;
                for (const auto& s : support)
                    if (s.multiplicity(i, j) == x) sum += std::exp(log_pmf(model, s));
                CHECK(std::abs(marginal_pmf(model, i, j, unit * x) - sum) <= 1e-9);
            }
        }
    }
}

TEST_CASE("directed and undirected models agree through preimages") {
    std::mt19937_64 gen(5);
    for (int t = 0; t < 30; ++t) {
        const auto g = oracle::random_graph(gen, 2 + t % 2, 1 + t % 4, false);
        const auto model = SoftConfigModel::induced_by(g);
        const SoftConfigModel directed(CombinatorialMatrix(model.xi().xi(), true), model.draws());
        for (const auto& s : oracle::enumerate_support(model.xi(), model.draws())) {
            const auto preimages = oracle::directed_preimages(s);
            oracle::Rational exact = 0;
            double floating = 0.0;
            for (const auto& pre : preimages) {
                exact += oracle::exact_central_probability(directed.xi(), model.draws(), pre);
                floating += std::exp(log_pmf(directed, pre));
            }
            CHECK(exact == oracle::exact_central_probability(model.xi(), model.draws(), s));
            CHECK(std::abs(floating - std::exp(log_pmf(model, s))) <= 1e-10);
        }
    }
}

TEST_CASE("sample_hypergeometric matches its pmf") {
    struct Case {
        count_t N, K, n;
    };
    for (const auto& c : {Case{20, 7, 9}, Case{1000, 400, 50}, Case{10'000'000'000, 100'000, 100'000}}) {
        std::mt19937_64 gen(c.N);
        const count_t lo = std::max<count_t>(0, c.n - (c.N - c.K));
        const count_t hi = std::min(c.K, c.n);
        // Bins over the central range; tails pooled by the test.
        const double mean = static_cast<double>(c.n) * static_cast<double>(c.K) / static_cast<double>(c.N);
        const count_t from = std::max(lo, static_cast<count_t>(mean - 60));
        const count_t to = std::min(hi, static_cast<count_t>(mean + 60));
        std::vector<std::uint64_t> counts(static_cast<std::size_t>(to - from + 3), 0);
        std::vector<double> probs(counts.size(), 0.0);
        for (count_t x = lo; x <= hi; ++x) {
            const std::size_t bin = x < from ? 0 : x > to ? counts.size() - 1 : static_cast<std::size_t>(x - from + 1);
            probs[bin] += std::exp(hypergeometric_log_pmf(c.N, c.K, c.n, x));
        }
        for (int s = 0; s < 50000; ++s) {
            const count_t x = sample_hypergeometric(gen, c.N, c.K, c.n);
            REQUIRE(x >= lo);
            REQUIRE(x <= hi);
            ++counts[x < from ? 0 : x > to ? counts.size() - 1 : static_cast<std::size_t>(x - from + 1)];
        }
        CAPTURE(c.N);
        CHECK(oracle::chi_square_goodness_of_fit(counts, probs).p_value > 0.001);
    }
    std::mt19937_64 gen(1);
    CHECK(sample_hypergeometric(gen, 10, 10, 4) == 4);
    CHECK(sample_hypergeometric(gen, 10, 0, 4) == 0);
    CHECK(sample_hypergeometric(gen, 10, 7, 10) == 7);
}

TEST_CASE("sample reproduces the exact PMF") {
    const SoftConfigModel model(all_ones(), 2);
    const auto exact = oracle::central_support_distribution(model.xi(), 2);
    REQUIRE(exact.entries.size() == 6);
    oracle::UrnHistogram hist{2, true, 0, {}};
    for (std::uint64_t s = 0; s < 100000; ++s) ++hist.counts[oracle::cell_counts(sample(model, s))];
    std::vector<double> probs;
    for (const auto& e : exact.entries) probs.push_back(to_double(e.probability));
    CHECK(oracle::chi_square_goodness_of_fit(oracle::histogram_counts(hist, exact), probs).p_value > 0.001);
}

TEST_CASE("sample saturates and is deterministic") {
    const auto xi = combinatorial_matrix(DegreeSequence::undirected({2, 1, 1}));
    const SoftConfigModel full(xi, xi.total());
    const auto g = sample(full, 9);
    for (const auto [i, j] : xi.cells()) CHECK(g.multiplicity(i, j) == xi.ball_count(i, j));

    const SoftConfigModel model(xi, 5);
    CHECK(sample(model, 123) == sample(model, 123));
    CHECK(sample(model, 123).edge_count() == 5);
}

TEST_CASE("empirical means within 4 standard errors") {
    const auto g = MultiGraph::from_adjacency(mat(3, {2, 1, 1, 1, 4, 3, 1, 3, 2}), false);
    const auto model = SoftConfigModel::induced_by(g);
    const auto expected = expected_adjacency(model);
    const std::size_t n = 3;
    const int samples = 100000;
    Matrix<double> sum(n, 0.0), sum_sq(n, 0.0);
    for (int s = 0; s < samples; ++s) {
        const auto x = sample(model, static_cast<std::uint64_t>(s));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                const auto a = static_cast<double>(x.adjacency(i, j));
                sum(i, j) += a;
                sum_sq(i, j) += a * a;
            }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double mean = sum(i, j) / samples;
            const double var = sum_sq(i, j) / samples - mean * mean;
            const double se = std::sqrt(var / samples);
            CAPTURE(i);
            CAPTURE(j);
            CHECK(std::abs(mean - expected(i, j)) <= 4.0 * se + 1e-12);
        }
}

TEST_CASE("first-draw odds follow the stub counts") {
    // Vertex 0 has one out-stub; vertices 1, 2, 3 have 3, 2, 1 in-stubs.
    const std::vector<count_t> out{1, 0, 0, 0}, in{0, 3, 2, 1};
    const SoftConfigModel model(CombinatorialMatrix::from_stub_counts(out, in), 1);
    const double to_b = marginal_pmf(model, 0, 1, 1);
    const double to_c = marginal_pmf(model, 0, 2, 1);
    const double to_d = marginal_pmf(model, 0, 3, 1);
    CHECK(to_b / to_d == doctest::Approx(3.0));
    CHECK(to_b / to_c == doctest::Approx(1.5));
}
