#include <doctest.h>

#include <random>
#include <vector>

#include "ghype/error.hpp"
#include "ghype/oracle.hpp"
#include "ghype/sampling_tree.hpp"

using namespace ghype;

TEST_CASE("find maps cumulative intervals to items") {
    const std::vector<double> w{1.0, 0.0, 2.0, 3.0, 0.0};
    SamplingTree tree(w);
    CHECK(tree.size() == 5);
    CHECK(tree.total() == 6.0);
    CHECK(tree.find(0.0) == 0);
    CHECK(tree.find(0.999) == 0);
    CHECK(tree.find(1.0) == 2);
    CHECK(tree.find(2.999) == 2);
    CHECK(tree.find(3.0) == 3);
    CHECK(tree.find(5.999) == 3);
    // Targets at or past the total land on the last positive item.
    CHECK(tree.find(6.0) == 3);
    CHECK(tree.find(1e9) == 3);
}

TEST_CASE("set updates sums and never returns empty items") {
    const std::vector<double> w{1.0, 1.0, 1.0};
    SamplingTree tree(w);
    tree.set(1, 0.0);
    CHECK(tree.total() == 2.0);
    CHECK(tree.weight(1) == 0.0);
    std::mt19937_64 gen(1);
    for (int s = 0; s < 1000; ++s) CHECK(tree.sample(gen) != 1);
    tree.set(0, 0.0);
    tree.set(2, 0.0);
    CHECK(tree.total() == 0.0);
    tree.set(1, 5.0);
    CHECK(tree.find(2.5) == 1);
    CHECK_THROWS_AS(tree.set(3, 1.0), InputError);
    CHECK_THROWS_AS(tree.set(0, -1.0), InputError);
}

TEST_CASE("sums are exact after many updates") {
    std::vector<double> w(1000, 0.1);
    SamplingTree tree(w);
    std::mt19937_64 gen(2);
    std::uniform_int_distribution<std::size_t> pick(0, 999);
    for (int k = 0; k < 100000; ++k) tree.set(pick(gen), 0.1 * static_cast<double>(k % 7));
    for (std::size_t i = 0; i < 1000; ++i) tree.set(i, 1.0);
    CHECK(tree.total() == 1000.0);
}

TEST_CASE("sampling frequencies are proportional to weights") {
    const std::vector<double> w{0.5, 3.0, 1.5, 0.0, 5.0, 2.0, 0.25};
    SamplingTree tree(w);
    std::mt19937_64 gen(3);
    std::vector<std::uint64_t> counts(w.size(), 0);
    for (int s = 0; s < 200000; ++s) ++counts[tree.sample(gen)];
    std::vector<double> p;
    for (double x : w) p.push_back(x / tree.total());
    CHECK(counts[3] == 0);
    CHECK(oracle::chi_square_goodness_of_fit(counts, p).p_value > 0.001);
}

TEST_CASE("single item and empty input") {
    const std::vector<double> one{4.0};
    SamplingTree tree(one);
    std::mt19937_64 gen(4);
    CHECK(tree.sample(gen) == 0);
    const SamplingTree empty(std::vector<double>{});
    CHECK(empty.total() == 0.0);
    CHECK_THROWS_AS(empty.find(0.0), InputError);
    CHECK_THROWS_AS(SamplingTree(std::vector<double>{1.0, -0.5}), InputError);
}
