#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "ghype/numeric.hpp"
#include "ghype/sampling_tree.hpp"
#include "ghype/soft_config.hpp"
#include "ghype/wallenius.hpp"

using namespace ghype;

namespace {

// Degrees summing to m with every vertex present, so Xi is dense.
std::vector<count_t> spread_degrees(std::mt19937_64& gen, std::size_t n, count_t m) {
    std::vector<count_t> k(n, 1);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (count_t e = static_cast<count_t>(n); e < m; ++e) ++k[pick(gen)];
    return k;
}

GHypEModel dense_model(std::size_t n, count_t m) {
    std::mt19937_64 gen(42);
    const auto k_out = spread_degrees(gen, n, m);
    const auto k_in = spread_degrees(gen, n, m);
    std::uniform_real_distribution<double> draw(0.1, 10.0);
    Matrix<double> omega(n);
    for (auto& w : omega.data()) w = draw(gen);
    return GHypEModel(CombinatorialMatrix::from_stub_counts(k_out, k_in), PropensityMatrix(std::move(omega), true),
                      m);
}

} // namespace

static void BM_SampleGHypE(benchmark::State& state) {
    const auto model = dense_model(static_cast<std::size_t>(state.range(0)), state.range(1));
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(sample_ghype(model, ++seed));
    state.SetItemsProcessed(state.iterations() * model.draws());
}
BENCHMARK(BM_SampleGHypE)->Args({200, 10'000})->Args({2000, 100'000})->Unit(benchmark::kMillisecond);

static void BM_LogPmfWallenius(benchmark::State& state) {
    const auto model = dense_model(static_cast<std::size_t>(state.range(0)), state.range(1));
    const auto g = sample_ghype(model, 1);
    QuadratureConfig cfg;
    cfg.rel_tol = 1e-10;
    for (auto _ : state) benchmark::DoNotOptimize(log_pmf_wallenius(model, g, cfg));
}
BENCHMARK(BM_LogPmfWallenius)->Args({200, 10'000})->Args({2000, 100'000})->Unit(benchmark::kMillisecond);

static void BM_SampleSoftConfig(benchmark::State& state) {
    const auto model = dense_model(static_cast<std::size_t>(state.range(0)), state.range(1));
    const SoftConfigModel uniform(model.xi(), model.draws());
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(sample(uniform, ++seed));
}
BENCHMARK(BM_SampleSoftConfig)->Args({200, 10'000})->Args({2000, 100'000})->Unit(benchmark::kMillisecond);

static void BM_SamplingTreeUpdate(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::vector<double> weights(n, 1.0);
    SamplingTree tree(weights);
    std::mt19937_64 gen(7);
    for (auto _ : state) {
        const std::size_t c = tree.sample(gen);
        tree.set(c, 1.0);
        benchmark::DoNotOptimize(c);
    }
}
BENCHMARK(BM_SamplingTreeUpdate)->Range(1 << 10, 1 << 22);

static void BM_LogBinomial(benchmark::State& state) {
    std::int64_t n = state.range(0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(log_binomial(n, n / 3));
        ++n;
    }
}
BENCHMARK(BM_LogBinomial)->Arg(100)->Arg(1'000'000'000);
BENCHMARK_MAIN();
