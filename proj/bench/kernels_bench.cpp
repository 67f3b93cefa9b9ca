// Serial reference vs OpenMP kernels: dense GEMM and forest training.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "latentwire/forest/forest.hpp"
#include "latentwire/nn/kernels.hpp"

using namespace latentwire;

namespace {

std::vector<float> random_floats(std::size_t n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<float> u(-1.0f, 1.0f);
    std::vector<float> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

std::vector<data::FeatureVector> random_records(std::size_t n, std::size_t dim) {
    std::mt19937 rng(7);
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    std::vector<data::FeatureVector> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i].record_id = i;
        out[i].features.resize(dim);
        for (auto& x : out[i].features) x = u(rng);
        out[i].label = out[i].features[0] + out[i].features[1] > 1.0f ? 1 : 0;
    }
    return out;
}

// Batch 256 through a 180 -> 110 layer, the widest shape the encoder uses.
template <bool Parallel>
void BM_GemmNN(benchmark::State& state) {
    const std::size_t m = 256, k = static_cast<std::size_t>(state.range(0)), n = static_cast<std::size_t>(state.range(1));
    auto a = random_floats(m * k, 1), b = random_floats(k * n, 2);
    std::vector<float> c(m * n);
    for (auto _ : state) {
        if constexpr (Parallel)
            nn::kernels::parallel::gemm_nn(m, n, k, a.data(), k, b.data(), n, c.data(), n, false);
        else
            nn::kernels::serial::gemm_nn(m, n, k, a.data(), k, b.data(), n, c.data(), n, false);
        benchmark::DoNotOptimize(c.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * m * n * k));
}

template <bool Parallel>
void BM_GemmTN(benchmark::State& state) {
    const std::size_t m = 256, k = static_cast<std::size_t>(state.range(0)), n = static_cast<std::size_t>(state.range(1));
    auto a = random_floats(m * k, 3), b = random_floats(m * n, 4);
    std::vector<float> c(k * n);
    for (auto _ : state) {
        if constexpr (Parallel)
            nn::kernels::parallel::gemm_tn(m, n, k, a.data(), k, b.data(), n, c.data(), n);
        else
            nn::kernels::serial::gemm_tn(m, n, k, a.data(), k, b.data(), n, c.data(), n);
        benchmark::DoNotOptimize(c.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * m * n * k));
}

template <bool Parallel>
void BM_TrainForest(benchmark::State& state) {
    const auto records = random_records(5000, static_cast<std::size_t>(state.range(0)));
    forest::ForestConfig cfg;
    cfg.n_trees = 20;
    cfg.seed = 11;
    for (auto _ : state) {
        auto f = Parallel ? forest::train_forest(records, cfg) : forest::train_forest_serial(records, cfg);
        benchmark::DoNotOptimize(f.model.trees.data());
    }
}

}  // namespace

BENCHMARK(BM_GemmNN<false>)->Args({110, 180})->Args({42, 3})->Args({440, 720});
BENCHMARK(BM_GemmNN<true>)->Args({110, 180})->Args({42, 3})->Args({440, 720});
BENCHMARK(BM_GemmTN<false>)->Args({110, 180})->Args({440, 720});
BENCHMARK(BM_GemmTN<true>)->Args({110, 180})->Args({440, 720});
BENCHMARK(BM_TrainForest<false>)->Arg(3)->Arg(42)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrainForest<true>)->Arg(3)->Arg(42)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
