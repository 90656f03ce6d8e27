#include <benchmark/benchmark.h>

#include <vector>

#include "mrseg/distance_transform.hpp"
#include "mrseg/fusion.hpp"
#include "mrseg/metrics.hpp"
#include "mrseg/mle.hpp"
#include "mrseg/rng.hpp"
#include "mrseg/stats.hpp"

using namespace mrseg;

namespace {

VoxelMask random_mask(std::uint64_t seed, Dims d, double density) {
    const RngStream rng(seed, "bench-mask");
    std::vector<std::uint8_t> data(d.count());
    for (std::size_t i = 0; i < data.size(); ++i)
        data[i] = rng.uniform(i) < density ? 1 : 0;
    return VoxelMask(d, {0.45, 0.45, 3.0}, std::move(data));
}

void bm_distance_transform(benchmark::State& state) {
    const auto n = std::uint32_t(state.range(0));
    const VoxelMask m = random_mask(1, {n, n, n / 4}, 0.05);
    for (auto _ : state) benchmark::DoNotOptimize(distance_transform(m));
    state.SetItemsProcessed(state.iterations() * std::int64_t(m.dims().count()));
}

void bm_score_case(benchmark::State& state) {
    const auto n = std::uint32_t(state.range(0));
    const VoxelMask pred = random_mask(2, {n, n, n / 4}, 0.05);
    const VoxelMask ref = random_mask(3, {n, n, n / 4}, 0.05);
    const MetricConfig cfg;
    for (auto _ : state) benchmark::DoNotOptimize(score_case(pred, ref, cfg));
}

void bm_majority_vote(benchmark::State& state) {
    const auto n = std::uint32_t(state.range(0));
    std::vector<VoxelMask> experts;
    for (std::uint64_t e = 0; e < 3; ++e)
        experts.push_back(random_mask(10 + e, {n, n, n / 4}, 0.2));
    for (auto _ : state) benchmark::DoNotOptimize(majority_vote(experts));
    state.SetItemsProcessed(state.iterations() *
                            std::int64_t(experts[0].dims().count() * experts.size()));
}

void bm_bootstrap_median_ci(benchmark::State& state) {
    const RngStream rng(4, "bench-bootstrap");
    std::vector<double> xs(std::size_t(state.range(0)));
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = rng.uniform(i);
    for (auto _ : state)
        benchmark::DoNotOptimize(bootstrap_median_ci(xs, 1000, 0.95, rng));
}

void bm_wilcoxon_exact(benchmark::State& state) {
    const RngStream rng(5, "bench-wilcoxon");
    const std::size_t n = std::size_t(state.range(0));
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = rng.uniform(2 * i);
        y[i] = rng.uniform(2 * i + 1);
    }
    for (auto _ : state)
        benchmark::DoNotOptimize(wilcoxon_signed_rank_one_sided(x, y));
}

void bm_enumerate_comparison(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(
            enumerate_expert_comparison(0.3, std::size_t(state.range(0))));
}

BENCHMARK(bm_distance_transform)->Arg(32)->Arg(64)->Arg(128);
BENCHMARK(bm_score_case)->Arg(32)->Arg(64);
BENCHMARK(bm_majority_vote)->Arg(64)->Arg(128);
BENCHMARK(bm_bootstrap_median_ci)->Arg(50)->Arg(500);
BENCHMARK(bm_wilcoxon_exact)->Arg(15)->Arg(25)->Arg(100);
BENCHMARK(bm_enumerate_comparison)->Arg(10)->Arg(20);

}  // namespace

BENCHMARK_MAIN();
