#include <benchmark/benchmark.h>

#include <random>

#include "trajgan/codec.hpp"
#include "trajgan/layers.hpp"
#include "trajgan/metrics.hpp"
#include "trajgan/tensor.hpp"

using namespace trajgan;

namespace {

PointSet random_points(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    PointSet p(n);
    for (auto& q : p) q = {u01(rng), u01(rng)};
    return p;
}

Trajectory random_trajectory(std::uint64_t seed, int len) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ula(kFsNycBBox.lat_min,
                                               kFsNycBBox.lat_max);
    std::uniform_real_distribution<double> ulo(kFsNycBBox.lon_min,
                                               kFsNycBBox.lon_max);
    std::uniform_int_distribution<int> ud(0, 6), uh(0, 23);
    Trajectory t;
    for (int i = 0; i < len; ++i)
        t.points.push_back({ula(rng), ulo(rng), ud(rng), uh(rng)});
    return t;
}

void bm_hausdorff(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    PointSet a = random_points(n, 1), b = random_points(n, 2);
    for (auto _ : state) benchmark::DoNotOptimize(hausdorff(a, b));
    state.SetComplexityN(state.range(0));
}

void bm_sliced_wasserstein(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    PointSet a = random_points(n, 3), b = random_points(n, 4);
    for (auto _ : state)
        benchmark::DoNotOptimize(sliced_wasserstein(a, b, 100, 7));
    state.SetComplexityN(state.range(0));
}

void bm_codec_round_trip(benchmark::State& state) {
    const auto spec = NormalizationSpec::from_bbox(kFsNycBBox);
    Trajectory t = random_trajectory(5, 144);
    for (auto _ : state) {
        Trajectory back = decode(downsample(upsample(encode(t, spec, 144))),
                                 spec, 144, t.id);
        benchmark::DoNotOptimize(back);
    }
}

void bm_conv_forward(benchmark::State& state) {
    const int b = static_cast<int>(state.range(0));
    nn::Conv2d<float> conv(4, 64, 3, 1, 0);
    nn::Tensor<float> x({b, 4, 24, 24});
    nn::Rng rng(11);
    rng.fill_normal(x, 1.0);
    std::vector<nn::Param<float>*> ps;
    conv.collect(ps);
    for (auto* p : ps) rng.fill_normal(p->value, 0.02);
    for (auto _ : state) benchmark::DoNotOptimize(conv.forward(x, false));
    state.SetItemsProcessed(state.iterations() * b);
}

BENCHMARK(bm_hausdorff)->Range(64, 4096)->Complexity();
BENCHMARK(bm_sliced_wasserstein)->Range(64, 4096)->Complexity();
BENCHMARK(bm_codec_round_trip);
BENCHMARK(bm_conv_forward)->Arg(1)->Arg(16)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
