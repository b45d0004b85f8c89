#include <benchmark/benchmark.h>

#include "kambeam/divisors.hpp"
#include "kambeam/homological.hpp"
#include "kambeam/lattice.hpp"
#include "kambeam/sampling.hpp"
#include "kambeam/simulator.hpp"

using namespace kambeam;

namespace {

const std::vector<Site> kS{{1, 0}, {3, 2}};

Series bench_series(std::uint64_t seed) {
    const std::vector<Site> modes{{-1, 0}, {1, 2}, {3, 0}, {-3, 2}, {5, 4}};
    PerturbationConfig cfg;
    cfg.K = 3;
    cfg.cubic_k_max = 1;
    cfg.scale = 1.0;
    cfg.seed = seed;
    return random_perturbation(kS, modes, cfg);
}

void BM_PoissonBracket(benchmark::State& state) {
    const auto F = bench_series(1);
    const auto G = bench_series(2);
    for (auto _ : state) benchmark::DoNotOptimize(poisson_bracket(F, G));
    state.counters["terms"] = static_cast<double>(F.size());
}
BENCHMARK(BM_PoissonBracket);

void cubic_bench(benchmark::State& state, ConvolutionMethod method) {
    Galerkin g(mode_window(static_cast<double>(state.range(0))), 1.0, method);
    Rng rng(3);
    std::vector<cplx> q(g.size()), out(g.size());
    for (auto& z : q) z = {rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1)};
    for (auto _ : state) {
        g.cubic(q, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.counters["modes"] = static_cast<double>(g.size());
}
void BM_CubicDirect(benchmark::State& state) { cubic_bench(state, ConvolutionMethod::Direct); }
void BM_CubicFFT(benchmark::State& state) { cubic_bench(state, ConvolutionMethod::FFT); }
BENCHMARK(BM_CubicDirect)->Arg(5)->Arg(8)->Arg(12);
BENCHMARK(BM_CubicFFT)->Arg(5)->Arg(8)->Arg(12)->Arg(20);

void BM_Classify(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(classify_resonances<std::int64_t>(kS, state.range(0)));
}
BENCHMARK(BM_Classify)->Arg(20)->Arg(50);

void BM_KronDet(benchmark::State& state) {
    Rng rng(5);
    std::vector<Mat2<double>> mats(256);
    for (auto& m : mats) m = {rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(kron_shift_det(mats[i & 255], mats[(i + 1) & 255], Sign::Minus, 0.5));
        ++i;
    }
}
BENCHMARK(BM_KronDet);

void BM_Measure(benchmark::State& state) {
    MeasureConfig cfg;
    cfg.S = kS;
    cfg.box = Box{{0.5, 0.5}, {1.5, 1.5}};
    cfg.K = 6;
    cfg.window = 15;
    cfg.samples = 200;
    for (auto _ : state) benchmark::DoNotOptimize(estimate_excluded_measure(cfg));
}
BENCHMARK(BM_Measure)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
