#include <benchmark/benchmark.h>

#include "heavytail/free_prob.hpp"
#include "heavytail/quadrature.hpp"
#include "heavytail/rv_core.hpp"
#include "heavytail/tail_models.hpp"

namespace {

void bm_gk15_integrate(benchmark::State& state) {
    for (auto _ : state) {
        const double v = heavytail::integrate(
            [](double t) { return std::exp(-t) * std::cos(t); }, 0.0, 50.0);
        benchmark::DoNotOptimize(v);
    }
}
BENCHMARK(bm_gk15_integrate);

void bm_cauchy_transform_pareto(benchmark::State& state) {
    const auto mu = heavytail::make_pareto_spectral(1.5);
    const heavytail::cplx z(0.3, static_cast<double>(state.range(0)));
    for (auto _ : state) {
        const auto g = heavytail::cauchy_transform(mu, z);
        benchmark::DoNotOptimize(g);
    }
}
BENCHMARK(bm_cauchy_transform_pareto)->Arg(10)->Arg(1000);

void bm_remainder_rG(benchmark::State& state) {
    const auto mu = heavytail::make_pareto_spectral(1.5);
    for (auto _ : state) {
        const auto r = heavytail::remainder_rG(mu, 1, heavytail::cplx(0.0, 100.0));
        benchmark::DoNotOptimize(r.value);
    }
}
BENCHMARK(bm_remainder_rG);

void bm_subordination_point(benchmark::State& state) {
    const auto mu = heavytail::make_semicircle(1.0);
    const auto f = heavytail::convolve_f_handles(heavytail::f_handle(mu),
                                                 heavytail::f_handle(mu));
    for (auto _ : state) {
        const auto v = f(heavytail::cplx(0.5, 1e-3));
        benchmark::DoNotOptimize(v);
    }
}
BENCHMARK(bm_subordination_point);

void bm_hill_estimate(benchmark::State& state) {
    heavytail::Rng rng(7);
    std::vector<double> sample(100000);
    for (auto& s : sample) s = rng.pareto(1.5);
    for (auto _ : state) {
        auto est = heavytail::hill_estimate(sample, 1000);
        benchmark::DoNotOptimize(est.alpha_hat);
    }
}
BENCHMARK(bm_hill_estimate);

}  // namespace

BENCHMARK_MAIN();
