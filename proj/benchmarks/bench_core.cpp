#include <benchmark/benchmark.h>

#include <pqk/error_bounds.hpp>
#include <pqk/pq_integral.hpp>
#include <pqk/szasz_kantorovich.hpp>

#include <cmath>

namespace {

const pqk::PQParams kParams = pqk::PQParams::make(0.95, 0.9);

void BM_pq_integer_sum_path(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(pqk::pq_integer(40, kParams));
    }
}
BENCHMARK(BM_pq_integer_sum_path);

void BM_pq_integer_closed_path(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(pqk::pq_integer(500, kParams));
    }
}
BENCHMARK(BM_pq_integer_closed_path);

void BM_pq_exponential(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            pqk::pq_exponential(2.0, pqk::ExponentialKind::big_E, kParams));
    }
}
BENCHMARK(BM_pq_exponential);

void BM_jackson_monomial(benchmark::State& state) {
    const auto f = [](double t) { return t * t; };
    for (auto _ : state) {
        benchmark::DoNotOptimize(pqk::pq_integral_from_zero(f, 1.0, kParams));
    }
}
BENCHMARK(BM_jackson_monomial);

void BM_apply(benchmark::State& state) {
    const auto f = [](double t) { return std::exp(-t); };
    const auto n = state.range(0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(pqk::apply(f, n, kParams, 1.0));
    }
}
BENCHMARK(BM_apply)->Arg(5)->Arg(20)->Arg(100);

void BM_moment_closed_form(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(pqk::moment_closed_form(2, 50, kParams, 1.0));
    }
}
BENCHMARK(BM_moment_closed_form);

void BM_modulus_of_continuity(benchmark::State& state) {
    const auto f = [](double t) { return t * t; };
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            pqk::modulus_of_continuity(f, 0.1, 2.0, 1.0 / 512.0));
    }
}
BENCHMARK(BM_modulus_of_continuity);

}  // namespace

BENCHMARK_MAIN();
