#include <benchmark/benchmark.h>

#include "recurlab/dyadic.hpp"
#include "recurlab/limitlaw.hpp"
#include "recurlab/recurrence.hpp"

using namespace recurlab;

namespace
{
void doubling_fast_path(benchmark::State& state)
{
    auto n = state.range(0);
    auto engine = make_sample_engine(1, 0);
    auto stream = DyadicStream::random(engine, static_cast<std::size_t>(n + 64));
    RecurrenceRequest request;
    request.radii = {0.25 / n, 0.5 / n, 1.0 / n};
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(observe_recurrence(stream, n, request));
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(doubling_fast_path)->Arg(1024)->Arg(4096)->Arg(65536);

void bigfixed_orbit(benchmark::State& state, MapModel const& map)
{
    std::int64_t n = state.range(0);
    PrecisionPolicy policy;
    BigReal x0(starting_bits(map, n, policy));
    auto engine = make_sample_engine(7, 0);
    sample_invariant(x0, map, engine);
    std::vector<double> radii{0.5 / static_cast<double>(n)};
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(recurrence_count(map, x0, n, radii, policy));
    }
    state.SetItemsProcessed(state.iterations() * n);
}

void golden_beta_orbit(benchmark::State& state)
{
    bigfixed_orbit(state, MapModel::golden_beta());
}
BENCHMARK(golden_beta_orbit)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

void cusp_orbit(benchmark::State& state)
{
    bigfixed_orbit(state, MapModel::cusp());
}
BENCHMARK(cusp_orbit)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

void cusp_quadrature(benchmark::State& state)
{
    auto cusp = MapModel::cusp();
    int k = static_cast<int>(state.range(0));
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(poisson_like_pmf(cusp.density(), 2.0, k));
    }
}
BENCHMARK(cusp_quadrature)->Arg(0)->Arg(8);

void logistic_quadrature(benchmark::State& state)
{
    auto logistic = MapModel::logistic();
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(poisson_like_pmf(logistic.density(), 1.0, 2));
    }
}
BENCHMARK(logistic_quadrature);

}  // namespace
BENCHMARK_MAIN();
