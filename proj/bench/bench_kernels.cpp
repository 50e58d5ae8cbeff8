// Serial reference kernels against their OpenMP counterparts.
//
//   ./bench_kernels --benchmark_filter=Geometry
//
// Thread count follows OMP_NUM_THREADS (or MCF_THREADS when set).

#include "mcflow/exact.hpp"
#include "mcflow/exec.hpp"
#include "mcflow/flow.hpp"
#include "mcflow/geometry.hpp"
#include "mcflow/verify.hpp"

#include <benchmark/benchmark.h>

#include <cstdlib>

namespace {

mcf::DiscreteImmersion sphere(int n_lat, int k)
{
    mcf::SolutionSpec s;
    s.kind = mcf::SolutionKind::Sphere;
    s.k = k;
    s.perturbation = {0.05, 2};
    return mcf::seed_immersion(s, mcf::ParamGrid::lat_long(n_lat, 2 * n_lat), 0);
}

mcf::Exec exec_of(const benchmark::State& state) { return state.range(1) ? mcf::Exec::Parallel : mcf::Exec::Serial; }

void set_labels(benchmark::State& state)
{
    state.SetLabel(state.range(1) ? "omp" : "serial");
    state.SetItemsProcessed(state.iterations() * 2L * state.range(0) * state.range(0));
}

void BM_GeometryField(benchmark::State& state)
{
    const auto im = sphere(static_cast<int>(state.range(0)), 2);
    const bool par = state.range(1) != 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(par ? mcf::omp::geometry_field(im) : mcf::serial::geometry_field(im));
    set_labels(state);
}

void BM_Velocity(benchmark::State& state)
{
    const auto im = sphere(static_cast<int>(state.range(0)), 2);
    const mcf::PolarFilter filter(im.grid);
    for (auto _ : state)
        benchmark::DoNotOptimize(mcf::velocity(im, &filter, exec_of(state)));
    set_labels(state);
}

void BM_RK4Step(benchmark::State& state)
{
    const auto im = sphere(static_cast<int>(state.range(0)), 1);
    const mcf::PolarFilter filter(im.grid);
    const double dt = mcf::cfl_dt(im, 0.2);
    for (auto _ : state)
        benchmark::DoNotOptimize(mcf::step(im, dt, mcf::Integrator::RK4, &filter, exec_of(state)));
    set_labels(state);
}

void BM_CovariantGradients(benchmark::State& state)
{
    const auto im = sphere(static_cast<int>(state.range(0)), 1);
    for (auto _ : state)
        benchmark::DoNotOptimize(mcf::covariant_gradient_field(im, exec_of(state)));
    set_labels(state);
}

void BM_ReactionSuite(benchmark::State& state)
{
    mcf::VerifyOptions opt;
    opt.samples = state.range(0);
    opt.exec = exec_of(state);
    for (auto _ : state)
        benchmark::DoNotOptimize(mcf::run_suite("reaction", opt));
    state.SetLabel(state.range(1) ? "omp" : "serial");
}

void grid_args(benchmark::internal::Benchmark* b)
{
    for (int n : {32, 64, 128})
        for (int par : {0, 1})
            b->Args({n, par});
    b->Unit(benchmark::kMillisecond);
}

}  // namespace

BENCHMARK(BM_GeometryField)->Apply(grid_args);
BENCHMARK(BM_Velocity)->Apply(grid_args);
BENCHMARK(BM_RK4Step)->Apply(grid_args);
BENCHMARK(BM_CovariantGradients)->Apply(grid_args);
BENCHMARK(BM_ReactionSuite)->Args({2000, 0})->Args({2000, 1})->Unit(benchmark::kMillisecond);

int main(int argc, char** argv)
{
    if (const char* t = std::getenv("MCF_THREADS"))
        mcf::set_thread_count(std::atoi(t));
    benchmark::Initialize(&argc, argv);
    if (benchmark::ReportUnrecognizedArguments(argc, argv))
        return 1;
    benchmark::RunSpecifiedBenchmarks();
    benchmark::Shutdown();
    return 0;
}
