// Parallel kernels against their serial references. With one worker the two
// should cost the same; the gap grows with OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include "valprod/kinematics.hpp"
#include "valprod/product.hpp"

using namespace valprod;

namespace
{
PlanarBody const& pentagon()
{
    static PlanarBody const p = PlanarBody::polygon(
        {{1, 0}, {0.31, 0.95}, {-0.81, 0.59}, {-0.81, -0.59}, {0.31, -0.95}});
    return p;
}

product::TemplateOptions template_options(benchmark::State const& state)
{
    product::TemplateOptions o;
    o.points = static_cast<std::size_t>(state.range(0));
    return o;
}

void node_moments_parallel(benchmark::State& state)
{
    auto const o = template_options(state);
    for (auto _ : state)
        benchmark::DoNotOptimize(product::node_moments(pentagon(), 1.0, o));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void node_moments_serial(benchmark::State& state)
{
    auto const o = template_options(state);
    for (auto _ : state)
        benchmark::DoNotOptimize(product::node_moments_serial(pentagon(), 1.0, o));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void sphere_integral(benchmark::State& state, bool parallel)
{
    auto const a = sphere::SphericalBody::cap({0, 0, 1}, 0.6);
    auto const b = sphere::SphericalBody::cap({1, 0, 0}, 0.9);
    kinematics::McOptions o;
    o.samples = static_cast<std::size_t>(state.range(0));
    o.parallel = parallel;
    for (auto _ : state)
        benchmark::DoNotOptimize(kinematics::sphere_basis_integral(a, b, o));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void plane_integral(benchmark::State& state, bool parallel)
{
    kinematics::McOptions o;
    o.samples = static_cast<std::size_t>(state.range(0));
    o.parallel = parallel;
    PlanarBody const d = PlanarBody::disk(Vec2(0.2, 0), 0.7);
    for (auto _ : state)
        benchmark::DoNotOptimize(kinematics::plane_basis_integral(pentagon(), d, o));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(node_moments_parallel)->Arg(1 << 16)->Unit(benchmark::kMillisecond);
BENCHMARK(node_moments_serial)->Arg(1 << 16)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(sphere_integral, parallel, true)->Arg(1 << 15)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(sphere_integral, serial, false)->Arg(1 << 15)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(plane_integral, parallel, true)->Arg(1 << 14)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(plane_integral, serial, false)->Arg(1 << 14)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
