// Serial reference vs OpenMP kernels.
#include "morreylab/fields.hpp"
#include "morreylab/norms.hpp"
#include "morreylab/quadrature.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace morreylab;

namespace {

ExecPolicy policy_of(const benchmark::State& st) { return st.range(0) ? ExecPolicy::parallel : ExecPolicy::serial; }

void BM_IntegrateBox(benchmark::State& st) {
    const PointFn f = [](std::span<const double> x) { return std::pow(x[0] * x[0] + x[1] * x[1] + 1e-4, -0.7); };
    QuadratureOptions o;
    o.rel_tol = 1e-10;
    o.policy = policy_of(st);
    const Box box{{-1, -1}, {1, 1}};
    for (auto _ : st) benchmark::DoNotOptimize(integrate_box(f, box, std::nullopt, o).value);
}

void BM_TripleSearchTalenti(benchmark::State& st) {
    const auto P = derive(3, 1.5, 2.5, std::nullopt, 0.3);
    const auto f = make_field("talenti", P);
    SearchOptions o;
    o.policy = policy_of(st);
    for (auto _ : st) benchmark::DoNotOptimize(triple_norm(f, P, o).power_value);
}

void BM_TripleSearchFractal(benchmark::State& st) {
    const auto P = derive(2, 1.2, 1.5, 6.3, 1.5 / 6.3);
    const auto f = counterexample_fractal(P);
    SearchOptions o;
    o.generations = 10;
    o.audit_points = 0;
    o.policy = policy_of(st);
    for (auto _ : st) benchmark::DoNotOptimize(triple_norm(f, P, o).power_value);
}

} // namespace

BENCHMARK(BM_IntegrateBox)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TripleSearchTalenti)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TripleSearchFractal)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond)->Iterations(1);

BENCHMARK_MAIN();
