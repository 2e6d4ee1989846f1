#include "holmes/analysis.hpp"
#include "holmes/collocation.hpp"
#include "holmes/maxent.hpp"
#include "holmes/problems.hpp"

#include <benchmark/benchmark.h>

using namespace holmes;

namespace {

StudySettings settings(int n) {
    StudySettings s;
    s.n = n;
    s.R_hat = n + 2;
    return s;
}

// Basis and derivatives at one interior point of the unit disk.
void BM_BasisDisk(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto prob = make_problem("helm2d-circle");
    const NodeSet ns = make_grid(prob, 0.05, settings(n));
    const auto hp = holmes_params(n, 2, n + 2, 1e-11, ns.h());
    const Point x(0.213, -0.147, 0);
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_basis(ns, x, hp, 2));
}
BENCHMARK(BM_BasisDisk)->Arg(2)->Arg(3)->Arg(4);

void BM_BasisBall(benchmark::State& state) {
    const auto prob = make_problem("helm3d-sphere");
    const NodeSet ns = make_grid(prob, 0.13, settings(2));
    const auto hp = holmes_params(2, 2, 4, 1e-11, ns.h());
    const Point x(0.11, -0.07, 0.23);
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_basis(ns, x, hp, 2));
}
BENCHMARK(BM_BasisBall);

void BM_AssembleCircle(benchmark::State& state) {
    const auto prob = make_problem("helm2d-circle");
    const NodeSet ns = make_grid(prob, 1.0 / static_cast<double>(state.range(0)), settings(2));
    const auto hp = holmes_params(2, 2, 4, 1e-11, ns.h());
    for (auto _ : state) benchmark::DoNotOptimize(assemble(prob, ns, hp));
    state.counters["nodes"] = static_cast<double>(ns.size());
}
BENCHMARK(BM_AssembleCircle)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_SolveCircle(benchmark::State& state) {
    const auto prob = make_problem("helm2d-circle");
    const NodeSet ns = make_grid(prob, 1.0 / static_cast<double>(state.range(0)), settings(2));
    const auto sys = assemble(prob, ns, holmes_params(2, 2, 4, 1e-11, ns.h()));
    for (auto _ : state) benchmark::DoNotOptimize(solve_system(sys));
    state.counters["nodes"] = static_cast<double>(ns.size());
}
BENCHMARK(BM_SolveCircle)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
