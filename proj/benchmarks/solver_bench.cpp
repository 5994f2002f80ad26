#include <benchmark/benchmark.h>

#include "kdvduo/hum.hpp"
#include "kdvduo/solver.hpp"
#include "kdvduo/time_sobolev.hpp"

namespace {

using namespace kdvduo;

ValidatedParams bench_params() {
    SystemParams sp;
    sp.a = 0.5;
    sp.b = 1.0;
    sp.c = 1.0;
    sp.r = 1.0;
    return validate_params(sp);
}

void BM_ForwardSolve(benchmark::State& state) {
    const ValidatedParams p = bench_params();
    const Grid g(1.0, 1.0, static_cast<int>(state.range(0)), 500);
    LinearSolver solver(p, g);
    StatePair init = StatePair::zero(g.nx);
    for (int i = 0; i < g.nx; ++i) init.u[i] = std::sin(3.14159 * g.x(i));
    const BoundaryData bd = BoundaryData::zero(g.nt);
    for (auto _ : state) {
        benchmark::DoNotOptimize(solver.forward(init, bd));
    }
    state.counters["steps"] = static_cast<double>(g.nt);
}
BENCHMARK(BM_ForwardSolve)->Arg(101)->Arg(201)->Arg(401);

void BM_GramianApply(benchmark::State& state) {
    const ValidatedParams p = bench_params();
    const Grid g(1.0, 2.0, 101, static_cast<int>(state.range(0)));
    GramianOperator gram(p, g, ControlConfig::four());
    StatePair z = StatePair::zero(g.nx);
    for (int i = 0; i < g.nx; ++i) z.u[i] = std::sin(3.14159 * g.x(i));
    for (auto _ : state) {
        benchmark::DoNotOptimize(gram.apply(z));
    }
}
BENCHMARK(BM_GramianApply)->Arg(200)->Arg(1000)->Arg(2000);

void BM_FractionalOperator(benchmark::State& state) {
    const int m = static_cast<int>(state.range(0));
    Eigen::VectorXd series(m);
    for (int i = 0; i < m; ++i) series[i] = std::sin(0.1 * i) + 0.3 * std::cos(0.37 * i);
    SobolevSpec spec{0.0, 1.0, SobolevSpec::Mode::Homogeneous};
    for (auto _ : state) {
        benchmark::DoNotOptimize(fractional_time_operator(series, -1.0 / 3.0, spec));
    }
}
BENCHMARK(BM_FractionalOperator)->Arg(500)->Arg(2000)->Arg(4000);

}  // namespace

BENCHMARK_MAIN();
