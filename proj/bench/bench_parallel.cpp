// Serial reference vs OpenMP kernels. Thread count: RINGLAB_THREADS or the
// OpenMP default; on one core both variants should time alike.

#include <benchmark/benchmark.h>

#include "ringlab/kinematics.hpp"
#include "ringlab/oscillation.hpp"
#include "ringlab/poincare.hpp"

using namespace ringlab;

namespace {

struct Setup {
    ModelParams p;
    EquilibriumConfig c;
};

const Setup& case1() {
    static const Setup s = [] {
        Setup r;
        r.c = resolve_equilibrium(r.p, EquilibriumType::I);
        r.p.Omega = r.c.nu;
        return r;
    }();
    return s;
}

Execution mode(const benchmark::State& st) {
    return st.range(0) ? Execution::parallel : Execution::serial;
}

void BM_Portrait(benchmark::State& st) {
    const auto& s = case1();
    PortraitOptions o;
    o.nx = o.ns = 4;
    o.t_max = 1.0;
    o.with_separatrices = false;
    o.exec = mode(st);
    for (auto _ : st) benchmark::DoNotOptimize(streamline_portrait(s.c, s.p, o));
}

void BM_Section(benchmark::State& st) {
    const auto& s = case1();
    PoincareOptions o;
    o.exec = mode(st);
    const PoincareMap map(s.c, s.p, {0.01, MotionMode::analytic, 0.0}, o);
    const auto seeds = seed_ladder(s.c, 0.9, 4, 0.05 * s.c.r2_hat);
    for (auto _ : st) benchmark::DoNotOptimize(section(seeds, 2, map));
}

void BM_Stagnation(benchmark::State& st) {
    const auto& s = case1();
    std::vector<double> t(256);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = 0.005 * static_cast<double>(i);
    for (auto _ : st)
        benchmark::DoNotOptimize(
            stagnation_trace(s.c, s.p, {0.01, MotionMode::analytic, 0.0}, t, mode(st)));
}

}  // namespace

BENCHMARK(BM_Portrait)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Section)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Stagnation)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
