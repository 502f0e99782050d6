#include <benchmark/benchmark.h>

#include "haltlab/fixpoint.hpp"
#include "haltlab/guest_vm.hpp"
#include "haltlab/suite.hpp"
#include "haltlab/tm.hpp"

using namespace haltlab;

static void BM_TmBoundedRunFast(benchmark::State& state) {
    const tm::TuringMachine loop(suite::fixture_loop());
    tm::BoundedRunner runner(loop, tm::self_input(suite::fixture_loop()));
    const StepIndex bound = static_cast<StepIndex>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(runner.run(bound));
    }
    state.SetItemsProcessed(state.iterations() * bound);
}
BENCHMARK(BM_TmBoundedRunFast)->Arg(64)->Arg(1024)->Arg(65536);

static void BM_TmBoundedRunReference(benchmark::State& state) {
    const tm::TuringMachine loop(suite::fixture_loop());
    const auto input = tm::self_input(suite::fixture_loop());
    const StepIndex bound = static_cast<StepIndex>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_bounded_reference(loop, input, bound));
    }
    state.SetItemsProcessed(state.iterations() * bound);
}
BENCHMARK(BM_TmBoundedRunReference)->Arg(64)->Arg(1024);

static void BM_ChainIteration(benchmark::State& state) {
    const tm::TuringMachine m(suite::fixture_loop());
    const auto input = tm::self_input(suite::fixture_loop());
    const StepIndex stages = static_cast<StepIndex>(state.range(0));
    for (auto _ : state) {
        auto oracle = cached_exact_halt_oracle(m, input);
        benchmark::DoNotOptimize(iterate_chain(oracle, stages));
    }
}
BENCHMARK(BM_ChainIteration)->Arg(16)->Arg(64)->Arg(128);

static void BM_ApplyF(benchmark::State& state) {
    const tm::TuringMachine m(suite::fixture_halt2());
    auto oracle = cached_exact_halt_oracle(m, {});
    const auto stage = iterate_chain(oracle, static_cast<StepIndex>(state.range(0))).stages.back();
    for (auto _ : state) {
        benchmark::DoNotOptimize(apply_F(oracle, stage));
    }
}
BENCHMARK(BM_ApplyF)->Arg(8)->Arg(64);

static void BM_DiagonalizerRoundTrip(benchmark::State& state) {
    const StepIndex bound = static_cast<StepIndex>(state.range(0));
    for (auto _ : state) {
        const guest::BoundedDecider d = guest::make_bounded_decider(bound);
        const guest::Program x = guest::make_diagonalizer(d);
        benchmark::DoNotOptimize(guest::run_collect(d.program, guest::program_nat(x), d.cost_bound));
    }
}
BENCHMARK(BM_DiagonalizerRoundTrip)->Arg(4)->Arg(25);

static void BM_TmEncodeDecode(benchmark::State& state) {
    const tm::MachineSpec spec = suite::fixture_halt2();
    for (auto _ : state) {
        benchmark::DoNotOptimize(tm::decode(tm::encode(spec)));
    }
}
BENCHMARK(BM_TmEncodeDecode);

static void BM_ObservationOrder(benchmark::State& state) {
    const auto domain = suite::all_bottom_observations(5, true);
    for (auto _ : state) {
        std::size_t below = 0;
        for (const auto& p : domain) {
            for (const auto& q : domain) {
                below += leq(p, q);
            }
        }
        benchmark::DoNotOptimize(below);
    }
    state.SetItemsProcessed(state.iterations() * domain.size() * domain.size());
}
BENCHMARK(BM_ObservationOrder);

int main(int argc, char** argv) {
    benchmark::Initialize(&argc, argv);
    if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
    benchmark::RunSpecifiedBenchmarks();
    return 0;
}
