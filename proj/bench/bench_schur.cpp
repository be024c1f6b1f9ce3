// Serial vs OpenMP Schur complement assembly, plus a full alpha_wang solve.
#include <benchmark/benchmark.h>

#include "doeblin/doeblin.hpp"
#include "doeblin/random.hpp"
#include "doeblin/sdp.hpp"

using namespace doeblin;

namespace {

struct Instance {
    std::vector<detail::StandardBlock> blocks;
    std::vector<ComplexMatrix> w;
    int m = 0;
};

// Two blocks of size n with m dense rows, roughly the shape of a tensor alpha_wang.
Instance make_instance(int n, int m) {
    Rng rng(11);
    Instance in;
    in.m = m;
    in.blocks.resize(2);
    for (auto& blk : in.blocks) {
        blk.dim = n;
        for (int i = 0; i < m; ++i) {
            blk.rows.push_back(i);
            const ComplexMatrix g = ginibre(n, n, rng);
            blk.coeffs.push_back(g + g.adjoint());
        }
        const ComplexMatrix g = ginibre(n, n, rng);
        in.w.push_back(g * g.adjoint());
    }
    return in;
}

void BM_schur_serial(benchmark::State& state) {
    const Instance in = make_instance(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(detail::schur_serial(in.blocks, in.w, in.m));
}

void BM_schur_parallel(benchmark::State& state) {
    const Instance in = make_instance(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(detail::schur_parallel(in.blocks, in.w, in.m));
}

void BM_alpha_wang_tensor(benchmark::State& state) {
    Rng rng(5);
    const Channel ch = tensor(random_channel(2, 2, rng, 2), random_channel(2, 2, rng, 2));
    SdpOptions opts;
    opts.parallel = state.range(0) != 0;
    for (auto _ : state) benchmark::DoNotOptimize(alpha_wang(ch, opts).value);
}

}  // namespace

BENCHMARK(BM_schur_serial)->Args({4, 16})->Args({16, 16})->Args({16, 64});
BENCHMARK(BM_schur_parallel)->Args({4, 16})->Args({16, 16})->Args({16, 64});
BENCHMARK(BM_alpha_wang_tensor)->Arg(0)->Arg(1);

BENCHMARK_MAIN();
