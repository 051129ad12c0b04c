#include <benchmark/benchmark.h>

#include "panceval/edt.hpp"
#include "panceval/harmonize.hpp"
#include "panceval/metrics.hpp"
#include "panceval/rng.hpp"

using namespace panceval;

namespace {

BinaryMask blob_mask(const GridSpec& g, double p, std::uint64_t seed) {
    Rng rng(seed);
    BinaryMask m(g);
    for (std::size_t i = 0; i < m.size(); ++i)
        if (rng.uniform() < p) m.set(i);
    if (m.empty()) m.set(0);
    return m;
}

void bm_edt(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const GridSpec g{{n, n, n}, {1.5, 1.0, 1.0}, {0, 0, 0}};
    const BinaryMask m = blob_mask(g, 0.05, 1);
    for (auto _ : state) benchmark::DoNotOptimize(edt(m));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.voxel_count()));
}
BENCHMARK(bm_edt)->Arg(32)->Arg(64)->Arg(96);

void bm_hausdorff(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const GridSpec g{{n, n, n}, {1.5, 1.0, 1.0}, {0, 0, 0}};
    const BinaryMask a = blob_mask(g, 0.08, 2);
    const BinaryMask b = blob_mask(g, 0.08, 3);
    for (auto _ : state) benchmark::DoNotOptimize(hausdorff(a, b));
}
BENCHMARK(bm_hausdorff)->Arg(32)->Arg(64);

void bm_group_remap(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const GridSpec g{{n, n, n}, {1, 1, 1}, {0, 0, 0}};
    Rng rng(4);
    std::vector<LabelCode> v(g.voxel_count());
    std::map<LabelCode, LabelCode> mapping;
    for (LabelCode c = 1; c <= 117; ++c) mapping[c] = c % 44 + 1;
    for (auto& c : v) c = static_cast<LabelCode>(rng.bounded(118));
    const LabelVolume vol(g, v);
    for (auto _ : state) benchmark::DoNotOptimize(group_remap(vol, mapping));
    state.SetBytesProcessed(state.iterations() *
                            static_cast<std::int64_t>(g.voxel_count() * sizeof(LabelCode)));
}
BENCHMARK(bm_group_remap)->Arg(64)->Arg(128);

void bm_resample(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const GridSpec src{{n, n, n}, {2, 2, 2}, {0, 0, 0}};
    Rng rng(5);
    std::vector<LabelCode> v(src.voxel_count());
    for (auto& c : v) c = static_cast<LabelCode>(rng.bounded(8));
    const LabelVolume vol(src, v);
    const GridSpec dst{{2 * n, 2 * n, 2 * n}, {1, 1, 1}, {0, 0, 0}};
    for (auto _ : state) benchmark::DoNotOptimize(resample_nearest(vol, dst));
}
BENCHMARK(bm_resample)->Arg(32)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
