// Copyright (c) 2026 The procam authors.
// SPDX-License-Identifier: Apache-2.0

// Serial reference vs OpenMP kernels on a small flat-plane fixture.

#include <procam/autodiff.h>
#include <procam/denoise.h>
#include <procam/fixtures.h>
#include <procam/render.h>
#include <procam/structured_light.h>

#include <benchmark/benchmark.h>

using namespace procam;

namespace {

FixtureSpec small_spec() {
    FixtureSpec s;
    s.camera_width = 160;
    s.camera_height = 90;
    s.projector_width = 200;
    s.projector_height = 150;
    return s;
}

const Scene &bench_scene() {
    static auto scene = make_fixture_scene(small_spec());
    return *scene;
}

const SrgbImage &bench_input() {
    static SrgbImage img = fixture_input(small_spec(), InputSet::Train, 0);
    return img;
}

void BM_Render(benchmark::State &state) {
    RenderSettings rs;
    rs.spp = 8;
    rs.serial = state.range(0) == 0;
    for (auto _ : state) benchmark::DoNotOptimize(render(bench_scene(), bench_input(), rs).image);
}

void BM_Backward(benchmark::State &state) {
    RenderSettings rs;
    rs.spp = 4;
    rs.differentiable = true;
    rs.serial = state.range(0) == 0;
    RenderResult res = render(bench_scene(), bench_input(), rs);
    SrgbImage adj(res.image.width(), res.image.height(), 3, 1e-3);
    for (auto _ : state) benchmark::DoNotOptimize(backward(res.record, adj, GradientRequest::all()));
}

void BM_Denoise(benchmark::State &state) {
    bool serial = state.range(0) == 0;
    RenderSettings rs;
    rs.spp = 2;
    SrgbImage noisy = render(bench_scene(), bench_input(), rs).image;
    AuxBuffers aux = render_aux(bench_scene());
    for (auto _ : state) benchmark::DoNotOptimize(denoise(noisy, aux, DenoiseSettings{}, serial));
}

void BM_Decode(benchmark::State &state) {
    bool serial = state.range(0) == 0;
    GrayCodeSet set(200, 150);
    std::vector<SrgbImage> caps;
    RenderSettings rs;
    rs.spp = 1;
    rs.max_depth = 1;
    rs.jitter = false;
    for (int i = 0; i < set.count(); ++i) caps.push_back(render(bench_scene(), set.pattern(i), rs).image);
    for (auto _ : state) benchmark::DoNotOptimize(decode(caps, set, DecodeThresholds{}, serial));
}

}  // namespace

// Arg 0 = serial reference, 1 = OpenMP.
BENCHMARK(BM_Render)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Backward)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Denoise)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Decode)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
