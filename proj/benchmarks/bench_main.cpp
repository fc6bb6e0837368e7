#include <benchmark/benchmark.h>

#include "ampi/depthprep.hpp"
#include "ampi/dwt.hpp"
#include "ampi/filters.hpp"
#include "ampi/inpaint.hpp"
#include "ampi/pipeline.hpp"
#include "ampi/renderer.hpp"
#include "ampi/slicer.hpp"
#include "ampi/synthetic.hpp"

namespace {

using namespace ampi;

// Frame sizes: 256x192 and the 1024x768 reference.
Size frame(const benchmark::State& state) {
  const int w = static_cast<int>(state.range(0));
  return {w * 3 / 4, w};
}

const SyntheticScene& scene_for(Size size) {
  static SyntheticScene small = make_scene(1, SceneOptions{{192, 256}, 4, 8});
  static SyntheticScene large = make_scene(1, SceneOptions{{768, 1024}, 4, 8});
  return size.width == 256 ? small : large;
}

void BM_Bilateral(benchmark::State& state) {
  const SyntheticScene& s = scene_for(frame(state));
  const ImageBuffer q = normalize_quantize(s.disparity);
  const PreprocessConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bilateral_filter(q, cfg.spatial_sigma, cfg.range_sigma, cfg.bilateral_radius));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(q.pixel_count()));
}

void BM_HaarDwt(benchmark::State& state) {
  const SyntheticScene& s = scene_for(frame(state));
  for (auto _ : state) {
    const DwtStack stack = haar_dwt(s.image);
    benchmark::DoNotOptimize(haar_idwt(stack));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.image.pixel_count()));
}

void BM_Preprocess(benchmark::State& state) {
  const SyntheticScene& s = scene_for(frame(state));
  for (auto _ : state) benchmark::DoNotOptimize(preprocess(s.disparity));
}

void BM_Slice(benchmark::State& state) {
  const SyntheticScene& s = scene_for(frame(state));
  const PreprocessedDepth pre = preprocess(s.disparity);
  for (auto _ : state) benchmark::DoNotOptimize(slice(s.image, pre, s.disparity));
}

void BM_Inpaint(benchmark::State& state) {
  const SyntheticScene& s = scene_for(frame(state));
  const AdaptiveMpi mpi = slice(s.image, preprocess(s.disparity), s.disparity).mpi;
  const int band = scaled_band_px(mpi.source_dims);
  for (auto _ : state) benchmark::DoNotOptimize(inpaint_mpi(mpi, band));
  state.counters["layers"] = mpi.layer_count();
}

void BM_DiffuseFill(benchmark::State& state) {
  const SyntheticScene& s = scene_for(frame(state));
  const Size size = s.size;
  // Known ring around a disc-shaped hole.
  InpaintTask task;
  task.input_rgba = ImageBuffer(size, 4);
  task.fill_mask = BinaryMask(size);
  const double r = 0.2 * size.height;
  for (int y = 0; y < size.height; ++y) {
    for (int x = 0; x < size.width; ++x) {
      const double dx = x - size.width / 2.0, dy = y - size.height / 2.0;
      if (dx * dx + dy * dy < r * r) {
        task.fill_mask.set(y, x);
      } else {
        std::copy_n(s.image.pixel(y, x), 3, task.input_rgba.pixel(y, x));
        task.input_rgba.pixel(y, x)[3] = 1.0;
      }
    }
  }
  for (auto _ : state) benchmark::DoNotOptimize(diffuse_fill(task));
  state.counters["hole_px"] = static_cast<double>(task.fill_mask.count());
}

void BM_RenderView(benchmark::State& state) {
  const SyntheticScene& s = scene_for(frame(state));
  const AdaptiveMpi mpi = slice(s.image, preprocess(s.disparity), s.disparity).mpi;
  const CameraPose pose = CameraPose::translate(0.05, 0.01, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(render_view(mpi, pose, {}, s.size));
  state.counters["layers"] = mpi.layer_count();
}

}  // namespace

BENCHMARK(BM_Bilateral)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HaarDwt)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Preprocess)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Slice)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Inpaint)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DiffuseFill)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RenderView)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
