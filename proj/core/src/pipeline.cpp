#include "ampi/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "ampi/error.hpp"
#include "ampi/inpaint.hpp"

namespace ampi {

SliceResult slice_adaptive(const ImageBuffer& image, const DisparityMap& disparity, const PipelineOptions& opts) {
  const PreprocessedDepth pre = preprocess(disparity, opts.preprocess);
  return slice(image, pre, disparity, opts.slicing);
}

AdaptiveMpi finish_mpi(const AdaptiveMpi& mpi, const PipelineOptions& opts) {
  if (!opts.inpaint) return mpi;
  const int band = opts.scale_band ? scaled_band_px(mpi.source_dims, opts.band_px) : opts.band_px;
  return inpaint_mpi(mpi, band);
}

SlicingComparison compare_slicing(const ImageBuffer& image, const DisparityMap& disparity, const ImageBuffer& target,
                                  const CameraPose& pose, const CameraIntrinsics& intrinsics, int max_planes,
                                  const ComparisonOptions& opts) {
  PipelineOptions pipeline = opts.pipeline;
  pipeline.slicing.selection.max_planes = max_planes;
  pipeline.slicing.intrinsics = intrinsics;
  pipeline.slicing.parallax_scale = opts.render.parallax_scale;

  const Size dims = image.size();
  const CropRect region = CropRect::margin(dims, opts.crop_fraction);

  const SliceResult adaptive = slice_adaptive(image, disparity, pipeline);
  const int planes = adaptive.plan.layer_count();
  const SliceResult uniform = slice_uniform(image, disparity, planes, pipeline.slicing);

  SlicingComparison out;
  out.max_planes = max_planes;
  const auto score = [&](const AdaptiveMpi& mpi) {
    const ImageBuffer view = render_view(finish_mpi(mpi, pipeline), pose, opts.render, dims);
    const ViewMetricsReport m = view_metrics(view, target, region);
    return StrategyScore{mpi.layer_count(), m.ssim, m.psnr};
  };
  out.adaptive = score(adaptive.mpi);
  out.uniform = score(uniform.mpi);
  return out;
}

std::vector<SweepRow> slicing_sweep(const SweepOptions& opts, std::size_t jobs) {
  if (opts.scenes < 1 || opts.plane_counts.empty()) {
    throw InvalidArgument("sweep needs at least one scene and one plane count");
  }
  const std::size_t n_scenes = static_cast<std::size_t>(opts.scenes);
  const std::size_t n_counts = opts.plane_counts.size();
  std::vector<SlicingComparison> results(n_scenes * n_counts);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    try {
      for (std::size_t i = next++; i < n_scenes; i = next++) {
        const SyntheticScene scene = make_scene(opts.seed + i, opts.scene);
        const ImageBuffer target = forward_warp_oracle(scene, opts.pose, opts.compare.render.parallax_scale, 3,
                                                       opts.compare.render.background);
        for (std::size_t k = 0; k < n_counts; ++k) {
          results[i * n_counts + k] = compare_slicing(scene.image, scene.disparity, target, opts.pose,
                                                      scene.intrinsics, opts.plane_counts[k], opts.compare);
        }
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = n_scenes;
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(jobs, 1, n_scenes);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<SweepRow> rows;
  for (std::size_t k = 0; k < n_counts; ++k) {
    SweepRow row;
    row.max_planes = opts.plane_counts[k];
    row.scenes = opts.scenes;
    for (std::size_t i = 0; i < n_scenes; ++i) {
      const SlicingComparison& c = results[i * n_counts + k];
      row.mean_planes += c.adaptive.planes;
      row.adaptive_ssim += c.adaptive.ssim;
      row.uniform_ssim += c.uniform.ssim;
      row.adaptive_psnr += c.adaptive.psnr;
      row.uniform_psnr += c.uniform.psnr;
    }
    const double n = static_cast<double>(n_scenes);
    row.mean_planes /= n;
    row.adaptive_ssim /= n;
    row.uniform_ssim /= n;
    row.adaptive_psnr /= n;
    row.uniform_psnr /= n;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace ampi
