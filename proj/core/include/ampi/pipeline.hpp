#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "ampi/camera.hpp"
#include "ampi/depthprep.hpp"
#include "ampi/metrics.hpp"
#include "ampi/renderer.hpp"
#include "ampi/slicer.hpp"
#include "ampi/synthetic.hpp"

namespace ampi {

struct PipelineOptions {
  PreprocessConfig preprocess;
  SliceOptions slicing;
  /// Band at the 1024x768 reference; scaled with the frame when requested.
  int band_px = 40;
  bool scale_band = true;
  bool inpaint = true;
};

/// preprocess -> adaptive slice.
SliceResult slice_adaptive(const ImageBuffer& image, const DisparityMap& disparity, const PipelineOptions& opts);

/// Inpaints with the configured band, or returns the input when disabled.
AdaptiveMpi finish_mpi(const AdaptiveMpi& mpi, const PipelineOptions& opts);

struct StrategyScore {
  int planes = 0;
  double ssim = 0;
  double psnr = 0;
};

struct SlicingComparison {
  int max_planes = 0;
  StrategyScore adaptive;
  StrategyScore uniform;
};

struct ComparisonOptions {
  PipelineOptions pipeline;
  RenderSettings render;
  /// Fraction of each dimension cropped from every side before scoring.
  double crop_fraction = 0.05;
};

/// Builds an adaptive MPI with max_planes and a uniform MPI with the plane
/// count the adaptive one ended up with, renders both at `pose` and scores
/// them against `target`.
SlicingComparison compare_slicing(const ImageBuffer& image, const DisparityMap& disparity, const ImageBuffer& target,
                                  const CameraPose& pose, const CameraIntrinsics& intrinsics, int max_planes,
                                  const ComparisonOptions& opts);

struct SweepOptions {
  int scenes = 25;
  std::vector<int> plane_counts{4, 8, 16};
  SceneOptions scene;
  /// Scene i uses seed + i.
  std::uint64_t seed = 1;
  /// Target camera shared by every scene.
  CameraPose pose = CameraPose::translate(0.05, 0.0, 0.0);
  ComparisonOptions compare;
};

/// Corpus averages for one plane budget.
struct SweepRow {
  int max_planes = 0;
  int scenes = 0;
  double mean_planes = 0;
  double adaptive_ssim = 0;
  double uniform_ssim = 0;
  double adaptive_psnr = 0;
  double uniform_psnr = 0;
};

/// Adaptive vs uniform slicing on procedural scenes whose target views come
/// from the forward-warp oracle. Scenes are processed on up to `jobs`
/// threads; results do not depend on `jobs`.
std::vector<SweepRow> slicing_sweep(const SweepOptions& opts, std::size_t jobs = 1);

}  // namespace ampi
