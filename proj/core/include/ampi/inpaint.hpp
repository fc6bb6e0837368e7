#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ampi/mpi.hpp"

namespace ampi {

inline constexpr int kReferenceBandPx = 40;

/// One fill job: extend the accumulated background of `layer_index` into
/// `fill_mask`. Known pixels are those with alpha > 0.5.
struct InpaintTask {
  ImageBuffer input_rgba;
  BinaryMask fill_mask;
  int layer_index = 0;
};

/// Supervision triple for training a learned inpainter.
struct TrainingPair {
  ImageBuffer input_rgba;  // layer restricted to its eroded occupancy
  BinaryMask mask;         // the removed border band
  ImageBuffer target;      // the original layer
  int layer_index = 0;
};

struct DiffuseOptions {
  int max_iters = 2000;
  double tol = 1e-4;
};

/// Fill backend signature; returns the task's RGBA with the mask filled and
/// alpha 1 on known and filled pixels.
using FillBackend = std::function<ImageBuffer(const InpaintTask&)>;

/// Band width for a frame, scaled from the 40 px used at 1024x768 by
/// min(H, W) / 768 and never below 1.
int scaled_band_px(Size frame, int reference_band = kReferenceBandPx);

/// Layers 0..j composited far to near (nearest included layer with alpha
/// wins); alpha is the union of their coverage.
ImageBuffer accumulate_background(const AdaptiveMpi& mpi, int layer_index);

/// (dilate(known, 3x3, band_px) \ known) intersected with occluders, where
/// known is the accumulated alpha.
BinaryMask make_inference_mask(const ImageBuffer& accumulated, const BinaryMask& occluders, int band_px);

/// Same recipe, growing from `seed` instead of the accumulated alpha. Used
/// when earlier passes have already extended the layer.
BinaryMask make_inference_mask(const ImageBuffer& accumulated, const BinaryMask& seed, const BinaryMask& occluders,
                               int band_px);

/// Throws DegenerateInput when erosion leaves nothing.
TrainingPair make_training_pair(const ImageBuffer& layer, int band_px = kReferenceBandPx);

/// Jacobi relaxation of the Laplace equation on the fill mask with known
/// pixels as Dirichlet boundary (4-neighbourhood; neighbours outside both sets
/// are ignored). Components without a known neighbour get the mean known color.
ImageBuffer diffuse_fill(const InpaintTask& task, const DiffuseOptions& opts = {});

/// Extends every layer but the nearest into the pixels hidden behind nearer
/// layers, within band_px of its accumulated background.
AdaptiveMpi inpaint_mpi(const AdaptiveMpi& mpi, int band_px = kReferenceBandPx, const FillBackend& backend = {});

/// Draws `count` training pairs from uniformly sampled layers of `mpi`,
/// each built on the layer's accumulated background. Layers that erode to
/// nothing are skipped.
std::vector<TrainingPair> sample_training_pairs(const AdaptiveMpi& mpi, int count, int band_px, std::uint64_t seed);

}  // namespace ampi
