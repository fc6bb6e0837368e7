#pragma once

#include <filesystem>
#include <span>

#include "ampi/image.hpp"

namespace ampi {

/// Relative inverse depth: larger values are nearer. Invalid pixels carry
/// no information and are ignored by every consumer.
struct DisparityMap {
  ImageBuffer raster;  // single channel
  BinaryMask validity;

  Size size() const { return raster.size(); }

  static DisparityMap fully_valid(ImageBuffer raster);

  /// Throws InvalidArgument when the raster is not single-channel, the mask
  /// shape differs, a valid sample is negative/non-finite, or nothing is valid.
  void validate() const;
};

struct PreprocessConfig {
  double spatial_sigma = 5.0;
  double range_sigma = 25.0;
  int bilateral_radius = 7;
  double canny_low = 50.0;
  double canny_high = 150.0;
  int band_kernel = 3;
  int band_iterations = 3;
};

struct PreprocessedDepth {
  /// Filtered disparity rounded to integers in [0, 255].
  ImageBuffer quantized;
  /// Raw Canny response of the filtered map.
  BinaryMask edges;
  /// Canny edges grown by the configured dilation.
  BinaryMask edge_band;
};

/// Affine map of the valid range onto [0, 255], rounded to nearest (half away
/// from zero). Invalid pixels become 0. Throws DegenerateInput when all valid
/// values are equal.
ImageBuffer normalize_quantize(const DisparityMap& d);

/// normalize_quantize -> bilateral_filter -> canny_edges -> dilation.
PreprocessedDepth preprocess(const DisparityMap& d, const PreprocessConfig& cfg = {});

/// Pseudo ground truth from an ensemble of predictions.
///
/// Every prediction is min-max normalized to [0, 1], bilinearly resized to
/// target_h x target_w and the stack is reduced by the per-pixel median (mean
/// of the two central values for even counts). Constant predictions are
/// skipped with a warning. Horizontally flipped members must be un-flipped
/// by the caller.
DisparityMap fuse_ensemble(std::span<const ImageBuffer> predictions, int target_h, int target_w);

/// Loads a 16-bit (or 8-bit) grayscale PNG or a PFM. PNG zeros and PFM NaNs
/// are invalid.
DisparityMap read_disparity(const std::filesystem::path& path);

/// PFM with NaN at invalid pixels.
void write_disparity_pfm(const DisparityMap& d, const std::filesystem::path& path);

/// 16-bit PNG; values are clamped to [0, 1] and invalid pixels written as 0.
void write_disparity_png16(const DisparityMap& d, const std::filesystem::path& path);

}  // namespace ampi
