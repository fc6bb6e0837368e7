#pragma once

#include "ampi/image.hpp"

namespace ampi {

/// Bilinear resampling with pixel-center alignment. Sampling positions are
/// clamped to the source, so every output sample is a convex combination of
/// at most four source samples. Same-size requests return an exact copy.
ImageBuffer resize_bilinear(const ImageBuffer& src, int out_h, int out_w);

/// Edge-preserving smoothing of a single-channel raster.
///
/// Weights are exp(-r^2 / 2 spatial_sigma^2) * exp(-dv^2 / 2 range_sigma^2)
/// over a (2 radius + 1)^2 window with replicated borders. Throws
/// InvalidArgument for non-positive sigmas, negative radius or multi-channel
/// input.
ImageBuffer bilateral_filter(const ImageBuffer& src, double spatial_sigma, double range_sigma, int radius);

struct SobelGradients {
  ImageBuffer gx;
  ImageBuffer gy;
};

/// 3x3 Sobel derivatives with replicated borders.
SobelGradients sobel(const ImageBuffer& src);

/// Canny edge detector on a single-channel [0, 255] raster: Sobel gradients,
/// L2 magnitude, four-direction non-maximum suppression and 8-connected
/// double-threshold hysteresis. Requires low_thresh <= high_thresh.
BinaryMask canny_edges(const ImageBuffer& src, double low_thresh, double high_thresh);

enum class MorphOp { erode, dilate };

/// Binary morphology with a k x k square element applied `iterations` times.
/// Out-of-frame pixels replicate the nearest border pixel. `kernel` must be
/// odd and positive; zero iterations return the input unchanged.
BinaryMask morph(const BinaryMask& src, MorphOp op, int kernel, int iterations);

inline BinaryMask dilate(const BinaryMask& src, int kernel, int iterations) {
  return morph(src, MorphOp::dilate, kernel, iterations);
}
inline BinaryMask erode(const BinaryMask& src, int kernel, int iterations) {
  return morph(src, MorphOp::erode, kernel, iterations);
}

}  // namespace ampi
