#pragma once

#include <vector>

#include "ampi/camera.hpp"
#include "ampi/image.hpp"

namespace ampi {

struct MpiLayer {
  ImageBuffer rgba;       // 4 channels, straight (not premultiplied) color
  double disparity = 0;   // plane position in raw disparity units
  BinaryMask occupancy;   // source pixels assigned to this layer at slice time
};

/// Adaptive multiplane image. Layers are ordered far to near, so layer
/// disparities strictly increase with the index.
struct AdaptiveMpi {
  std::vector<MpiLayer> layers;
  CameraIntrinsics ref_intrinsics;
  Size source_dims;
  double parallax_scale = 1.0;
  /// Quantized-depth transitions that produced the layers; informational.
  std::vector<int> transitions;

  int layer_count() const { return static_cast<int>(layers.size()); }

  /// Throws InvalidArgument when there are no layers, a layer has the wrong
  /// shape, or disparities are not strictly increasing.
  void validate() const;
};

/// Union of occupancies of layers [first, last).
BinaryMask occupancy_union(const AdaptiveMpi& mpi, int first, int last);

}  // namespace ampi
