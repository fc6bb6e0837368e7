#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ampi/camera.hpp"
#include "ampi/depthprep.hpp"
#include "ampi/image.hpp"

namespace ampi {

/// Planar textured surface painted in reference-image coordinates. Inverse
/// depth is affine in the image plane, which is exact for a 3D plane.
struct SyntheticSurface {
  enum class Shape { full_frame, ellipse, rectangle };

  Shape shape = Shape::full_frame;
  double center_x = 0;
  double center_y = 0;
  double radius_x = 0;
  double radius_y = 0;

  double disparity = 0.5;  // at the center
  double slope_x = 0;      // disparity change per pixel
  double slope_y = 0;

  std::array<double, 3> base{0.5, 0.5, 0.5};
  std::array<double, 3> accent{0.2, 0.2, 0.2};
  /// Two sinusoidal gratings: (kx, ky) wave vectors in radians per pixel.
  std::array<double, 4> waves{0.3, 0.0, 0.0, 0.3};

  bool contains(double x, double y) const;
  double disparity_at(double x, double y) const;
  std::array<double, 3> color_at(double x, double y) const;
};

struct SyntheticScene {
  Size size;
  CameraIntrinsics intrinsics;
  std::vector<SyntheticSurface> surfaces;  // surfaces[0] fills the frame
  ImageBuffer image;                       // reference view, RGB
  DisparityMap disparity;                  // ground truth at pixel centers
};

struct SceneOptions {
  Size size{192, 256};
  int min_objects = 4;
  int max_objects = 8;
};

/// Procedural scene: a slanted textured backdrop plus several textured
/// objects at random depths. Deterministic in `seed`.
SyntheticScene make_scene(std::uint64_t seed, const SceneOptions& opts = {});

/// Scene from explicit surfaces; the reference view is rendered with the
/// forward-warp oracle at identity pose.
SyntheticScene make_scene(Size size, std::vector<SyntheticSurface> surfaces);

/// Per-pixel forward warp of every surface (supersample^2 samples per source
/// pixel) into the target camera with a depth test. Each target pixel takes
/// the mean color of the samples from its nearest surface; pixels nothing
/// lands on get `background`.
ImageBuffer forward_warp_oracle(const SyntheticScene& scene, const CameraPose& pose, double parallax_scale,
                                int supersample = 3, std::array<double, 3> background = {0, 0, 0});

/// Two-level disc scene used across tests and the CLI demo fixture: a
/// textured disc of disparity `fg` over a textured backdrop at `bg`.
SyntheticScene make_disc_scene(Size size, double fg, double bg, double radius_fraction = 0.25);

}  // namespace ampi
