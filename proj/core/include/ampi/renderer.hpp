#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "ampi/camera.hpp"
#include "ampi/mpi.hpp"

namespace ampi {

/// Guards the farthest planes: inverse depth = disparity * scale + kDisparityFloor.
inline constexpr double kDisparityFloor = 1e-4;

struct RenderSettings {
  /// Maps relative disparity to metric inverse depth.
  double parallax_scale = 1.0;
  std::array<double, 3> background{0.0, 0.0, 0.0};

  void validate() const;
};

/// Homography induced by the fronto-parallel plane at inverse depth
/// disparity * scale, returned in the target -> reference direction used for
/// inverse warping. This is the inverse of K (R + t n^T w) K^-1 with
/// n = (0, 0, 1); it reduces to K (I - t n^T w) K^-1 whenever R = I and t_z = 0.
/// Throws InvalidArgument for non-positive disparity.
Eigen::Matrix3d plane_homography(const CameraIntrinsics& k, const CameraPose& pose, double disparity, double scale);

/// Inverse warp: every target pixel p samples the layer at H p with
/// premultiplied bilinear interpolation. Taps outside the source are fully
/// transparent. Output colors are straight alpha, zero where alpha is zero.
ImageBuffer warp_layer(const ImageBuffer& layer_rgba, const Eigen::Matrix3d& h, Size out_dims);

/// Back-to-front over operator on straight-alpha layers.
ImageBuffer composite(std::span<const ImageBuffer> layers_far_to_near, const std::array<double, 3>& bg);

ImageBuffer render_view(const AdaptiveMpi& mpi, const CameraPose& pose, const RenderSettings& settings,
                        Size out_dims);

/// One view per pose on up to `jobs` worker threads, each at the source size.
std::vector<ImageBuffer> render_views(const AdaptiveMpi& mpi, std::span<const CameraPose> poses,
                                      const RenderSettings& settings, std::size_t jobs = 1);

enum class TrajectoryKind { swing, circle, zoom };

/// Phase 2 pi k / frames. swing: tx = A sin; zoom: tz = A sin;
/// circle: (tx, ty) = A (cos, sin). Rotation is always identity.
CameraPose trajectory_pose(TrajectoryKind kind, int frame, int frames, double amplitude);

/// Renders `frames` views along the trajectory using up to `jobs` worker
/// threads. Frames are independent so the result does not depend on `jobs`.
std::vector<ImageBuffer> render_trajectory(const AdaptiveMpi& mpi, TrajectoryKind kind, int frames, double amplitude,
                                           const RenderSettings& settings, std::size_t jobs = 1);

}  // namespace ampi
