#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "ampi/image.hpp"

namespace ampi {

/// Pinhole intrinsics in pixels; pixel centers sit at integer coordinates.
struct CameraIntrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;

  Eigen::Matrix3d matrix() const;

  /// fx = fy = width, principal point at the frame center.
  static CameraIntrinsics default_for(Size size);

  /// Throws InvalidArgument unless focal lengths are positive and the
  /// principal point lies inside `frame`.
  void validate(Size frame) const;

  friend bool operator==(const CameraIntrinsics&, const CameraIntrinsics&) = default;
};

/// Rigid transform taking reference-camera coordinates to target-camera
/// coordinates: X_target = rotation * X_ref + translation.
struct CameraPose {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static CameraPose identity() { return {}; }
  static CameraPose translate(double tx, double ty, double tz);

  CameraPose inverse() const;
  /// (this * other) applies `other` first.
  CameraPose compose(const CameraPose& other) const;

  /// Throws InvalidArgument when R^T R deviates from I by more than
  /// `tolerance` (max abs entry) or det(R) is not +1 within the same bound.
  void validate(double tolerance = 1e-9) const;
};

/// Intrinsics as stored by RealEstate10K: fractions of the frame size.
struct NormalizedIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;

  CameraIntrinsics denormalize(Size frame) const;
};

/// One line of a RealEstate10K camera file.
struct CameraFrame {
  std::int64_t timestamp = 0;
  NormalizedIntrinsics intrinsics;
  /// World-to-camera extrinsics.
  CameraPose world_to_camera;
};

/// Parses "timestamp fx fy cx cy [k1 k2] r11 r12 r13 t1 r21 r22 r23 t2 r31 r32
/// r33 t3". The two distortion placeholders present in the published files are
/// optional. Throws ParseError on a wrong field count, a non-numeric field or a
/// rotation that is not orthonormal within 1e-3.
CameraFrame parse_realestate_camera(std::string_view line);

/// Inverse of parse_realestate_camera (always writes the 19-field form).
std::string format_realestate_camera(const CameraFrame& frame);

/// Pose mapping `source` camera coordinates to `target` camera coordinates,
/// i.e. P_target * P_source^-1.
CameraPose relative_pose(const CameraFrame& source, const CameraFrame& target);

}  // namespace ampi
