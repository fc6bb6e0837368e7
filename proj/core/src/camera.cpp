#include "ampi/camera.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/LU>

#include "ampi/error.hpp"

namespace ampi {

namespace {

double max_orthonormality_error(const Eigen::Matrix3d& r) {
  const double ortho = (r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  return std::max(ortho, std::abs(r.determinant() - 1.0));
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

double parse_double(std::string_view field) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(v)) {
    throw ParseError("invalid numeric field '" + std::string(field) + "' in camera line");
  }
  return v;
}

}  // namespace

Eigen::Matrix3d CameraIntrinsics::matrix() const {
  Eigen::Matrix3d k;
  k << fx, 0.0, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
  return k;
}

CameraIntrinsics CameraIntrinsics::default_for(Size size) {
  const double f = static_cast<double>(size.width);
  return {f, f, 0.5 * (size.width - 1), 0.5 * (size.height - 1)};
}

void CameraIntrinsics::validate(Size frame) const {
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw InvalidArgument("focal lengths must be positive");
  }
  if (!(cx >= -0.5 && cx <= frame.width - 0.5 && cy >= -0.5 && cy <= frame.height - 0.5)) {
    throw InvalidArgument("principal point lies outside the frame");
  }
}

CameraPose CameraPose::translate(double tx, double ty, double tz) {
  CameraPose p;
  p.translation = Eigen::Vector3d(tx, ty, tz);
  return p;
}

CameraPose CameraPose::inverse() const {
  CameraPose p;
  p.rotation = rotation.transpose();
  p.translation = -(p.rotation * translation);
  return p;
}

CameraPose CameraPose::compose(const CameraPose& other) const {
  CameraPose p;
  p.rotation = rotation * other.rotation;
  p.translation = rotation * other.translation + translation;
  return p;
}

void CameraPose::validate(double tolerance) const {
  if (!rotation.allFinite() || !translation.allFinite()) {
    throw InvalidArgument("camera pose has non-finite entries");
  }
  if (max_orthonormality_error(rotation) > tolerance) {
    throw InvalidArgument("camera rotation is not orthonormal with det +1");
  }
}

CameraIntrinsics NormalizedIntrinsics::denormalize(Size frame) const {
  return {fx * frame.width, fy * frame.height, cx * frame.width - 0.5, cy * frame.height - 0.5};
}

CameraFrame parse_realestate_camera(std::string_view line) {
  const auto fields = split_fields(line);
  if (fields.size() != 17 && fields.size() != 19) {
    throw ParseError("camera line needs 17 or 19 fields, got " + std::to_string(fields.size()));
  }
  CameraFrame frame;
  {
    const std::string_view ts = fields[0];
    const auto [ptr, ec] = std::from_chars(ts.data(), ts.data() + ts.size(), frame.timestamp);
    if (ec != std::errc() || ptr != ts.data() + ts.size()) {
      throw ParseError("invalid timestamp '" + std::string(ts) + "' in camera line");
    }
  }
  frame.intrinsics = {parse_double(fields[1]), parse_double(fields[2]), parse_double(fields[3]),
                      parse_double(fields[4])};
  const std::size_t offset = fields.size() == 19 ? 7 : 5;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      frame.world_to_camera.rotation(r, c) = parse_double(fields[offset + static_cast<std::size_t>(r * 4 + c)]);
    }
    frame.world_to_camera.translation(r) = parse_double(fields[offset + static_cast<std::size_t>(r * 4 + 3)]);
  }
  if (max_orthonormality_error(frame.world_to_camera.rotation) > 1e-3) {
    throw ParseError("camera rotation is not orthonormal within 1e-3");
  }
  return frame;
}

std::string format_realestate_camera(const CameraFrame& frame) {
  std::ostringstream out;
  out.precision(17);
  out << frame.timestamp << ' ' << frame.intrinsics.fx << ' ' << frame.intrinsics.fy << ' ' << frame.intrinsics.cx
      << ' ' << frame.intrinsics.cy << " 0 0";
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) out << ' ' << frame.world_to_camera.rotation(r, c);
    out << ' ' << frame.world_to_camera.translation(r);
  }
  return out.str();
}

CameraPose relative_pose(const CameraFrame& source, const CameraFrame& target) {
  return target.world_to_camera.compose(source.world_to_camera.inverse());
}

}  // namespace ampi
