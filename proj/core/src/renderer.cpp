#include "ampi/renderer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <string>
#include <thread>

#include <Eigen/LU>

#include "ampi/error.hpp"

namespace ampi {

void RenderSettings::validate() const {
  if (!std::isfinite(parallax_scale) || !(parallax_scale > 0.0)) {
    throw InvalidArgument("parallax_scale must be finite and positive");
  }
}

Eigen::Matrix3d plane_homography(const CameraIntrinsics& k, const CameraPose& pose, double disparity, double scale) {
  if (!(disparity > 0.0) || !std::isfinite(disparity)) {
    throw InvalidArgument("plane disparity must be positive, got " + std::to_string(disparity));
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw InvalidArgument("parallax scale must be positive");
  }
  const Eigen::Matrix3d km = k.matrix();
  const Eigen::Vector3d normal(0.0, 0.0, 1.0);
  const double inverse_depth = disparity * scale;
  // Points on n^T X = 1 / inverse_depth satisfy X_t = (R + t n^T inverse_depth) X.
  const Eigen::Matrix3d ref_to_target =
      km * (pose.rotation + pose.translation * normal.transpose() * inverse_depth) * km.inverse();
  Eigen::FullPivLU<Eigen::Matrix3d> lu(ref_to_target);
  if (!lu.isInvertible()) {
    throw InvalidArgument("plane homography is singular (camera passes through the plane)");
  }
  return lu.inverse();
}

namespace {

// K (.) K^-1 products carry a few ulps of noise; coordinates that are
// integers up to that noise are sampled as integers so identity and
// integer-shift warps copy pixels exactly.
double snap(double coord) {
  const double r = std::round(coord);
  return std::abs(coord - r) < 1e-9 ? r : coord;
}

}  // namespace

ImageBuffer warp_layer(const ImageBuffer& layer, const Eigen::Matrix3d& h, Size out_dims) {
  if (layer.channels() != 4) {
    throw InvalidArgument("warp_layer expects an RGBA layer");
  }
  if (!h.allFinite() || std::abs(h.determinant()) < 1e-12 * std::max(1.0, h.cwiseAbs().maxCoeff())) {
    throw InvalidArgument("warp homography is singular");
  }
  const int sh = layer.height();
  const int sw = layer.width();
  ImageBuffer out(out_dims, 4);
  for (int y = 0; y < out_dims.height; ++y) {
    for (int x = 0; x < out_dims.width; ++x) {
      const double wz = h(2, 0) * x + h(2, 1) * y + h(2, 2);
      if (!(wz > 0.0)) continue;  // behind the source camera
      const double u = snap((h(0, 0) * x + h(0, 1) * y + h(0, 2)) / wz);
      const double v = snap((h(1, 0) * x + h(1, 1) * y + h(1, 2)) / wz);
      if (!(u > -1.0 && u < sw && v > -1.0 && v < sh)) continue;
      const int x0 = static_cast<int>(std::floor(u));
      const int y0 = static_cast<int>(std::floor(v));
      const double fx = u - x0;
      const double fy = v - y0;
      const double weights[4] = {(1.0 - fx) * (1.0 - fy), fx * (1.0 - fy), (1.0 - fx) * fy, fx * fy};
      const int xs[4] = {x0, x0 + 1, x0, x0 + 1};
      const int ys[4] = {y0, y0, y0 + 1, y0 + 1};
      double acc[4] = {0.0, 0.0, 0.0, 0.0};
      for (int t = 0; t < 4; ++t) {
        if (weights[t] == 0.0 || xs[t] < 0 || xs[t] >= sw || ys[t] < 0 || ys[t] >= sh) continue;
        const double* p = layer.pixel(ys[t], xs[t]);
        const double wa = weights[t] * p[3];
        acc[0] += wa * p[0];
        acc[1] += wa * p[1];
        acc[2] += wa * p[2];
        acc[3] += wa;
      }
      if (acc[3] <= 0.0) continue;
      double* q = out.pixel(y, x);
      q[0] = acc[0] / acc[3];
      q[1] = acc[1] / acc[3];
      q[2] = acc[2] / acc[3];
      q[3] = std::min(acc[3], 1.0);
    }
  }
  return out;
}

namespace {

void composite_over(ImageBuffer& out, const ImageBuffer& layer) {
  const std::size_t n = out.pixel_count();
  const auto src = layer.samples();
  auto dst = out.samples();
  for (std::size_t i = 0; i < n; ++i) {
    const double* p = src.data() + i * 4;
    double* q = dst.data() + i * 3;
    const double a = p[3];
    if (a <= 0.0) continue;
    if (a >= 1.0) {
      q[0] = p[0];
      q[1] = p[1];
      q[2] = p[2];
      continue;
    }
    for (int c = 0; c < 3; ++c) q[c] = a * p[c] + (1.0 - a) * q[c];
  }
}

ImageBuffer background_frame(Size dims, const std::array<double, 3>& bg) {
  ImageBuffer out(dims, 3);
  auto s = out.samples();
  for (std::size_t i = 0; i < out.pixel_count(); ++i) {
    s[i * 3] = bg[0];
    s[i * 3 + 1] = bg[1];
    s[i * 3 + 2] = bg[2];
  }
  return out;
}

}  // namespace

ImageBuffer composite(std::span<const ImageBuffer> layers, const std::array<double, 3>& bg) {
  if (layers.empty()) {
    throw InvalidArgument("composite needs at least one layer");
  }
  const Size dims = layers.front().size();
  for (const ImageBuffer& l : layers) {
    if (l.channels() != 4 || l.size() != dims) {
      throw InvalidArgument("composite layers must be RGBA of equal size");
    }
  }
  ImageBuffer out = background_frame(dims, bg);
  for (const ImageBuffer& l : layers) composite_over(out, l);
  return out;
}

ImageBuffer render_view(const AdaptiveMpi& mpi, const CameraPose& pose, const RenderSettings& settings,
                        Size out_dims) {
  if (mpi.layers.empty()) {
    throw InvalidArgument("cannot render an MPI without layers");
  }
  settings.validate();
  if (out_dims.height < 1 || out_dims.width < 1) {
    throw InvalidArgument("render target size must be positive");
  }
  ImageBuffer out = background_frame(out_dims, settings.background);
  for (const MpiLayer& layer : mpi.layers) {
    const double d = std::max(layer.disparity, 0.0) + kDisparityFloor / settings.parallax_scale;
    const Eigen::Matrix3d h = plane_homography(mpi.ref_intrinsics, pose, d, settings.parallax_scale);
    composite_over(out, warp_layer(layer.rgba, h, out_dims));
  }
  return out;
}

CameraPose trajectory_pose(TrajectoryKind kind, int frame, int frames, double amplitude) {
  if (frames < 1) {
    throw InvalidArgument("trajectory needs at least one frame");
  }
  const double phase = 2.0 * std::numbers::pi * static_cast<double>(frame) / static_cast<double>(frames);
  switch (kind) {
    case TrajectoryKind::swing: return CameraPose::translate(amplitude * std::sin(phase), 0.0, 0.0);
    case TrajectoryKind::zoom: return CameraPose::translate(0.0, 0.0, amplitude * std::sin(phase));
    case TrajectoryKind::circle:
      return CameraPose::translate(amplitude * std::cos(phase), amplitude * std::sin(phase), 0.0);
  }
  return CameraPose::identity();
}

std::vector<ImageBuffer> render_views(const AdaptiveMpi& mpi, std::span<const CameraPose> poses,
                                      const RenderSettings& settings, std::size_t jobs) {
  settings.validate();
  const int frames = static_cast<int>(poses.size());
  std::vector<ImageBuffer> out(poses.size());
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    try {
      for (int k = next++; k < frames; k = next++) {
        out[static_cast<std::size_t>(k)] =
            render_view(mpi, poses[static_cast<std::size_t>(k)], settings, mpi.source_dims);
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = frames;
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(poses.size(), 1));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::vector<ImageBuffer> render_trajectory(const AdaptiveMpi& mpi, TrajectoryKind kind, int frames, double amplitude,
                                           const RenderSettings& settings, std::size_t jobs) {
  if (frames < 1) {
    throw InvalidArgument("trajectory needs at least one frame");
  }
  std::vector<CameraPose> poses;
  poses.reserve(static_cast<std::size_t>(frames));
  for (int k = 0; k < frames; ++k) poses.push_back(trajectory_pose(kind, k, frames, amplitude));
  return render_views(mpi, poses, settings, jobs);
}

}  // namespace ampi
