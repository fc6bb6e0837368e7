#include "ampi/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/Core>

#include "ampi/error.hpp"
#include "ampi/renderer.hpp"

namespace ampi {

namespace {

struct OracleResult {
  ImageBuffer image;
  std::vector<int> owner;  // winning surface per target pixel, -1 if none
};

OracleResult run_oracle(const SyntheticScene& scene, const CameraPose& pose, double parallax_scale, int supersample,
                        const std::array<double, 3>& background) {
  if (supersample < 1) {
    throw InvalidArgument("supersample factor must be positive");
  }
  const Size dims = scene.size;
  const std::size_t n = dims.area();
  const CameraIntrinsics& k = scene.intrinsics;
  std::vector<double> zbuf(n, std::numeric_limits<double>::infinity());
  std::vector<int> owner(n, -1);

  // Visits every sub-sample of every surface with its target pixel and depth.
  auto for_each_sample = [&](auto&& visit) {
    for (std::size_t si = 0; si < scene.surfaces.size(); ++si) {
      const SyntheticSurface& s = scene.surfaces[si];
      for (int y = 0; y < dims.height; ++y) {
        for (int x = 0; x < dims.width; ++x) {
          for (int sy = 0; sy < supersample; ++sy) {
            const double py = y + (sy + 0.5) / supersample - 0.5;
            for (int sx = 0; sx < supersample; ++sx) {
              const double px = x + (sx + 0.5) / supersample - 0.5;
              if (!s.contains(px, py)) continue;
              const double w = s.disparity_at(px, py) * parallax_scale + kDisparityFloor;
              if (!(w > 0.0)) continue;
              const Eigen::Vector3d ray((px - k.cx) / k.fx, (py - k.cy) / k.fy, 1.0);
              const Eigen::Vector3d p = pose.rotation * (ray / w) + pose.translation;
              if (!(p.z() > 0.0)) continue;
              const double u = k.fx * p.x() / p.z() + k.cx;
              const double v = k.fy * p.y() / p.z() + k.cy;
              const long tu = std::lround(u);
              const long tv = std::lround(v);
              if (tu < 0 || tv < 0 || tu >= dims.width || tv >= dims.height) continue;
              const std::size_t idx = static_cast<std::size_t>(tv) * static_cast<std::size_t>(dims.width) +
                                      static_cast<std::size_t>(tu);
              visit(si, idx, p.z(), px, py);
            }
          }
        }
      }
    }
  };

  for_each_sample([&](std::size_t si, std::size_t idx, double z, double, double) {
    if (z < zbuf[idx]) {
      zbuf[idx] = z;
      owner[idx] = static_cast<int>(si);
    }
  });

  std::vector<std::array<double, 3>> sum(n, {0.0, 0.0, 0.0});
  std::vector<int> count(n, 0);
  for_each_sample([&](std::size_t si, std::size_t idx, double, double px, double py) {
    if (owner[idx] != static_cast<int>(si)) return;
    const auto c = scene.surfaces[si].color_at(px, py);
    for (int ch = 0; ch < 3; ++ch) sum[idx][static_cast<std::size_t>(ch)] += c[static_cast<std::size_t>(ch)];
    ++count[idx];
  });

  OracleResult r{ImageBuffer(dims, 3), std::move(owner)};
  auto s = r.image.samples();
  for (std::size_t i = 0; i < n; ++i) {
    for (int ch = 0; ch < 3; ++ch) {
      s[i * 3 + static_cast<std::size_t>(ch)] =
          count[i] > 0 ? sum[i][static_cast<std::size_t>(ch)] / count[i] : background[static_cast<std::size_t>(ch)];
    }
  }
  return r;
}

SyntheticSurface::Shape random_shape(std::mt19937_64& rng) {
  return std::uniform_int_distribution<int>(0, 1)(rng) == 0 ? SyntheticSurface::Shape::ellipse
                                                            : SyntheticSurface::Shape::rectangle;
}

std::array<double, 4> random_waves(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> period(5.0, 24.0);
  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
  std::array<double, 4> w{};
  for (int i = 0; i < 2; ++i) {
    const double f = 2.0 * std::numbers::pi / period(rng);
    const double a = angle(rng);
    w[static_cast<std::size_t>(2 * i)] = f * std::cos(a);
    w[static_cast<std::size_t>(2 * i + 1)] = f * std::sin(a);
  }
  return w;
}

std::array<double, 3> random_color(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  return {u(rng), u(rng), u(rng)};
}

}  // namespace

bool SyntheticSurface::contains(double x, double y) const {
  switch (shape) {
    case Shape::full_frame: return true;
    case Shape::ellipse: {
      const double dx = (x - center_x) / radius_x;
      const double dy = (y - center_y) / radius_y;
      return dx * dx + dy * dy <= 1.0;
    }
    case Shape::rectangle: return std::abs(x - center_x) <= radius_x && std::abs(y - center_y) <= radius_y;
  }
  return false;
}

double SyntheticSurface::disparity_at(double x, double y) const {
  return disparity + slope_x * (x - center_x) + slope_y * (y - center_y);
}

std::array<double, 3> SyntheticSurface::color_at(double x, double y) const {
  const double s1 = std::sin(waves[0] * x + waves[1] * y);
  const double s2 = std::sin(waves[2] * x + waves[3] * y);
  const double t = 0.6 * s1 + 0.4 * s2;
  std::array<double, 3> c{};
  for (std::size_t i = 0; i < 3; ++i) c[i] = std::clamp(base[i] + accent[i] * t, 0.0, 1.0);
  return c;
}

SyntheticScene make_scene(Size size, std::vector<SyntheticSurface> surfaces) {
  if (surfaces.empty()) {
    throw InvalidArgument("a synthetic scene needs at least one surface");
  }
  SyntheticScene scene;
  scene.size = size;
  scene.intrinsics = CameraIntrinsics::default_for(size);
  scene.surfaces = std::move(surfaces);
  OracleResult ref = run_oracle(scene, CameraPose::identity(), 1.0, 3, {0.0, 0.0, 0.0});
  scene.image = std::move(ref.image);
  ImageBuffer disparity(size, 1);
  for (int y = 0; y < size.height; ++y) {
    for (int x = 0; x < size.width; ++x) {
      const int o = ref.owner[static_cast<std::size_t>(y) * static_cast<std::size_t>(size.width) +
                              static_cast<std::size_t>(x)];
      const SyntheticSurface& s = scene.surfaces[static_cast<std::size_t>(std::max(o, 0))];
      disparity.at(y, x) = std::max(0.0, s.disparity_at(x, y));
    }
  }
  scene.disparity = DisparityMap::fully_valid(std::move(disparity));
  return scene;
}

SyntheticScene make_scene(std::uint64_t seed, const SceneOptions& opts) {
  std::mt19937_64 rng(seed);
  const Size size = opts.size;
  const double w = size.width;
  const double h = size.height;
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * u01(rng); };

  std::vector<SyntheticSurface> surfaces;
  SyntheticSurface backdrop;
  backdrop.center_x = 0.5 * (w - 1);
  backdrop.center_y = 0.5 * (h - 1);
  backdrop.disparity = uniform(0.18, 0.26);
  backdrop.slope_y = uniform(0.12, 0.22) / h;
  backdrop.slope_x = uniform(-0.03, 0.03) / w;
  backdrop.base = random_color(rng, 0.3, 0.7);
  backdrop.accent = random_color(rng, 0.15, 0.3);
  backdrop.waves = random_waves(rng);
  surfaces.push_back(backdrop);

  const int objects = std::uniform_int_distribution<int>(opts.min_objects, opts.max_objects)(rng);
  for (int i = 0; i < objects; ++i) {
    SyntheticSurface s;
    s.shape = random_shape(rng);
    s.radius_x = uniform(0.06, 0.16) * w;
    s.radius_y = uniform(0.08, 0.22) * h;
    s.center_x = uniform(0.15, 0.85) * w;
    s.center_y = uniform(0.15, 0.85) * h;
    s.disparity = uniform(0.35, 1.0);
    s.slope_x = uniform(-0.04, 0.04) / w;
    s.slope_y = uniform(-0.04, 0.04) / h;
    s.base = random_color(rng, 0.15, 0.85);
    s.accent = random_color(rng, 0.1, 0.3);
    s.waves = random_waves(rng);
    surfaces.push_back(s);
  }
  return make_scene(size, std::move(surfaces));
}

ImageBuffer forward_warp_oracle(const SyntheticScene& scene, const CameraPose& pose, double parallax_scale,
                                int supersample, std::array<double, 3> background) {
  return run_oracle(scene, pose, parallax_scale, supersample, background).image;
}

SyntheticScene make_disc_scene(Size size, double fg, double bg, double radius_fraction) {
  const double w = size.width;
  const double h = size.height;
  SyntheticSurface backdrop;
  backdrop.center_x = 0.5 * (w - 1);
  backdrop.center_y = 0.5 * (h - 1);
  backdrop.disparity = bg;
  backdrop.base = {0.35, 0.5, 0.65};
  backdrop.accent = {0.2, 0.15, 0.1};
  backdrop.waves = {0.21, 0.05, -0.07, 0.33};

  SyntheticSurface disc;
  disc.shape = SyntheticSurface::Shape::ellipse;
  disc.center_x = backdrop.center_x;
  disc.center_y = backdrop.center_y;
  disc.radius_x = disc.radius_y = radius_fraction * std::min(w, h);
  disc.disparity = fg;
  disc.base = {0.75, 0.45, 0.25};
  disc.accent = {0.15, 0.2, 0.2};
  disc.waves = {0.4, 0.25, -0.3, 0.12};
  return make_scene(size, {backdrop, disc});
}

}  // namespace ampi
