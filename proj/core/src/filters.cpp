#include "ampi/filters.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ampi/error.hpp"

namespace ampi {

namespace {

int clamp_index(int i, int n) { return std::clamp(i, 0, n - 1); }

void require_single_channel(const ImageBuffer& src, const char* op) {
  if (src.channels() != 1) {
    throw InvalidArgument(std::string(op) + " expects a single-channel image, got " +
                          std::to_string(src.channels()) + " channels");
  }
}

struct AxisTaps {
  std::vector<int> lo;
  std::vector<int> hi;
  std::vector<double> frac;
};

AxisTaps bilinear_taps(int in, int out) {
  AxisTaps taps;
  taps.lo.resize(static_cast<std::size_t>(out));
  taps.hi.resize(static_cast<std::size_t>(out));
  taps.frac.resize(static_cast<std::size_t>(out));
  const double ratio = static_cast<double>(in) / static_cast<double>(out);
  for (int i = 0; i < out; ++i) {
    double pos = (i + 0.5) * ratio - 0.5;
    pos = std::clamp(pos, 0.0, static_cast<double>(in - 1));
    const int lo = static_cast<int>(std::floor(pos));
    const auto k = static_cast<std::size_t>(i);
    taps.lo[k] = lo;
    taps.hi[k] = std::min(lo + 1, in - 1);
    taps.frac[k] = pos - lo;
  }
  return taps;
}

}  // namespace

ImageBuffer resize_bilinear(const ImageBuffer& src, int out_h, int out_w) {
  if (out_h < 1 || out_w < 1) {
    throw InvalidArgument("resize target must be at least 1x1, got " + std::to_string(out_h) + "x" +
                          std::to_string(out_w));
  }
  if (out_h == src.height() && out_w == src.width()) return src;

  const AxisTaps ty = bilinear_taps(src.height(), out_h);
  const AxisTaps tx = bilinear_taps(src.width(), out_w);
  const int channels = src.channels();
  ImageBuffer out(out_h, out_w, channels);
  for (int y = 0; y < out_h; ++y) {
    const auto yi = static_cast<std::size_t>(y);
    const double fy = ty.frac[yi];
    for (int x = 0; x < out_w; ++x) {
      const auto xi = static_cast<std::size_t>(x);
      const double fx = tx.frac[xi];
      const double* p00 = src.pixel(ty.lo[yi], tx.lo[xi]);
      const double* p01 = src.pixel(ty.lo[yi], tx.hi[xi]);
      const double* p10 = src.pixel(ty.hi[yi], tx.lo[xi]);
      const double* p11 = src.pixel(ty.hi[yi], tx.hi[xi]);
      double* q = out.pixel(y, x);
      for (int c = 0; c < channels; ++c) {
        const double top = p00[c] + fx * (p01[c] - p00[c]);
        const double bottom = p10[c] + fx * (p11[c] - p10[c]);
        q[c] = top + fy * (bottom - top);
      }
    }
  }
  return out;
}

ImageBuffer bilateral_filter(const ImageBuffer& src, double spatial_sigma, double range_sigma, int radius) {
  require_single_channel(src, "bilateral_filter");
  if (!(spatial_sigma > 0.0) || !(range_sigma > 0.0)) {
    throw InvalidArgument("bilateral_filter sigmas must be positive");
  }
  if (radius < 0) {
    throw InvalidArgument("bilateral_filter radius must be non-negative");
  }

  const int side = 2 * radius + 1;
  std::vector<double> spatial(static_cast<std::size_t>(side * side));
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      spatial[static_cast<std::size_t>((dy + radius) * side + dx + radius)] =
          std::exp(-(dx * dx + dy * dy) / (2.0 * spatial_sigma * spatial_sigma));
    }
  }

  // Integer-valued rasters (the quantized depth path) hit a lookup table
  // instead of exp() in the inner loop.
  const auto samples = src.samples();
  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  const double span = *hi_it - *lo_it;
  const bool integral = span <= 4096.0 && std::all_of(samples.begin(), samples.end(),
                                                      [](double v) { return v == std::floor(v); });
  const double inv_two_range_sq = 1.0 / (2.0 * range_sigma * range_sigma);
  std::vector<double> range_lut;
  if (integral) {
    range_lut.resize(static_cast<std::size_t>(span) + 1);
    for (std::size_t d = 0; d < range_lut.size(); ++d) {
      const double dd = static_cast<double>(d);
      range_lut[d] = std::exp(-dd * dd * inv_two_range_sq);
    }
  }

  const int h = src.height();
  const int w = src.width();
  ImageBuffer out(h, w, 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double center = src.at(y, x);
      double acc = 0.0;
      double norm = 0.0;
      for (int dy = -radius; dy <= radius; ++dy) {
        const int sy = clamp_index(y + dy, h);
        const double* row = src.pixel(sy, 0);
        const double* sw = spatial.data() + (dy + radius) * side + radius;
        for (int dx = -radius; dx <= radius; ++dx) {
          const double v = row[clamp_index(x + dx, w)];
          const double diff = v - center;
          const double rw = integral ? range_lut[static_cast<std::size_t>(std::abs(diff))]
                                     : std::exp(-diff * diff * inv_two_range_sq);
          const double wgt = sw[dx] * rw;
          acc += wgt * v;
          norm += wgt;
        }
      }
      out.at(y, x) = acc / norm;
    }
  }
  return out;
}

SobelGradients sobel(const ImageBuffer& src) {
  require_single_channel(src, "sobel");
  const int h = src.height();
  const int w = src.width();
  SobelGradients g{ImageBuffer(h, w, 1), ImageBuffer(h, w, 1)};
  for (int y = 0; y < h; ++y) {
    const int ym = clamp_index(y - 1, h);
    const int yp = clamp_index(y + 1, h);
    for (int x = 0; x < w; ++x) {
      const int xm = clamp_index(x - 1, w);
      const int xp = clamp_index(x + 1, w);
      const double a = src.at(ym, xm), b = src.at(ym, x), c = src.at(ym, xp);
      const double d = src.at(y, xm), f = src.at(y, xp);
      const double gg = src.at(yp, xm), hh = src.at(yp, x), i = src.at(yp, xp);
      g.gx.at(y, x) = (c + 2.0 * f + i) - (a + 2.0 * d + gg);
      g.gy.at(y, x) = (gg + 2.0 * hh + i) - (a + 2.0 * b + c);
    }
  }
  return g;
}

BinaryMask canny_edges(const ImageBuffer& src, double low_thresh, double high_thresh) {
  require_single_channel(src, "canny_edges");
  if (low_thresh > high_thresh) {
    throw InvalidArgument("canny_edges requires low_thresh <= high_thresh");
  }
  const int h = src.height();
  const int w = src.width();
  const SobelGradients g = sobel(src);

  ImageBuffer mag(h, w, 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) mag.at(y, x) = std::hypot(g.gx.at(y, x), g.gy.at(y, x));
  }

  // tan(22.5 deg) and tan(67.5 deg) split the gradient direction into four
  // sectors; each pixel is compared with its two neighbours along the
  // gradient. Ties resolve toward the first pixel of a plateau.
  constexpr double kTan22 = 0.41421356237309503;
  constexpr double kTan67 = 2.414213562373095;
  enum : std::uint8_t { kNone = 0, kWeak = 1, kStrong = 2 };
  std::vector<std::uint8_t> label(static_cast<std::size_t>(h) * static_cast<std::size_t>(w), kNone);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double m = mag.at(y, x);
      if (m <= 0.0 || m < low_thresh) continue;
      const double gx = g.gx.at(y, x);
      const double gy = g.gy.at(y, x);
      const double ax = std::abs(gx);
      const double ay = std::abs(gy);
      int dx = 0;
      int dy = 0;
      if (ay <= kTan22 * ax) {
        dx = 1;
      } else if (ay >= kTan67 * ax) {
        dy = 1;
      } else {
        dx = 1;
        dy = ((gx > 0) == (gy > 0)) ? 1 : -1;
      }
      const double before = mag.at(clamp_index(y - dy, h), clamp_index(x - dx, w));
      const double after = mag.at(clamp_index(y + dy, h), clamp_index(x + dx, w));
      if (m > before && m >= after) {
        label[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)] =
            m >= high_thresh ? kStrong : kWeak;
      }
    }
  }

  BinaryMask edges(h, w);
  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const auto idx = static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x);
      if (label[idx] != kStrong || edges(y, x)) continue;
      edges.set(y, x);
      stack.emplace_back(y, x);
      while (!stack.empty()) {
        const auto [cy, cx] = stack.back();
        stack.pop_back();
        for (int ny = cy - 1; ny <= cy + 1; ++ny) {
          for (int nx = cx - 1; nx <= cx + 1; ++nx) {
            if (ny < 0 || ny >= h || nx < 0 || nx >= w || edges(ny, nx)) continue;
            if (label[static_cast<std::size_t>(ny) * static_cast<std::size_t>(w) + static_cast<std::size_t>(nx)] ==
                kNone) {
              continue;
            }
            edges.set(ny, nx);
            stack.emplace_back(ny, nx);
          }
        }
      }
    }
  }
  return edges;
}

}  // namespace ampi
