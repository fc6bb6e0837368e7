#include "ampi/depthprep.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "ampi/error.hpp"
#include "ampi/filters.hpp"
#include "ampi/image_io.hpp"

namespace ampi {

namespace {

struct ValidRange {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
};

ValidRange valid_range(const DisparityMap& d) {
  ValidRange r;
  for (int y = 0; y < d.raster.height(); ++y) {
    for (int x = 0; x < d.raster.width(); ++x) {
      if (!d.validity(y, x)) continue;
      const double v = d.raster.at(y, x);
      r.lo = std::min(r.lo, v);
      r.hi = std::max(r.hi, v);
    }
  }
  return r;
}

}  // namespace

DisparityMap DisparityMap::fully_valid(ImageBuffer raster) {
  DisparityMap d{std::move(raster), {}};
  d.validity = BinaryMask(d.raster.size(), true);
  return d;
}

void DisparityMap::validate() const {
  if (raster.empty() || raster.channels() != 1) {
    throw InvalidArgument("disparity map must be a non-empty single-channel raster");
  }
  if (validity.size() != raster.size()) {
    throw InvalidArgument("disparity validity mask does not match the raster");
  }
  bool any = false;
  for (int y = 0; y < raster.height(); ++y) {
    for (int x = 0; x < raster.width(); ++x) {
      if (!validity(y, x)) continue;
      const double v = raster.at(y, x);
      if (!std::isfinite(v) || v < 0.0) {
        throw InvalidArgument("valid disparity samples must be finite and non-negative");
      }
      any = true;
    }
  }
  if (!any) {
    throw InvalidArgument("disparity map has no valid pixel");
  }
}

ImageBuffer normalize_quantize(const DisparityMap& d) {
  d.validate();
  const ValidRange r = valid_range(d);
  if (!(r.hi > r.lo)) {
    throw DegenerateInput("disparity map is constant over its valid pixels; nothing to slice");
  }
  const double scale = 255.0 / (r.hi - r.lo);
  ImageBuffer out(d.raster.height(), d.raster.width(), 1);
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      if (!d.validity(y, x)) continue;
      const double q = std::round((d.raster.at(y, x) - r.lo) * scale);
      out.at(y, x) = std::clamp(q, 0.0, 255.0);
    }
  }
  return out;
}

PreprocessedDepth preprocess(const DisparityMap& d, const PreprocessConfig& cfg) {
  const ImageBuffer normalized = normalize_quantize(d);
  ImageBuffer filtered = bilateral_filter(normalized, cfg.spatial_sigma, cfg.range_sigma, cfg.bilateral_radius);
  for (double& v : filtered.samples()) v = std::clamp(std::round(v), 0.0, 255.0);

  PreprocessedDepth out;
  out.edges = canny_edges(filtered, cfg.canny_low, cfg.canny_high);
  out.edge_band = dilate(out.edges, cfg.band_kernel, cfg.band_iterations);
  out.quantized = std::move(filtered);
  return out;
}

DisparityMap fuse_ensemble(std::span<const ImageBuffer> predictions, int target_h, int target_w) {
  if (predictions.empty()) {
    throw InvalidArgument("fuse_ensemble needs at least one prediction");
  }
  if (target_h < 1 || target_w < 1) {
    throw InvalidArgument("fuse_ensemble target size must be positive");
  }

  std::vector<ImageBuffer> members;
  members.reserve(predictions.size());
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const ImageBuffer& p = predictions[i];
    if (p.channels() != 1) {
      throw InvalidArgument("ensemble member " + std::to_string(i) + " is not single-channel");
    }
    const auto s = p.samples();
    const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
    if (!std::isfinite(*lo) || !std::isfinite(*hi)) {
      throw InvalidArgument("ensemble member " + std::to_string(i) + " has non-finite samples");
    }
    if (!(*hi > *lo)) {
      spdlog::warn("fuse_ensemble: skipping constant prediction {}", i);
      continue;
    }
    ImageBuffer normalized(p.height(), p.width(), 1);
    const double low = *lo;
    const double range = *hi - *lo;
    auto out = normalized.samples();
    for (std::size_t k = 0; k < s.size(); ++k) out[k] = (s[k] - low) / range;
    members.push_back(resize_bilinear(normalized, target_h, target_w));
  }
  if (members.empty()) {
    throw DegenerateInput("every ensemble member is constant");
  }

  ImageBuffer fused(target_h, target_w, 1);
  std::vector<double> column(members.size());
  const std::size_t n = members.size();
  auto out = fused.samples();
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t m = 0; m < n; ++m) column[m] = members[m].samples()[i];
    std::sort(column.begin(), column.end());
    out[i] = n % 2 == 1 ? column[n / 2] : 0.5 * (column[n / 2 - 1] + column[n / 2]);
  }
  return DisparityMap::fully_valid(std::move(fused));
}

DisparityMap read_disparity(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
  DisparityMap d;
  if (ext == ".pfm") {
    ImageBuffer raw = read_pfm(path);
    if (raw.channels() != 1) raw = raw.channel(0);
    d.validity = BinaryMask(raw.size());
    for (int y = 0; y < raw.height(); ++y) {
      for (int x = 0; x < raw.width(); ++x) {
        const double v = raw.at(y, x);
        const bool ok = std::isfinite(v);
        d.validity.set(y, x, ok);
        if (!ok) raw.at(y, x) = 0.0;
      }
    }
    d.raster = std::move(raw);
  } else if (ext == ".png") {
    ImageBuffer raw = read_png(path);
    if (raw.channels() != 1) {
      throw ParseError("disparity PNG must be grayscale: " + path.string());
    }
    d.validity = BinaryMask(raw.size());
    for (int y = 0; y < raw.height(); ++y) {
      for (int x = 0; x < raw.width(); ++x) d.validity.set(y, x, raw.at(y, x) > 0.0);
    }
    d.raster = std::move(raw);
  } else {
    throw ParseError("unsupported disparity format '" + ext + "' for " + path.string());
  }
  d.validate();
  return d;
}

void write_disparity_pfm(const DisparityMap& d, const std::filesystem::path& path) {
  ImageBuffer out = d.raster;
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      if (!d.validity(y, x)) out.at(y, x) = std::numeric_limits<double>::quiet_NaN();
    }
  }
  write_pfm(out, path);
}

void write_disparity_png16(const DisparityMap& d, const std::filesystem::path& path) {
  ImageBuffer out = d.raster;
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      if (!d.validity(y, x)) out.at(y, x) = 0.0;
    }
  }
  write_png(out, path, 16);
}

}  // namespace ampi
