#include "ampi/slicer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "ampi/error.hpp"

namespace ampi {

namespace {

int level_of(double q) { return static_cast<int>(std::clamp(std::lround(q), 0L, 255L)); }

void check_transitions(const std::vector<int>& t) {
  if (t.size() < 2 || t.front() != 0 || t.back() != kDepthLevels - 1) {
    throw InvalidArgument("transitions must start at 0 and end at 255");
  }
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (t[i] <= t[i - 1]) throw InvalidArgument("transitions must be strictly increasing");
  }
}

// Maps each quantized level to its interval: [t_j, t_j+1), last one closed.
std::array<int, kDepthLevels> interval_lookup(const std::vector<int>& t) {
  std::array<int, kDepthLevels> lut{};
  const int layers = static_cast<int>(t.size()) - 1;
  for (int j = 0; j < layers; ++j) {
    const int end = j + 1 == layers ? kDepthLevels : t[static_cast<std::size_t>(j) + 1];
    for (int v = t[static_cast<std::size_t>(j)]; v < end; ++v) lut[static_cast<std::size_t>(v)] = j;
  }
  return lut;
}

struct LayerStats {
  std::vector<std::size_t> pixels;
  std::vector<std::size_t> valid;
  std::vector<double> sum;
};

LayerStats gather(const ImageBuffer& quantized, const DisparityMap& raw, const std::vector<int>& t) {
  const auto lut = interval_lookup(t);
  const std::size_t n = t.size() - 1;
  LayerStats s{std::vector<std::size_t>(n, 0), std::vector<std::size_t>(n, 0), std::vector<double>(n, 0.0)};
  for (int y = 0; y < quantized.height(); ++y) {
    for (int x = 0; x < quantized.width(); ++x) {
      const auto j = static_cast<std::size_t>(lut[static_cast<std::size_t>(level_of(quantized.at(y, x)))]);
      ++s.pixels[j];
      if (raw.validity(y, x)) {
        ++s.valid[j];
        s.sum[j] += raw.raster.at(y, x);
      }
    }
  }
  return s;
}

}  // namespace

DepthHistogram histogram(const ImageBuffer& quantized, const BinaryMask& exclude) {
  if (quantized.channels() != 1 || exclude.size() != quantized.size()) {
    throw InvalidArgument("histogram needs a single-channel raster and a matching exclusion mask");
  }
  std::array<std::size_t, kDepthLevels> counts{};
  std::size_t total = 0;
  for (int y = 0; y < quantized.height(); ++y) {
    for (int x = 0; x < quantized.width(); ++x) {
      if (exclude(y, x)) continue;
      ++counts[static_cast<std::size_t>(level_of(quantized.at(y, x)))];
      ++total;
    }
  }
  if (total == 0) {
    throw DegenerateInput("every pixel is excluded from the depth histogram");
  }
  DepthHistogram h;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    h.bins[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
  }
  return h;
}

TransitionIndex transition_index(const DepthHistogram& h) {
  TransitionIndex t;
  const auto& b = h.bins;
  for (int i = 0; i < kDepthLevels; ++i) {
    const double prev = b[static_cast<std::size_t>(std::max(i - 1, 0))];
    const double next = b[static_cast<std::size_t>(std::min(i + 1, kDepthLevels - 1))];
    const double cur = b[static_cast<std::size_t>(i)];
    const double lap = prev - 2.0 * cur + next;
    t.values[static_cast<std::size_t>(i)] = lap / std::max(TransitionIndex::kEpsilon, cur);
  }
  return t;
}

SlicingPlan select_transitions(TransitionIndex t, const SelectionConfig& cfg) {
  if (cfg.max_planes < 1) {
    throw InvalidArgument("max_planes must be at least 1");
  }
  if (cfg.xi < 0) {
    throw InvalidArgument("suppression half-width must be non-negative");
  }
  SlicingPlan plan;
  plan.transitions = {0, kDepthLevels - 1};
  auto& v = t.values;
  while (static_cast<int>(plan.transitions.size()) - 2 < cfg.max_planes - 1) {
    int best = -1;
    for (int i = 1; i < kDepthLevels - 1; ++i) {
      if (best < 0 || v[static_cast<std::size_t>(i)] > v[static_cast<std::size_t>(best)]) best = i;
    }
    if (best < 0 || !(v[static_cast<std::size_t>(best)] > cfg.min_value)) break;
    plan.transitions.push_back(best);
    const int lo = std::max(0, best - cfg.xi);
    const int hi = std::min(kDepthLevels - 1, best + cfg.xi);
    for (int i = lo; i <= hi; ++i) v[static_cast<std::size_t>(i)] = 0.0;
  }
  std::sort(plan.transitions.begin(), plan.transitions.end());
  return plan;
}

SliceResult assemble_layers(const ImageBuffer& src, const ImageBuffer& quantized, const DisparityMap& raw,
                            std::vector<int> transitions, const SliceOptions& opts) {
  if (src.size() != quantized.size() || src.size() != raw.size()) {
    throw InvalidArgument("image and depth dimensions differ: image " + std::to_string(src.height()) + "x" +
                          std::to_string(src.width()) + ", depth " + std::to_string(raw.size().height) + "x" +
                          std::to_string(raw.size().width));
  }
  check_transitions(transitions);
  raw.validate();

  double raw_lo = std::numeric_limits<double>::infinity();
  double raw_hi = -std::numeric_limits<double>::infinity();
  for (int y = 0; y < raw.raster.height(); ++y) {
    for (int x = 0; x < raw.raster.width(); ++x) {
      if (!raw.validity(y, x)) continue;
      raw_lo = std::min(raw_lo, raw.raster.at(y, x));
      raw_hi = std::max(raw_hi, raw.raster.at(y, x));
    }
  }

  // Drop empty intervals, then merge neighbours whose plane positions would
  // not increase (possible when filtering moved pixels across a boundary).
  std::vector<double> planes;
  for (;;) {
    const LayerStats stats = gather(quantized, raw, transitions);
    const std::size_t n = transitions.size() - 1;
    std::vector<int> kept{0};
    bool seen = false;
    for (std::size_t j = 0; j < n; ++j) {
      if (stats.pixels[j] == 0) continue;
      if (seen) kept.push_back(transitions[j]);
      seen = true;
    }
    kept.push_back(kDepthLevels - 1);
    if (kept != transitions) {
      transitions = std::move(kept);
      continue;
    }

    planes.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (stats.valid[j] > 0) {
        planes[j] = stats.sum[j] / static_cast<double>(stats.valid[j]);
      } else {
        const double end = j + 1 == n ? kDepthLevels - 1 : transitions[j + 1] - 1;
        const double mid = 0.5 * (transitions[j] + end);
        planes[j] = raw_lo + mid / 255.0 * (raw_hi - raw_lo);
      }
    }
    std::size_t bad = 0;
    for (std::size_t j = 1; j < n && bad == 0; ++j) {
      if (!(planes[j] > planes[j - 1])) bad = j;
    }
    if (bad == 0) break;
    transitions.erase(transitions.begin() + static_cast<std::ptrdiff_t>(bad));
  }

  SliceResult result;
  result.plan.transitions = transitions;
  result.plan.plane_disparities = planes;

  const Size dims = src.size();
  AdaptiveMpi& mpi = result.mpi;
  mpi.source_dims = dims;
  mpi.ref_intrinsics = opts.intrinsics.value_or(CameraIntrinsics::default_for(dims));
  mpi.ref_intrinsics.validate(dims);
  mpi.parallax_scale = opts.parallax_scale;
  mpi.transitions = transitions;
  const std::size_t n = planes.size();
  mpi.layers.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    mpi.layers[j].rgba = ImageBuffer(dims, 4);
    mpi.layers[j].occupancy = BinaryMask(dims);
    mpi.layers[j].disparity = planes[j];
  }
  const auto lut = interval_lookup(transitions);
  const int channels = src.channels();
  for (int y = 0; y < dims.height; ++y) {
    for (int x = 0; x < dims.width; ++x) {
      const auto j = static_cast<std::size_t>(lut[static_cast<std::size_t>(level_of(quantized.at(y, x)))]);
      MpiLayer& layer = mpi.layers[j];
      layer.occupancy.set(y, x);
      const double* p = src.pixel(y, x);
      double* q = layer.rgba.pixel(y, x);
      if (channels >= 3) {
        q[0] = p[0];
        q[1] = p[1];
        q[2] = p[2];
      } else {
        q[0] = q[1] = q[2] = p[0];
      }
      q[3] = 1.0;
    }
  }
  return result;
}

SliceResult slice(const ImageBuffer& src, const PreprocessedDepth& pre, const DisparityMap& raw,
                  const SliceOptions& opts) {
  if (src.size() != pre.quantized.size() || src.size() != raw.size()) {
    throw InvalidArgument("image and depth dimensions differ");
  }
  BinaryMask exclude = raw.validity.complement();
  if (opts.exclude_edge_band) exclude |= pre.edge_band;
  const DepthHistogram h = histogram(pre.quantized, exclude);
  const SlicingPlan plan = select_transitions(transition_index(h), opts.selection);
  return assemble_layers(src, pre.quantized, raw, plan.transitions, opts);
}

SliceResult slice_uniform(const ImageBuffer& src, const DisparityMap& raw, int n_planes, const SliceOptions& opts) {
  if (n_planes < 1 || n_planes > kDepthLevels - 1) {
    throw InvalidArgument("uniform slicing needs 1..255 planes, got " + std::to_string(n_planes));
  }
  const ImageBuffer quantized = normalize_quantize(raw);
  std::vector<int> transitions;
  for (int j = 0; j <= n_planes; ++j) transitions.push_back((kDepthLevels - 1) * j / n_planes);
  return assemble_layers(src, quantized, raw, std::move(transitions), opts);
}

}  // namespace ampi
