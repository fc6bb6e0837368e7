#include "ampi/inpaint.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ampi/error.hpp"
#include "ampi/filters.hpp"

namespace ampi {

namespace {

constexpr int kColorChannels = 3;

void check_rgba(const ImageBuffer& img, const char* what) {
  if (img.channels() != 4) {
    throw InvalidArgument(std::string(what) + " must be RGBA");
  }
}

BinaryMask alpha_mask(const ImageBuffer& rgba) { return threshold_mask(rgba, 0.5, 3); }

}  // namespace

int scaled_band_px(Size frame, int reference_band) {
  const double scale = std::min(frame.height, frame.width) / 768.0;
  return std::max(1, static_cast<int>(std::lround(reference_band * scale)));
}

ImageBuffer accumulate_background(const AdaptiveMpi& mpi, int layer_index) {
  if (layer_index < 0 || layer_index >= mpi.layer_count()) {
    throw InvalidArgument("layer index " + std::to_string(layer_index) + " out of range");
  }
  const Size dims = mpi.source_dims;
  ImageBuffer out(dims, 4);
  for (int y = 0; y < dims.height; ++y) {
    for (int x = 0; x < dims.width; ++x) {
      for (int k = layer_index; k >= 0; --k) {
        const double* p = mpi.layers[static_cast<std::size_t>(k)].rgba.pixel(y, x);
        if (p[3] > 0.5) {
          double* q = out.pixel(y, x);
          std::copy_n(p, kColorChannels, q);
          q[3] = 1.0;
          break;
        }
      }
    }
  }
  return out;
}

BinaryMask make_inference_mask(const ImageBuffer& accumulated, const BinaryMask& occluders, int band_px) {
  check_rgba(accumulated, "accumulated background");
  return make_inference_mask(accumulated, alpha_mask(accumulated), occluders, band_px);
}

BinaryMask make_inference_mask(const ImageBuffer& accumulated, const BinaryMask& seed, const BinaryMask& occluders,
                               int band_px) {
  check_rgba(accumulated, "accumulated background");
  if (seed.size() != accumulated.size() || occluders.size() != accumulated.size()) {
    throw InvalidArgument("inference mask inputs differ in size");
  }
  if (band_px < 0) {
    throw InvalidArgument("band width must be non-negative");
  }
  BinaryMask fill = dilate(seed, 3, band_px);
  fill.subtract(alpha_mask(accumulated));
  fill &= occluders;
  return fill;
}

TrainingPair make_training_pair(const ImageBuffer& layer, int band_px) {
  check_rgba(layer, "training layer");
  const BinaryMask occupancy = alpha_mask(layer);
  const BinaryMask eroded = erode(occupancy, 3, band_px);
  if (!eroded.any()) {
    throw DegenerateInput("erosion by " + std::to_string(band_px) + " px removes the whole layer");
  }
  TrainingPair pair;
  pair.target = layer;
  pair.input_rgba = layer;
  for (int y = 0; y < layer.height(); ++y) {
    for (int x = 0; x < layer.width(); ++x) {
      if (!eroded(y, x)) std::fill_n(pair.input_rgba.pixel(y, x), 4, 0.0);
    }
  }
  pair.mask = occupancy;
  pair.mask.subtract(eroded);
  return pair;
}

ImageBuffer diffuse_fill(const InpaintTask& task, const DiffuseOptions& opts) {
  check_rgba(task.input_rgba, "inpaint input");
  const Size dims = task.input_rgba.size();
  if (task.fill_mask.size() != dims) {
    throw InvalidArgument("fill mask does not match the inpaint input");
  }
  const int h = dims.height;
  const int w = dims.width;
  const std::size_t n = dims.area();
  BinaryMask known = alpha_mask(task.input_rgba);
  known.subtract(task.fill_mask);
  const auto known_bits = known.bits();
  const auto fill_bits = task.fill_mask.bits();

  ImageBuffer out = task.input_rgba;
  if (!task.fill_mask.any()) return out;

  std::array<double, kColorChannels> global_mean{};
  std::size_t known_count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!known_bits[i]) continue;
    const double* p = task.input_rgba.samples().data() + i * 4;
    for (int c = 0; c < kColorChannels; ++c) global_mean[static_cast<std::size_t>(c)] += p[c];
    ++known_count;
  }
  for (double& m : global_mean) m = known_count ? m / static_cast<double>(known_count) : 0.0;

  // 4-connected components of the fill mask. Each component starts at the
  // mean of the known pixels bordering it, which keeps every iterate inside
  // the boundary range.
  constexpr std::array<std::pair<int, int>, 4> kNeighbours{{{-1, 0}, {1, 0}, {0, -1}, {0, 1}}};
  std::vector<int> component(n, -1);
  std::vector<std::size_t> active;
  std::vector<std::size_t> stack;
  std::vector<std::size_t> members;
  int components = 0;
  for (std::size_t seed = 0; seed < n; ++seed) {
    if (!fill_bits[seed] || component[seed] >= 0) continue;
    members.clear();
    std::array<double, kColorChannels> boundary{};
    std::size_t boundary_count = 0;
    component[seed] = components;
    stack.push_back(seed);
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      members.push_back(i);
      const int y = static_cast<int>(i / static_cast<std::size_t>(w));
      const int x = static_cast<int>(i % static_cast<std::size_t>(w));
      for (const auto& [dy, dx] : kNeighbours) {
        const int ny = y + dy;
        const int nx = x + dx;
        if (ny < 0 || ny >= h || nx < 0 || nx >= w) continue;
        const std::size_t j = static_cast<std::size_t>(ny) * static_cast<std::size_t>(w) + static_cast<std::size_t>(nx);
        if (known_bits[j]) {
          const double* p = task.input_rgba.samples().data() + j * 4;
          for (int c = 0; c < kColorChannels; ++c) boundary[static_cast<std::size_t>(c)] += p[c];
          ++boundary_count;
        } else if (fill_bits[j] && component[j] < 0) {
          component[j] = components;
          stack.push_back(j);
        }
      }
    }
    std::array<double, kColorChannels> init = global_mean;
    if (boundary_count > 0) {
      for (auto& b : boundary) b /= static_cast<double>(boundary_count);
      init = boundary;
    } else {
      spdlog::warn("inpaint: fill region of {} px has no known neighbour; using the mean known color",
                   members.size());
    }
    std::sort(members.begin(), members.end());
    for (const std::size_t i : members) {
      double* q = out.samples().data() + i * 4;
      std::copy(init.begin(), init.end(), q);
      q[3] = 1.0;
      if (boundary_count > 0) active.push_back(i);
    }
    ++components;
  }
  std::sort(active.begin(), active.end());

  // Jacobi sweeps over the active fill pixels on planar per-channel buffers.
  std::vector<std::array<std::size_t, 4>> nbr(active.size());
  std::vector<int> nbr_count(active.size(), 0);
  for (std::size_t a = 0; a < active.size(); ++a) {
    const std::size_t i = active[a];
    const int y = static_cast<int>(i / static_cast<std::size_t>(w));
    const int x = static_cast<int>(i % static_cast<std::size_t>(w));
    for (const auto& [dy, dx] : kNeighbours) {
      const int ny = y + dy;
      const int nx = x + dx;
      if (ny < 0 || ny >= h || nx < 0 || nx >= w) continue;
      const std::size_t j = static_cast<std::size_t>(ny) * static_cast<std::size_t>(w) + static_cast<std::size_t>(nx);
      if (known_bits[j] || fill_bits[j]) nbr[a][static_cast<std::size_t>(nbr_count[a]++)] = j;
    }
  }
  for (int c = 0; c < kColorChannels; ++c) {
    std::vector<double> cur(n);
    for (std::size_t i = 0; i < n; ++i) cur[i] = out.samples()[i * 4 + static_cast<std::size_t>(c)];
    std::vector<double> next = cur;
    for (int iter = 0; iter < opts.max_iters; ++iter) {
      double max_change = 0.0;
      for (std::size_t a = 0; a < active.size(); ++a) {
        double sum = 0.0;
        for (int k = 0; k < nbr_count[a]; ++k) sum += cur[nbr[a][static_cast<std::size_t>(k)]];
        const double v = sum / nbr_count[a];
        max_change = std::max(max_change, std::abs(v - cur[active[a]]));
        next[active[a]] = v;
      }
      std::swap(cur, next);
      if (max_change < opts.tol) break;
    }
    for (const std::size_t i : active) out.samples()[i * 4 + static_cast<std::size_t>(c)] = cur[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (known_bits[i]) out.samples()[i * 4 + 3] = 1.0;
  }
  return out;
}

AdaptiveMpi inpaint_mpi(const AdaptiveMpi& mpi, int band_px, const FillBackend& backend) {
  mpi.validate();
  AdaptiveMpi out = mpi;
  const int n = mpi.layer_count();
  for (int j = 0; j + 1 < n; ++j) {
    const BinaryMask occluders = occupancy_union(mpi, j + 1, n);
    if (!occluders.any()) continue;
    InpaintTask task;
    task.layer_index = j;
    task.input_rgba = accumulate_background(mpi, j);
    task.fill_mask = make_inference_mask(task.input_rgba, occupancy_union(mpi, 0, j + 1), occluders, band_px);
    if (!task.fill_mask.any()) continue;
    const ImageBuffer filled = backend ? backend(task) : diffuse_fill(task);
    ImageBuffer& layer = out.layers[static_cast<std::size_t>(j)].rgba;
    for (int y = 0; y < layer.height(); ++y) {
      for (int x = 0; x < layer.width(); ++x) {
        if (!task.fill_mask(y, x)) continue;
        double* q = layer.pixel(y, x);
        std::copy_n(filled.pixel(y, x), kColorChannels, q);
        q[3] = 1.0;
      }
    }
  }
  return out;
}

std::vector<TrainingPair> sample_training_pairs(const AdaptiveMpi& mpi, int count, int band_px, std::uint64_t seed) {
  mpi.validate();
  std::vector<TrainingPair> pairs;
  if (count <= 0) return pairs;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, mpi.layer_count() - 1);
  const int max_attempts = 10 * count;
  for (int attempt = 0; attempt < max_attempts && static_cast<int>(pairs.size()) < count; ++attempt) {
    const int j = pick(rng);
    try {
      TrainingPair pair = make_training_pair(accumulate_background(mpi, j), band_px);
      pair.layer_index = j;
      pairs.push_back(std::move(pair));
    } catch (const DegenerateInput&) {
      spdlog::debug("training pair: layer {} erodes to nothing, resampling", j);
    }
  }
  return pairs;
}

}  // namespace ampi
