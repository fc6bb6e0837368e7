#pragma once

#include <array>
#include <optional>
#include <vector>

#include "ampi/depthprep.hpp"
#include "ampi/mpi.hpp"

namespace ampi {

inline constexpr int kDepthLevels = 256;

/// Normalized histogram of quantized depth; bins sum to one.
struct DepthHistogram {
  std::array<double, kDepthLevels> bins{};
};

/// t = lap(h) / max(eps, h), with lap the [1, -2, 1] stencil and replicated
/// end bins.
struct TransitionIndex {
  static constexpr double kEpsilon = 0.001;
  std::array<double, kDepthLevels> values{};
};

struct SelectionConfig {
  int max_planes = 16;
  int xi = 8;              // half-width of the suppression window
  double min_value = 0.1;  // selection stops once no t exceeds this
};

struct SlicingPlan {
  /// Strictly increasing, first 0, last 255. Layer j covers quantized
  /// values [transitions[j], transitions[j + 1]), the last interval closed.
  std::vector<int> transitions;
  /// One per layer, far to near (strictly increasing). Empty for plans that
  /// only carry transitions.
  std::vector<double> plane_disparities;

  int layer_count() const { return static_cast<int>(transitions.size()) - 1; }
};

struct SliceOptions {
  SelectionConfig selection;
  /// Leave edge-band pixels out of the histogram.
  bool exclude_edge_band = true;
  /// Defaults to CameraIntrinsics::default_for(source size).
  std::optional<CameraIntrinsics> intrinsics;
  double parallax_scale = 1.0;
};

struct SliceResult {
  SlicingPlan plan;
  AdaptiveMpi mpi;
};

/// Throws DegenerateInput when every pixel is excluded.
DepthHistogram histogram(const ImageBuffer& quantized, const BinaryMask& exclude);

TransitionIndex transition_index(const DepthHistogram& h);

/// Greedy selection: repeatedly take the largest t_i (smallest index on ties)
/// among interior bins 1..254 while it exceeds min_value and fewer than
/// max_planes - 1 transitions have been taken, zeroing t over [i - xi, i + xi]
/// after each pick. Returns the sorted transitions including 0 and 255.
SlicingPlan select_transitions(TransitionIndex t, const SelectionConfig& cfg = {});

/// Adaptive slicing of `src` using the preprocessed depth for the histogram
/// and layer assignment and `raw` for plane placement.
SliceResult slice(const ImageBuffer& src, const PreprocessedDepth& pre, const DisparityMap& raw,
                  const SliceOptions& opts = {});

/// Baseline with transitions at floor(255 j / n_planes).
SliceResult slice_uniform(const ImageBuffer& src, const DisparityMap& raw, int n_planes,
                          const SliceOptions& opts = {});

/// Shared layer assembly: assigns pixels by quantized value, drops empty
/// intervals, merges neighbours whose mean raw disparities are out of order
/// and builds RGBA layers with alpha = occupancy.
SliceResult assemble_layers(const ImageBuffer& src, const ImageBuffer& quantized, const DisparityMap& raw,
                            std::vector<int> transitions, const SliceOptions& opts);

}  // namespace ampi
