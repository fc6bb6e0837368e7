#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ampi/pipeline.hpp"
#include "run_record.hpp"

namespace ampi::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Bad invocation detected after parsing (exit code 2).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FuseArgs {
  std::vector<std::string> inputs;
  std::vector<std::string> flipped;  // predictions made on mirrored images
  std::vector<int> size;             // {height, width}; empty = largest input
  std::string output;
};

struct SliceArgs {
  std::string image;
  std::string depth;
  std::string output;
  PreprocessConfig preprocess;
  SelectionConfig selection;
  bool include_edge_band = false;
  int uniform = 0;
  double parallax_scale = 1.0;
  std::vector<double> intrinsics;  // fx fy cx cy
};

struct InpaintArgs {
  std::string input;
  std::string output;
  int band = 40;
  bool no_scale_band = false;
  int max_iters = 2000;
  double tol = 1e-4;
};

struct RenderArgs {
  std::string input;
  std::string output;
  std::vector<double> pose;  // tx ty tz
  std::string camera;
  int source_frame = 0;
  std::string trajectory;
  int frames = 180;
  double amplitude = 0.05;
  int fps = 30;
  int jobs = 1;
  std::optional<double> parallax_scale;
  std::vector<double> background{0.0, 0.0, 0.0};
};

struct EvalArgs {
  std::string pairs;
  std::string output;
  bool no_align = false;
  double crop = 0.05;
  bool synthetic = false;
  int scenes = 25;
  std::vector<int> plane_counts{4, 8, 16};
  std::uint64_t seed = 1;
  double tx = 0.05;
  int jobs = 1;
};

struct ExportArgs {
  std::string input;
  std::string output;
  int count = 16;
  int band = 40;
  bool no_scale_band = false;
  std::uint64_t seed = 0;
};

void run_fuse(const FuseArgs& a, RunRecord& record);
void run_slice(const SliceArgs& a, RunRecord& record);
void run_inpaint(const InpaintArgs& a, RunRecord& record);
void run_render(const RenderArgs& a, RunRecord& record);
void run_eval(const EvalArgs& a, RunRecord& record);
void run_export(const ExportArgs& a, RunRecord& record);

}  // namespace ampi::cli
