#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <exception>
#include <functional>
#include <string>

#include "ampi/error.hpp"
#include "ampi/mpiformat.hpp"
#include "commands.hpp"

namespace {

using namespace ampi::cli;

void add_preprocess_options(CLI::App* cmd, ampi::PreprocessConfig& p) {
  cmd->add_option("--spatial-sigma", p.spatial_sigma, "Bilateral spatial sigma (px)")->check(CLI::PositiveNumber);
  cmd->add_option("--range-sigma", p.range_sigma, "Bilateral range sigma (depth levels)")->check(CLI::PositiveNumber);
  cmd->add_option("--bilateral-radius", p.bilateral_radius, "Bilateral window radius (px)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--canny-low", p.canny_low, "Canny hysteresis low threshold");
  cmd->add_option("--canny-high", p.canny_high, "Canny hysteresis high threshold");
  cmd->add_option("--band-kernel", p.band_kernel, "Edge band structuring element size (odd)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--band-iterations", p.band_iterations, "Edge band dilation iterations")
      ->check(CLI::NonNegativeNumber);
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_st("ampi"));
  spdlog::set_pattern("%^[%l]%$ %v");

  CLI::App app{"Adaptive multiplane images from a single picture and a disparity map", "ampi"};
  app.set_config("--config", "", "TOML or INI file; a [section] per subcommand")->check(CLI::ExistingFile);
  app.set_version_flag("--version", AMPI_VERSION);
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1, 1);
  app.fallthrough();
  int verbose = 0;
  bool quiet = false;
  app.add_flag("-v,--verbose", verbose, "More log output (repeatable)");
  app.add_flag("-q,--quiet", quiet, "Only log errors");

  FuseArgs fuse;
  auto* fuse_cmd = app.add_subcommand("fuse", "Median-fuse an ensemble of disparity predictions");
  fuse_cmd->add_option("inputs", fuse.inputs, "Prediction files (.pfm or 16-bit .png)")->check(CLI::ExistingFile);
  fuse_cmd->add_option("--flipped", fuse.flipped, "Predictions made on mirrored inputs; flipped back before fusing")
      ->check(CLI::ExistingFile);
  fuse_cmd->add_option("--size", fuse.size, "Output height and width (default: largest input)")
      ->expected(2)
      ->check(CLI::PositiveNumber);
  fuse_cmd->add_option("-o,--output", fuse.output, "Fused disparity (.pfm or .png)")->required();

  SliceArgs slice;
  auto* slice_cmd = app.add_subcommand("slice", "Slice an image into an adaptive MPI");
  slice_cmd->add_option("--image", slice.image, "RGB image (.png)")->required()->check(CLI::ExistingFile);
  slice_cmd->add_option("--depth", slice.depth, "Disparity map (.pfm or 16-bit .png)")
      ->required()
      ->check(CLI::ExistingFile);
  slice_cmd->add_option("-o,--output", slice.output, "Output container directory")->required();
  slice_cmd->add_option("--max-planes", slice.selection.max_planes, "Upper bound on the layer count")
      ->check(CLI::Range(1, 255));
  slice_cmd->add_option("--xi", slice.selection.xi, "Suppression half-width around a selected transition")
      ->check(CLI::NonNegativeNumber);
  slice_cmd->add_option("--min-value", slice.selection.min_value, "Transition index threshold");
  add_preprocess_options(slice_cmd, slice.preprocess);
  slice_cmd->add_flag("--include-edge-band", slice.include_edge_band, "Keep edge-band pixels in the histogram");
  slice_cmd->add_option("--uniform", slice.uniform, "Uniform baseline with N planes instead of adaptive slicing")
      ->check(CLI::Range(1, 255));
  slice_cmd->add_option("--parallax-scale", slice.parallax_scale, "Disparity to inverse depth factor")
      ->check(CLI::PositiveNumber);
  slice_cmd->add_option("--intrinsics", slice.intrinsics, "fx fy cx cy in pixels (default: fx = fy = width, centered)")
      ->expected(4);

  InpaintArgs inpaint;
  auto* inpaint_cmd = app.add_subcommand("inpaint", "Fill occluded margins of every layer but the nearest");
  inpaint_cmd->add_option("-i,--input", inpaint.input, "Input container directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  inpaint_cmd->add_option("-o,--output", inpaint.output, "Output container directory")->required();
  inpaint_cmd->add_option("--band", inpaint.band, "Band width at 1024x768 (px)")->check(CLI::NonNegativeNumber);
  inpaint_cmd->add_flag("--no-scale-band", inpaint.no_scale_band, "Use --band as is instead of scaling it");
  inpaint_cmd->add_option("--max-iters", inpaint.max_iters, "Diffusion iteration cap")->check(CLI::NonNegativeNumber);
  inpaint_cmd->add_option("--tol", inpaint.tol, "Diffusion stops once no pixel changes more than this")
      ->check(CLI::NonNegativeNumber);

  RenderArgs render;
  auto* render_cmd = app.add_subcommand("render", "Render novel views of a container");
  render_cmd->add_option("-i,--input", render.input, "Container directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  render_cmd->add_option("-o,--output", render.output, "Frame directory")->required();
  auto* pose_opt = render_cmd->add_option("--pose", render.pose, "Single view translated by tx ty tz")->expected(3);
  auto* camera_opt = render_cmd->add_option("--camera", render.camera, "RealEstate10K camera file, one view per line")
                         ->check(CLI::ExistingFile);
  render_cmd->add_option("--source-frame", render.source_frame, "Camera-file line the container was built from")
      ->check(CLI::NonNegativeNumber);
  auto* traj_opt = render_cmd->add_option("--trajectory", render.trajectory, "Camera path")
                       ->check(CLI::IsMember({"swing", "circle", "zoom"}));
  pose_opt->excludes(camera_opt)->excludes(traj_opt);
  camera_opt->excludes(traj_opt);
  render_cmd->add_option("--frames", render.frames, "Trajectory length")->check(CLI::PositiveNumber);
  render_cmd->add_option("--amplitude", render.amplitude, "Trajectory amplitude (translation units)");
  render_cmd->add_option("--fps", render.fps, "Frame rate recorded in frames.json")->check(CLI::PositiveNumber);
  render_cmd->add_option("-j,--jobs", render.jobs, "Render threads")->check(CLI::PositiveNumber);
  render_cmd->add_option("--parallax-scale", render.parallax_scale, "Override the container's parallax scale")
      ->check(CLI::PositiveNumber);
  render_cmd->add_option("--background", render.background, "Uncovered pixel color, r g b in [0, 1]")
      ->expected(3)
      ->check(CLI::Range(0.0, 1.0));

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Depth and view metrics, or the synthetic slicing sweep");
  eval_cmd->add_option("--pairs", eval.pairs, "JSON manifest of depth and view pairs")->check(CLI::ExistingFile);
  eval_cmd->add_option("-o,--output", eval.output, "Report directory")->required();
  eval_cmd->add_flag("--no-align", eval.no_align, "Score depth predictions without median/std alignment");
  eval_cmd->add_option("--crop", eval.crop, "Margin fraction removed from each side before view metrics")
      ->check(CLI::Range(0.0, 0.49));
  eval_cmd->add_flag("--synthetic", eval.synthetic, "Run the adaptive vs uniform sweep on procedural scenes");
  eval_cmd->add_option("--scenes", eval.scenes, "Synthetic scene count")->check(CLI::PositiveNumber);
  eval_cmd->add_option("--plane-counts", eval.plane_counts, "Plane budgets compared in the sweep")
      ->delimiter(',')
      ->check(CLI::Range(1, 255));
  eval_cmd->add_option("--seed", eval.seed, "Seed of the first synthetic scene");
  eval_cmd->add_option("--tx", eval.tx, "Target camera x translation for the sweep");
  eval_cmd->add_option("-j,--jobs", eval.jobs, "Sweep threads")->check(CLI::PositiveNumber);

  ExportArgs exp;
  auto* export_cmd =
      app.add_subcommand("export-training-pairs", "Write inpainting training triplets sampled from a container");
  export_cmd->add_option("-i,--input", exp.input, "Container directory")->required()->check(CLI::ExistingDirectory);
  export_cmd->add_option("-o,--output", exp.output, "Output directory")->required();
  export_cmd->add_option("--count", exp.count, "Number of pairs")->check(CLI::NonNegativeNumber);
  export_cmd->add_option("--band", exp.band, "Erosion band at 1024x768 (px)")->check(CLI::PositiveNumber);
  export_cmd->add_flag("--no-scale-band", exp.no_scale_band, "Use --band as is instead of scaling it");
  export_cmd->add_option("--seed", exp.seed, "Layer sampling seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (quiet) {
    spdlog::set_level(spdlog::level::err);
  } else if (verbose > 0) {
    spdlog::set_level(verbose > 1 ? spdlog::level::trace : spdlog::level::debug);
  }

  CLI::App* cmd = app.get_subcommands().front();
  RunRecord record(cmd->get_name(), effective_config(*cmd));
  const std::function<void()> run = [&]() -> std::function<void()> {
    if (cmd == fuse_cmd) return [&] { run_fuse(fuse, record); };
    if (cmd == slice_cmd) return [&] { run_slice(slice, record); };
    if (cmd == inpaint_cmd) return [&] { run_inpaint(inpaint, record); };
    if (cmd == render_cmd) return [&] { run_render(render, record); };
    if (cmd == eval_cmd) return [&] { run_eval(eval, record); };
    return [&] { run_export(exp, record); };
  }();

  try {
    run();
  } catch (const UsageError& e) {
    spdlog::error("{}", e.what());
    return kExitUsage;
  } catch (const ampi::FormatError& e) {
    spdlog::error("invalid container: {}", e.what());
    return kExitFailure;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitFailure;
  }
  return kExitOk;
}
