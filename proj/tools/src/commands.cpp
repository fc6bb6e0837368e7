#include "commands.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ampi/error.hpp"
#include "ampi/image_io.hpp"
#include "ampi/inpaint.hpp"
#include "ampi/mpiformat.hpp"

namespace ampi::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string lower_ext(const fs::path& p) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
  return e;
}

std::string numbered(const char* pattern, int i) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, i);
  return buf;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot write " + p.string());
  out << text;
}

ImageBuffer mask_image(const BinaryMask& m) {
  ImageBuffer out(m.size(), 1);
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) out.at(y, x) = m(y, x) ? 1.0 : 0.0;
  }
  return out;
}

int band_for(Size dims, int band, bool no_scale) { return no_scale ? band : scaled_band_px(dims, band); }

}  // namespace

void run_fuse(const FuseArgs& a, RunRecord& record) {
  if (a.inputs.empty() && a.flipped.empty()) {
    throw UsageError("fuse needs at least one prediction");
  }
  const std::string ext = lower_ext(a.output);
  if (ext != ".pfm" && ext != ".png") {
    throw UsageError("fuse output must end in .pfm or .png");
  }
  std::vector<ImageBuffer> members;
  for (const auto& p : a.inputs) {
    members.push_back(read_disparity(p).raster);
    record.add_input(p);
  }
  for (const auto& p : a.flipped) {
    members.push_back(flip_horizontal(read_disparity(p).raster));
    record.add_input(p);
  }
  int h = 0;
  int w = 0;
  if (a.size.size() == 2) {
    h = a.size[0];
    w = a.size[1];
  } else {
    for (const auto& m : members) {
      if (static_cast<long>(m.height()) * m.width() > static_cast<long>(h) * w) {
        h = m.height();
        w = m.width();
      }
    }
  }
  spdlog::info("fusing {} predictions at {}x{}", members.size(), w, h);
  const DisparityMap fused = fuse_ensemble(members, h, w);
  const fs::path out(a.output);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  if (ext == ".pfm") {
    write_disparity_pfm(fused, out);
  } else {
    write_disparity_png16(fused, out);
  }
  record.write(out.has_parent_path() ? out.parent_path() : fs::path("."));
}

void run_slice(const SliceArgs& a, RunRecord& record) {
  const ImageBuffer image = to_rgb(read_png(a.image));
  const DisparityMap depth = read_disparity(a.depth);
  record.add_input(a.image);
  record.add_input(a.depth);
  if (image.size() != depth.size()) {
    throw InvalidArgument("image is " + std::to_string(image.width()) + "x" + std::to_string(image.height()) +
                          " but depth is " + std::to_string(depth.size().width) + "x" +
                          std::to_string(depth.size().height));
  }
  SliceOptions opts;
  opts.selection = a.selection;
  opts.exclude_edge_band = !a.include_edge_band;
  opts.parallax_scale = a.parallax_scale;
  if (a.intrinsics.size() == 4) {
    opts.intrinsics = CameraIntrinsics{a.intrinsics[0], a.intrinsics[1], a.intrinsics[2], a.intrinsics[3]};
  }
  SliceResult r;
  if (a.uniform > 0) {
    r = slice_uniform(image, depth, a.uniform, opts);
  } else {
    r = slice(image, preprocess(depth, a.preprocess), depth, opts);
  }
  std::ostringstream t;
  for (int v : r.plan.transitions) t << ' ' << v;
  spdlog::info("{} layers, transitions{}", r.plan.layer_count(), t.str());
  save_mpi(r.mpi, a.output);
  record.write(a.output);
}

void run_inpaint(const InpaintArgs& a, RunRecord& record) {
  const AdaptiveMpi mpi = load_mpi(a.input);
  record.add_input(a.input);
  const int band = band_for(mpi.source_dims, a.band, a.no_scale_band);
  const DiffuseOptions diffuse{a.max_iters, a.tol};
  spdlog::info("inpainting {} layers with a {} px band", mpi.layer_count(), band);
  const AdaptiveMpi out = inpaint_mpi(mpi, band, [&](const InpaintTask& task) { return diffuse_fill(task, diffuse); });
  save_mpi(out, a.output);
  record.write(a.output);
}

void run_render(const RenderArgs& a, RunRecord& record) {
  const AdaptiveMpi mpi = load_mpi(a.input);
  record.add_input(a.input);
  RenderSettings settings;
  settings.parallax_scale = a.parallax_scale.value_or(mpi.parallax_scale);
  std::copy_n(a.background.begin(), 3, settings.background.begin());

  std::vector<CameraPose> poses;
  if (!a.camera.empty()) {
    record.add_input(a.camera);
    std::ifstream in(a.camera);
    if (!in) throw IoError("cannot open camera file " + a.camera);
    std::vector<CameraFrame> frames;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos || line.front() == '#') continue;
      try {
        frames.push_back(parse_realestate_camera(line));
      } catch (const ParseError& e) {
        // The first line of a published file is the video URL.
        if (frames.empty() && line_no == 1 && line.find("://") != std::string::npos) continue;
        throw ParseError(a.camera + ":" + std::to_string(line_no) + ": " + e.what());
      }
    }
    if (frames.empty()) throw ParseError("camera file " + a.camera + " has no frames");
    if (a.source_frame < 0 || a.source_frame >= static_cast<int>(frames.size())) {
      throw UsageError("--source-frame " + std::to_string(a.source_frame) + " outside the " +
                       std::to_string(frames.size()) + " frames of " + a.camera);
    }
    for (const auto& f : frames) poses.push_back(relative_pose(frames[static_cast<std::size_t>(a.source_frame)], f));
  } else if (!a.trajectory.empty()) {
    const TrajectoryKind kind = a.trajectory == "swing"  ? TrajectoryKind::swing
                                : a.trajectory == "zoom" ? TrajectoryKind::zoom
                                                         : TrajectoryKind::circle;
    for (int k = 0; k < a.frames; ++k) poses.push_back(trajectory_pose(kind, k, a.frames, a.amplitude));
  } else if (a.pose.size() == 3) {
    poses.push_back(CameraPose::translate(a.pose[0], a.pose[1], a.pose[2]));
  } else {
    poses.push_back(CameraPose::identity());
  }

  spdlog::info("rendering {} frames of {} layers", poses.size(), mpi.layer_count());
  const auto views = render_views(mpi, poses, settings, static_cast<std::size_t>(std::max(a.jobs, 1)));
  fs::create_directories(a.output);
  json files = json::array();
  for (std::size_t k = 0; k < views.size(); ++k) {
    const std::string name = numbered("frame_%04d.png", static_cast<int>(k));
    write_png(views[k], fs::path(a.output) / name);
    files.push_back(name);
  }
  json index{{"fps", a.fps},
             {"frame_count", views.size()},
             {"frames", files},
             {"height", mpi.source_dims.height},
             {"width", mpi.source_dims.width}};
  write_text(fs::path(a.output) / "frames.json", index.dump(2) + "\n");
  record.write(a.output);
}

void run_eval(const EvalArgs& a, RunRecord& record) {
  if (a.pairs.empty() && !a.synthetic) {
    throw UsageError("eval needs --pairs, --synthetic or both");
  }
  const fs::path out_dir(a.output);
  fs::create_directories(out_dir);
  json report = json::object();

  if (!a.pairs.empty()) {
    record.add_input(a.pairs);
    std::ifstream in(a.pairs);
    if (!in) throw IoError("cannot open " + a.pairs);
    const json manifest = json::parse(in, nullptr, false);
    if (manifest.is_discarded() || !manifest.is_object()) {
      throw UsageError(a.pairs + " is not a JSON object");
    }
    const json depth = manifest.value("depth", json::array());
    const json views = manifest.value("views", json::array());
    if (!depth.is_array() || !views.is_array()) {
      throw UsageError(a.pairs + ": 'depth' and 'views' must be arrays");
    }
    if (depth.empty() && views.empty()) {
      throw UsageError(a.pairs + " lists no pairs");
    }
    const fs::path base = fs::path(a.pairs).parent_path();
    auto resolve = [&](const json& entry, const char* key) {
      if (!entry.is_object() || !entry.contains(key) || !entry[key].is_string()) {
        throw UsageError(a.pairs + ": every entry needs a '" + key + "' path");
      }
      const fs::path p = entry[key].get<std::string>();
      return p.is_absolute() ? p : base / p;
    };

    if (!depth.empty()) {
      std::ostringstream csv;
      csv << "pred,gt," << csv_header(DepthMetricsReport{}) << '\n';
      json rows = json::array();
      for (const auto& entry : depth) {
        const fs::path pred_path = resolve(entry, "pred");
        const fs::path gt_path = resolve(entry, "gt");
        const DisparityMap gt = read_disparity(gt_path);
        DisparityMap pred = read_disparity(pred_path);
        record.add_input(pred_path);
        record.add_input(gt_path);
        if (!a.no_align) pred = align_median_std(pred, gt);
        const DepthMetricsReport m = depth_metrics(pred, gt);
        csv << pred_path.generic_string() << ',' << gt_path.generic_string() << ',' << csv_row(m) << '\n';
        json row = json::parse(to_json(m));
        row["pred"] = pred_path.generic_string();
        row["gt"] = gt_path.generic_string();
        rows.push_back(row);
      }
      write_text(out_dir / "depth_metrics.csv", csv.str());
      report["depth"] = rows;
    }

    if (!views.empty()) {
      std::ostringstream csv;
      csv << "pred,target," << csv_header(ViewMetricsReport{}) << '\n';
      json rows = json::array();
      for (const auto& entry : views) {
        const fs::path pred_path = resolve(entry, "pred");
        const fs::path target_path = resolve(entry, "target");
        const ImageBuffer pred = to_rgb(read_png(pred_path));
        const ImageBuffer target = to_rgb(read_png(target_path));
        record.add_input(pred_path);
        record.add_input(target_path);
        std::optional<CropRect> region;
        if (a.crop > 0.0) region = CropRect::margin(target.size(), a.crop);
        const ViewMetricsReport m = view_metrics(pred, target, region);
        csv << pred_path.generic_string() << ',' << target_path.generic_string() << ',' << csv_row(m) << '\n';
        json row = json::parse(to_json(m));
        row["pred"] = pred_path.generic_string();
        row["target"] = target_path.generic_string();
        rows.push_back(row);
      }
      write_text(out_dir / "view_metrics.csv", csv.str());
      report["views"] = rows;
    }
  }

  if (a.synthetic) {
    SweepOptions sweep;
    sweep.scenes = a.scenes;
    sweep.plane_counts = a.plane_counts;
    sweep.seed = a.seed;
    sweep.pose = CameraPose::translate(a.tx, 0.0, 0.0);
    sweep.compare.crop_fraction = a.crop;
    spdlog::info("synthetic sweep: {} scenes", a.scenes);
    const auto rows = slicing_sweep(sweep, static_cast<std::size_t>(std::max(a.jobs, 1)));
    std::ostringstream csv;
    csv.precision(10);
    csv << "max_planes,scenes,mean_planes,adaptive_ssim,uniform_ssim,ssim_gap,adaptive_psnr,uniform_psnr\n";
    json out = json::array();
    for (const auto& r : rows) {
      const double gap = r.adaptive_ssim - r.uniform_ssim;
      csv << r.max_planes << ',' << r.scenes << ',' << r.mean_planes << ',' << r.adaptive_ssim << ','
          << r.uniform_ssim << ',' << gap << ',' << r.adaptive_psnr << ',' << r.uniform_psnr << '\n';
      out.push_back({{"max_planes", r.max_planes},
                     {"scenes", r.scenes},
                     {"mean_planes", r.mean_planes},
                     {"adaptive_ssim", r.adaptive_ssim},
                     {"uniform_ssim", r.uniform_ssim},
                     {"ssim_gap", gap},
                     {"adaptive_psnr", r.adaptive_psnr},
                     {"uniform_psnr", r.uniform_psnr}});
      spdlog::info("N={:2} planes {:5.2f} adaptive SSIM {:.4f} uniform {:.4f}", r.max_planes, r.mean_planes,
                   r.adaptive_ssim, r.uniform_ssim);
    }
    write_text(out_dir / "synthetic.csv", csv.str());
    report["synthetic"] = out;
  }

  write_text(out_dir / "report.json", report.dump(2) + "\n");
  record.write(out_dir);
}

void run_export(const ExportArgs& a, RunRecord& record) {
  const AdaptiveMpi mpi = load_mpi(a.input);
  record.add_input(a.input);
  const int band = band_for(mpi.source_dims, a.band, a.no_scale_band);
  const auto pairs = sample_training_pairs(mpi, a.count, band, a.seed);
  if (static_cast<int>(pairs.size()) < a.count) {
    spdlog::warn("only {} of {} training pairs survive a {} px erosion", pairs.size(), a.count, band);
  }
  const fs::path dir(a.output);
  fs::create_directories(dir);
  json entries = json::array();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const int k = static_cast<int>(i);
    const std::string input = numbered("pair_%04d_input.png", k);
    const std::string mask = numbered("pair_%04d_mask.png", k);
    const std::string target = numbered("pair_%04d_target.png", k);
    write_png(pairs[i].input_rgba, dir / input);
    write_png(mask_image(pairs[i].mask), dir / mask);
    write_png(pairs[i].target, dir / target);
    entries.push_back({{"input", input}, {"mask", mask}, {"target", target}, {"layer", pairs[i].layer_index}});
  }
  json index{{"band_px", band}, {"count", pairs.size()}, {"pairs", entries}, {"seed", a.seed}};
  write_text(dir / "pairs.json", index.dump(2) + "\n");
  record.write(dir);
}

}  // namespace ampi::cli
