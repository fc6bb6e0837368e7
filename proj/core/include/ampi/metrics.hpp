#pragma once

#include <optional>
#include <string>

#include "ampi/depthprep.hpp"
#include "ampi/image.hpp"

namespace ampi {

struct CropRect {
  int top = 0;
  int left = 0;
  int height = 0;
  int width = 0;

  /// Removes `fraction` of each dimension from every side.
  static CropRect margin(Size frame, double fraction);
};

struct DepthMetricsReport {
  double delta_1 = 0;
  double delta_2 = 0;
  double delta_3 = 0;
  double rmse = 0;
  double rel = 0;
};

struct ViewMetricsReport {
  double ssim = 0;
  double psnr = 0;
};

inline constexpr double kPsnrCap = 99.0;

/// pred' = (pred - median(pred)) / std(pred) * std(gt) + median(gt), the
/// statistics taken over jointly valid pixels (population std). Throws
/// DegenerateInput for fewer than two joint pixels or zero spread.
DisparityMap align_median_std(const DisparityMap& pred, const DisparityMap& gt);

/// Threshold accuracies, RMSE and absolute relative error over jointly
/// valid pixels. Ratios clamp both values at 1e-6.
DepthMetricsReport depth_metrics(const DisparityMap& pred_aligned, const DisparityMap& gt);

/// Mean absolute difference.
double loss_data(const ImageBuffer& pred, const ImageBuffer& target);

/// Multi-scale gradient matching: sum over scales s = 0..3 of
/// mean(|dx r_s| + |dy r_s|), with r_s the residual after s rounds of 2x2
/// mean pooling and forward differences (zero on the last row/column).
/// Inputs are replicate-padded to a multiple of 8 first.
double loss_grad(const ImageBuffer& pred, const ImageBuffer& target);

double loss_depth(const ImageBuffer& pred, const ImageBuffer& target, double alpha = 0.5);

/// Mean SSIM with an 11x11 Gaussian window (sigma 1.5), C1 = 0.01^2,
/// C2 = 0.03^2, over valid window positions and averaged across channels.
/// Frames smaller than the window fall back to global statistics.
double ssim(const ImageBuffer& a, const ImageBuffer& b, std::optional<CropRect> crop = std::nullopt);

/// 10 log10(1 / MSE) for peak 1; kPsnrCap when MSE is zero.
double psnr(const ImageBuffer& a, const ImageBuffer& b, std::optional<CropRect> crop = std::nullopt);

ViewMetricsReport view_metrics(const ImageBuffer& a, const ImageBuffer& b, std::optional<CropRect> crop = std::nullopt);

ImageBuffer crop(const ImageBuffer& img, const CropRect& rect);

std::string to_json(const DepthMetricsReport& r);
std::string to_json(const ViewMetricsReport& r);
std::string csv_header(const DepthMetricsReport&);
std::string csv_row(const DepthMetricsReport& r);
std::string csv_header(const ViewMetricsReport&);
std::string csv_row(const ViewMetricsReport& r);

}  // namespace ampi
