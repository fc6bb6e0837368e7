#include "ampi/metrics.hpp"

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "ampi/error.hpp"

namespace ampi {

namespace {

constexpr int kSsimWindow = 11;
constexpr double kSsimSigma = 1.5;
constexpr double kSsimC1 = 0.01 * 0.01;
constexpr double kSsimC2 = 0.03 * 0.03;
constexpr double kRatioFloor = 1e-6;

void require_same_shape(const ImageBuffer& a, const ImageBuffer& b, const char* op) {
  if (!a.same_shape(b)) {
    throw InvalidArgument(std::string(op) + ": inputs differ in shape");
  }
}

double median_of(std::vector<double> v) {
  const std::size_t n = v.size();
  std::sort(v.begin(), v.end());
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double population_std(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  return std::sqrt(var / static_cast<double>(v.size()));
}

std::array<double, kSsimWindow> gaussian_taps() {
  std::array<double, kSsimWindow> taps{};
  double sum = 0.0;
  for (int i = 0; i < kSsimWindow; ++i) {
    const double d = i - kSsimWindow / 2;
    taps[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * kSsimSigma * kSsimSigma));
    sum += taps[static_cast<std::size_t>(i)];
  }
  for (double& t : taps) t /= sum;
  return taps;
}

// "Valid" separable filtering: output is (h - 10) x (w - 10).
std::vector<double> filter_valid(const std::vector<double>& src, int h, int w,
                                 const std::array<double, kSsimWindow>& taps) {
  const int ow = w - kSsimWindow + 1;
  const int oh = h - kSsimWindow + 1;
  std::vector<double> tmp(static_cast<std::size_t>(h) * static_cast<std::size_t>(ow));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kSsimWindow; ++k) {
        acc += taps[static_cast<std::size_t>(k)] * src[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) +
                                                       static_cast<std::size_t>(x + k)];
      }
      tmp[static_cast<std::size_t>(y) * static_cast<std::size_t>(ow) + static_cast<std::size_t>(x)] = acc;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(oh) * static_cast<std::size_t>(ow));
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kSsimWindow; ++k) {
        acc += taps[static_cast<std::size_t>(k)] * tmp[static_cast<std::size_t>(y + k) * static_cast<std::size_t>(ow) +
                                                       static_cast<std::size_t>(x)];
      }
      out[static_cast<std::size_t>(y) * static_cast<std::size_t>(ow) + static_cast<std::size_t>(x)] = acc;
    }
  }
  return out;
}

double ssim_index(double mu_a, double mu_b, double var_a, double var_b, double cov) {
  return ((2.0 * mu_a * mu_b + kSsimC1) * (2.0 * cov + kSsimC2)) /
         ((mu_a * mu_a + mu_b * mu_b + kSsimC1) * (var_a + var_b + kSsimC2));
}

double ssim_channel(const ImageBuffer& a, const ImageBuffer& b, int c) {
  const int h = a.height();
  const int w = a.width();
  const std::size_t n = a.pixel_count();
  std::vector<double> va(n), vb(n);
  for (std::size_t i = 0; i < n; ++i) {
    va[i] = a.samples()[i * static_cast<std::size_t>(a.channels()) + static_cast<std::size_t>(c)];
    vb[i] = b.samples()[i * static_cast<std::size_t>(b.channels()) + static_cast<std::size_t>(c)];
  }
  if (h < kSsimWindow || w < kSsimWindow) {
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      ma += va[i];
      mb += vb[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double saa = 0.0, sbb = 0.0, sab = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      saa += (va[i] - ma) * (va[i] - ma);
      sbb += (vb[i] - mb) * (vb[i] - mb);
      sab += (va[i] - ma) * (vb[i] - mb);
    }
    const auto nn = static_cast<double>(n);
    return ssim_index(ma, mb, saa / nn, sbb / nn, sab / nn);
  }
  const auto taps = gaussian_taps();
  std::vector<double> aa(n), bb(n), ab(n);
  for (std::size_t i = 0; i < n; ++i) {
    aa[i] = va[i] * va[i];
    bb[i] = vb[i] * vb[i];
    ab[i] = va[i] * vb[i];
  }
  const auto mu_a = filter_valid(va, h, w, taps);
  const auto mu_b = filter_valid(vb, h, w, taps);
  const auto e_aa = filter_valid(aa, h, w, taps);
  const auto e_bb = filter_valid(bb, h, w, taps);
  const auto e_ab = filter_valid(ab, h, w, taps);
  double sum = 0.0;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    const double ma = mu_a[i];
    const double mb = mu_b[i];
    sum += ssim_index(ma, mb, e_aa[i] - ma * ma, e_bb[i] - mb * mb, e_ab[i] - ma * mb);
  }
  return sum / static_cast<double>(mu_a.size());
}

// Forward differences with a zero last column/row, summed as |dx| + |dy|.
double gradient_l1_mean(const std::vector<double>& r, int h, int w, int c) {
  double sum = 0.0;
  const auto at = [&](int y, int x, int k) {
    return r[(static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)) *
                 static_cast<std::size_t>(c) +
             static_cast<std::size_t>(k)];
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int k = 0; k < c; ++k) {
        const double v = at(y, x, k);
        const double dx = x + 1 < w ? at(y, x + 1, k) - v : 0.0;
        const double dy = y + 1 < h ? at(y + 1, x, k) - v : 0.0;
        sum += std::abs(dx) + std::abs(dy);
      }
    }
  }
  return sum / (static_cast<double>(h) * w * c);
}

}  // namespace

CropRect CropRect::margin(Size frame, double fraction) {
  const int top = static_cast<int>(std::floor(frame.height * fraction));
  const int left = static_cast<int>(std::floor(frame.width * fraction));
  return {top, left, std::max(1, frame.height - 2 * top), std::max(1, frame.width - 2 * left)};
}

ImageBuffer crop(const ImageBuffer& img, const CropRect& r) {
  if (r.top < 0 || r.left < 0 || r.height < 1 || r.width < 1 || r.top + r.height > img.height() ||
      r.left + r.width > img.width()) {
    throw InvalidArgument("crop rectangle exceeds the image");
  }
  ImageBuffer out(r.height, r.width, img.channels());
  for (int y = 0; y < r.height; ++y) {
    std::copy_n(img.pixel(r.top + y, r.left), static_cast<std::size_t>(r.width) * static_cast<std::size_t>(img.channels()),
                out.pixel(y, 0));
  }
  return out;
}

DisparityMap align_median_std(const DisparityMap& pred, const DisparityMap& gt) {
  if (pred.size() != gt.size()) {
    throw InvalidArgument("align_median_std: prediction and ground truth differ in size");
  }
  std::vector<double> p, g;
  for (int y = 0; y < pred.raster.height(); ++y) {
    for (int x = 0; x < pred.raster.width(); ++x) {
      if (!pred.validity(y, x) || !gt.validity(y, x)) continue;
      p.push_back(pred.raster.at(y, x));
      g.push_back(gt.raster.at(y, x));
    }
  }
  if (p.size() < 2) {
    throw DegenerateInput("align_median_std needs at least two jointly valid pixels");
  }
  const double sp = population_std(p);
  if (!(sp > 0.0)) {
    throw DegenerateInput("prediction has zero spread over the jointly valid pixels");
  }
  const double sg = population_std(g);
  const double mp = median_of(p);
  const double mg = median_of(g);
  DisparityMap out = pred;
  for (double& v : out.raster.samples()) v = (v - mp) / sp * sg + mg;
  return out;
}

DepthMetricsReport depth_metrics(const DisparityMap& pred, const DisparityMap& gt) {
  if (pred.size() != gt.size()) {
    throw InvalidArgument("depth_metrics: prediction and ground truth differ in size");
  }
  std::size_t n = 0;
  std::array<std::size_t, 3> hits{};
  double sq = 0.0;
  double rel = 0.0;
  for (int y = 0; y < pred.raster.height(); ++y) {
    for (int x = 0; x < pred.raster.width(); ++x) {
      if (!pred.validity(y, x) || !gt.validity(y, x)) continue;
      const double pv = pred.raster.at(y, x);
      const double gv = gt.raster.at(y, x);
      const double pc = std::max(pv, kRatioFloor);
      const double gc = std::max(gv, kRatioFloor);
      const double ratio = std::max(pc / gc, gc / pc);
      double threshold = 1.25;
      for (auto& hcount : hits) {
        if (ratio < threshold) ++hcount;
        threshold *= 1.25;
      }
      sq += (pv - gv) * (pv - gv);
      rel += std::abs(pv - gv) / gc;
      ++n;
    }
  }
  if (n == 0) {
    throw DegenerateInput("depth_metrics: no jointly valid pixels");
  }
  const auto nn = static_cast<double>(n);
  return {hits[0] / nn, hits[1] / nn, hits[2] / nn, std::sqrt(sq / nn), rel / nn};
}

double loss_data(const ImageBuffer& pred, const ImageBuffer& target) {
  require_same_shape(pred, target, "loss_data");
  const auto p = pred.samples();
  const auto t = target.samples();
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += std::abs(p[i] - t[i]);
  return sum / static_cast<double>(p.size());
}

double loss_grad(const ImageBuffer& pred, const ImageBuffer& target) {
  require_same_shape(pred, target, "loss_grad");
  const int c = pred.channels();
  int h = (pred.height() + 7) / 8 * 8;
  int w = (pred.width() + 7) / 8 * 8;
  std::vector<double> r(static_cast<std::size_t>(h) * static_cast<std::size_t>(w) * static_cast<std::size_t>(c));
  for (int y = 0; y < h; ++y) {
    const int sy = std::min(y, pred.height() - 1);
    for (int x = 0; x < w; ++x) {
      const int sx = std::min(x, pred.width() - 1);
      for (int k = 0; k < c; ++k) {
        r[(static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)) *
              static_cast<std::size_t>(c) +
          static_cast<std::size_t>(k)] = pred.at(sy, sx, k) - target.at(sy, sx, k);
      }
    }
  }
  double total = 0.0;
  for (int s = 0; s < 4; ++s) {
    total += gradient_l1_mean(r, h, w, c);
    if (s == 3) break;
    const int nh = h / 2;
    const int nw = w / 2;
    std::vector<double> pooled(static_cast<std::size_t>(nh) * static_cast<std::size_t>(nw) * static_cast<std::size_t>(c));
    for (int y = 0; y < nh; ++y) {
      for (int x = 0; x < nw; ++x) {
        for (int k = 0; k < c; ++k) {
          const auto at = [&](int yy, int xx) {
            return r[(static_cast<std::size_t>(yy) * static_cast<std::size_t>(w) + static_cast<std::size_t>(xx)) *
                         static_cast<std::size_t>(c) +
                     static_cast<std::size_t>(k)];
          };
          pooled[(static_cast<std::size_t>(y) * static_cast<std::size_t>(nw) + static_cast<std::size_t>(x)) *
                     static_cast<std::size_t>(c) +
                 static_cast<std::size_t>(k)] =
              0.25 * (at(2 * y, 2 * x) + at(2 * y, 2 * x + 1) + at(2 * y + 1, 2 * x) + at(2 * y + 1, 2 * x + 1));
        }
      }
    }
    r = std::move(pooled);
    h = nh;
    w = nw;
  }
  return total;
}

double loss_depth(const ImageBuffer& pred, const ImageBuffer& target, double alpha) {
  return loss_data(pred, target) + alpha * loss_grad(pred, target);
}

double ssim(const ImageBuffer& a, const ImageBuffer& b, std::optional<CropRect> region) {
  require_same_shape(a, b, "ssim");
  const ImageBuffer ca = region ? crop(a, *region) : a;
  const ImageBuffer cb = region ? crop(b, *region) : b;
  if (ca.height() < kSsimWindow || ca.width() < kSsimWindow) {
    spdlog::warn("ssim: {}x{} is smaller than the {}x{} window; using global statistics", ca.height(), ca.width(),
                 kSsimWindow, kSsimWindow);
  }
  double sum = 0.0;
  for (int c = 0; c < ca.channels(); ++c) sum += ssim_channel(ca, cb, c);
  return sum / ca.channels();
}

double psnr(const ImageBuffer& a, const ImageBuffer& b, std::optional<CropRect> region) {
  require_same_shape(a, b, "psnr");
  const ImageBuffer ca = region ? crop(a, *region) : a;
  const ImageBuffer cb = region ? crop(b, *region) : b;
  const auto pa = ca.samples();
  const auto pb = cb.samples();
  double mse = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i) mse += (pa[i] - pb[i]) * (pa[i] - pb[i]);
  mse /= static_cast<double>(pa.size());
  if (mse == 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(1.0 / mse));
}

ViewMetricsReport view_metrics(const ImageBuffer& a, const ImageBuffer& b, std::optional<CropRect> region) {
  return {ssim(a, b, region), psnr(a, b, region)};
}

std::string to_json(const DepthMetricsReport& r) {
  return nlohmann::json{{"delta_1", r.delta_1}, {"delta_2", r.delta_2}, {"delta_3", r.delta_3},
                        {"rmse", r.rmse},       {"rel", r.rel}}
      .dump();
}

std::string to_json(const ViewMetricsReport& r) { return nlohmann::json{{"ssim", r.ssim}, {"psnr", r.psnr}}.dump(); }

std::string csv_header(const DepthMetricsReport&) { return "delta_1,delta_2,delta_3,rmse,rel"; }

std::string csv_row(const DepthMetricsReport& r) {
  std::ostringstream out;
  out.precision(10);
  out << r.delta_1 << ',' << r.delta_2 << ',' << r.delta_3 << ',' << r.rmse << ',' << r.rel;
  return out.str();
}

std::string csv_header(const ViewMetricsReport&) { return "ssim,psnr"; }

std::string csv_row(const ViewMetricsReport& r) {
  std::ostringstream out;
  out.precision(10);
  out << r.ssim << ',' << r.psnr;
  return out.str();
}

}  // namespace ampi
