#include "ampi/metrics.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ampi/error.hpp"
#include "test_util.hpp"

namespace ampi {
namespace {

DisparityMap dmap(std::vector<double> v) {
  const int n = static_cast<int>(v.size());
  return DisparityMap::fully_valid(ImageBuffer(1, n, 1, std::move(v)));
}

// Straightforward SSIM: explicit 11x11 weights per window position.
double ssim_reference(const ImageBuffer& a, const ImageBuffer& b) {
  double g[11][11];
  double total = 0;
  for (int i = 0; i < 11; ++i) {
    for (int j = 0; j < 11; ++j) total += g[i][j] = std::exp(-((i - 5) * (i - 5) + (j - 5) * (j - 5)) / 4.5);
  }
  const double c1 = 1e-4, c2 = 9e-4;
  double acc = 0;
  for (int c = 0; c < a.channels(); ++c) {
    double sum = 0;
    int count = 0;
    for (int y = 0; y + 11 <= a.height(); ++y) {
      for (int x = 0; x + 11 <= a.width(); ++x) {
        double ma = 0, mb = 0;
        for (int i = 0; i < 11; ++i) {
          for (int j = 0; j < 11; ++j) {
            ma += g[i][j] / total * a.at(y + i, x + j, c);
            mb += g[i][j] / total * b.at(y + i, x + j, c);
          }
        }
        double va = 0, vb = 0, cov = 0;
        for (int i = 0; i < 11; ++i) {
          for (int j = 0; j < 11; ++j) {
            const double da = a.at(y + i, x + j, c) - ma;
            const double db = b.at(y + i, x + j, c) - mb;
            va += g[i][j] / total * da * da;
            vb += g[i][j] / total * db * db;
            cov += g[i][j] / total * da * db;
          }
        }
        sum += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
        ++count;
      }
    }
    acc += sum / count;
  }
  return acc / a.channels();
}

// Independent multi-scale gradient loss.
double loss_grad_reference(const ImageBuffer& pred, const ImageBuffer& target) {
  const int h = (pred.height() + 7) / 8 * 8;
  const int w = (pred.width() + 7) / 8 * 8;
  std::vector<std::vector<double>> r(static_cast<std::size_t>(h), std::vector<double>(static_cast<std::size_t>(w)));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int sy = std::min(y, pred.height() - 1), sx = std::min(x, pred.width() - 1);
      r[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)] = pred.at(sy, sx) - target.at(sy, sx);
    }
  }
  double total = 0;
  for (int s = 0; s < 4; ++s) {
    const int hh = static_cast<int>(r.size()), ww = static_cast<int>(r[0].size());
    double sum = 0;
    for (int y = 0; y < hh; ++y) {
      for (int x = 0; x < ww; ++x) {
        const double v = r[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)];
        if (x + 1 < ww) sum += std::abs(r[static_cast<std::size_t>(y)][static_cast<std::size_t>(x) + 1] - v);
        if (y + 1 < hh) sum += std::abs(r[static_cast<std::size_t>(y) + 1][static_cast<std::size_t>(x)] - v);
      }
    }
    total += sum / (hh * ww);
    std::vector<std::vector<double>> next(static_cast<std::size_t>(hh / 2), std::vector<double>(static_cast<std::size_t>(ww / 2)));
    for (int y = 0; y < hh / 2; ++y) {
      for (int x = 0; x < ww / 2; ++x) {
        const auto yy = static_cast<std::size_t>(2 * y), xx = static_cast<std::size_t>(2 * x);
        next[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)] =
            0.25 * (r[yy][xx] + r[yy][xx + 1] + r[yy + 1][xx] + r[yy + 1][xx + 1]);
      }
    }
    r = std::move(next);
  }
  return total;
}

TEST(Align, IdentityAndAffine) {
  const DisparityMap gt = dmap({1, 4, 2, 8, 5});
  const DisparityMap same = align_median_std(gt, gt);
  EXPECT_LT(testing::max_abs_diff(same.raster, gt.raster), 1e-12);
  DisparityMap pred = gt;
  for (double& v : pred.raster.samples()) v = 2 * v + 5;
  EXPECT_LT(testing::max_abs_diff(align_median_std(pred, gt).raster, gt.raster), 1e-9);
}

TEST(Align, HandComputed) {
  // Median 2 and 20, population std sqrt(2/3) and 10 sqrt(2/3).
  const DisparityMap a = align_median_std(dmap({1, 2, 3}), dmap({10, 20, 30}));
  EXPECT_NEAR(a.raster.at(0, 0), 10, 1e-12);
  EXPECT_NEAR(a.raster.at(0, 1), 20, 1e-12);
  EXPECT_NEAR(a.raster.at(0, 2), 30, 1e-12);
}

TEST(Align, EvenCountMedianAndValidity) {
  DisparityMap pred = dmap({1, 2, 3, 4, 100});
  pred.validity.set(0, 4, false);
  const DisparityMap a = align_median_std(pred, dmap({2, 4, 6, 8, 1}));
  EXPECT_NEAR(a.raster.at(0, 0), 2, 1e-12);
  EXPECT_NEAR(a.raster.at(0, 3), 8, 1e-12);
}

TEST(Align, RandomAffineAndIdempotence) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    const DisparityMap gt = DisparityMap::fully_valid(testing::random_image(rng, 7, 9, 1, 0.1, 2.0));
    DisparityMap pred = gt;
    const double s = u(rng), o = u(rng);
    for (double& v : pred.raster.samples()) v = s * v + o;
    const DisparityMap aligned = align_median_std(pred, gt);
    EXPECT_LT(testing::max_abs_diff(aligned.raster, gt.raster), 1e-9);
    EXPECT_LT(testing::max_abs_diff(align_median_std(aligned, gt).raster, aligned.raster), 1e-9);
  }
}

TEST(Align, Degenerate) {
  EXPECT_THROW(align_median_std(dmap({1}), dmap({2})), DegenerateInput);
  EXPECT_THROW(align_median_std(dmap({1, 1, 1}), dmap({1, 2, 3})), DegenerateInput);
}

TEST(DepthMetrics, Identity) {
  const DisparityMap g = dmap({0.5, 1, 2});
  const DepthMetricsReport r = depth_metrics(g, g);
  EXPECT_EQ(r.delta_1, 1.0);
  EXPECT_EQ(r.delta_2, 1.0);
  EXPECT_EQ(r.delta_3, 1.0);
  EXPECT_EQ(r.rmse, 0.0);
  EXPECT_EQ(r.rel, 0.0);
}

TEST(DepthMetrics, ThresholdArithmetic) {
  const DepthMetricsReport r = depth_metrics(dmap({1.3, 2.6, 3.9}), dmap({1, 2, 3}));
  EXPECT_EQ(r.delta_1, 0.0);
  EXPECT_EQ(r.delta_2, 1.0);
  EXPECT_EQ(r.delta_3, 1.0);
}

TEST(DepthMetrics, SinglePixel) {
  // 1.25^3 = 1.953125 < 2.
  const DepthMetricsReport r = depth_metrics(dmap({2}), dmap({1}));
  EXPECT_EQ(r.rmse, 1.0);
  EXPECT_EQ(r.rel, 1.0);
  EXPECT_EQ(r.delta_1, 0.0);
  EXPECT_EQ(r.delta_3, 0.0);
}

TEST(DepthMetrics, ThreePixelFixture) {
  // Ratios 1, 1.3, 2 and 1/0.5 = 2.
  const DepthMetricsReport r = depth_metrics(dmap({1.0, 1.3, 2.0}), dmap({1, 1, 1}));
  EXPECT_DOUBLE_EQ(r.delta_1, 1.0 / 3);
  EXPECT_DOUBLE_EQ(r.delta_2, 2.0 / 3);
  EXPECT_DOUBLE_EQ(r.delta_3, 2.0 / 3);
  EXPECT_DOUBLE_EQ(r.rmse, std::sqrt((0.0 + 0.3 * 0.3 + 1.0) / 3));
  EXPECT_DOUBLE_EQ(r.rel, (0.0 + 0.3 + 1.0) / 3);
  const DepthMetricsReport s = depth_metrics(dmap({1.0, 0.5, 4.0}), dmap({1, 1, 3}));
  EXPECT_DOUBLE_EQ(s.delta_1, 1.0 / 3);
  EXPECT_DOUBLE_EQ(s.delta_2, 2.0 / 3);
  EXPECT_DOUBLE_EQ(s.delta_3, 2.0 / 3);
  EXPECT_DOUBLE_EQ(s.rmse, std::sqrt((0.0 + 0.25 + 1.0) / 3));
  EXPECT_DOUBLE_EQ(s.rel, (0.0 + 0.5 + 1.0 / 3) / 3);
}

TEST(DepthMetrics, MonotoneInK) {
  std::mt19937_64 rng(2);
  const DisparityMap a = DisparityMap::fully_valid(testing::random_image(rng, 10, 10, 1, 0.1, 1));
  const DisparityMap b = DisparityMap::fully_valid(testing::random_image(rng, 10, 10, 1, 0.1, 1));
  const DepthMetricsReport r = depth_metrics(a, b);
  EXPECT_LE(r.delta_1, r.delta_2);
  EXPECT_LE(r.delta_2, r.delta_3);
}

TEST(DepthMetrics, AffineInvarianceAfterAlignment) {
  std::mt19937_64 rng(3);
  const DisparityMap gt = DisparityMap::fully_valid(testing::random_image(rng, 8, 8, 1, 0.2, 1));
  const DisparityMap pred = DisparityMap::fully_valid(testing::random_image(rng, 8, 8, 1, 0.2, 1));
  DisparityMap moved = pred;
  for (double& v : moved.raster.samples()) v = 3.5 * v + 0.25;
  const DepthMetricsReport r1 = depth_metrics(align_median_std(pred, gt), gt);
  const DepthMetricsReport r2 = depth_metrics(align_median_std(moved, gt), gt);
  EXPECT_EQ(r1.delta_1, r2.delta_1);
  EXPECT_NEAR(r1.rmse, r2.rmse, 1e-12);
  EXPECT_NEAR(r1.rel, r2.rel, 1e-12);
}

TEST(DepthMetrics, NoJointPixels) {
  DisparityMap a = dmap({1, 2});
  a.validity = BinaryMask(1, 2);
  EXPECT_THROW(depth_metrics(a, dmap({1, 2})), DegenerateInput);
}

TEST(Losses, Data) {
  const ImageBuffer t(2, 2, 1, 0.25);
  EXPECT_EQ(loss_data(t, t), 0.0);
  EXPECT_EQ(loss_data(ImageBuffer(2, 2, 1, 0.75), t), 0.5);
  EXPECT_EQ(loss_data(ImageBuffer(1, 2, 1, std::vector<double>{0, 1}), ImageBuffer(1, 2, 1, 1.0)), 0.5);
  EXPECT_THROW(loss_data(t, ImageBuffer(2, 3, 1)), InvalidArgument);
}

TEST(Losses, GradientIgnoresConstants) {
  std::mt19937_64 rng(4);
  const ImageBuffer t = testing::random_image(rng, 13, 21, 1);
  ImageBuffer p = t;
  EXPECT_EQ(loss_grad(p, t), 0.0);
  for (double& v : p.samples()) v += 3.0;
  EXPECT_NEAR(loss_grad(p, t), 0.0, 1e-12);
}

TEST(Losses, GradientOfRamp) {
  // Residual x on a 16 wide frame. Pooling doubles the per-pixel slope and
  // halves the width; the zero last column costs one pixel per row:
  // 15/16 * 1 + 7/8 * 2 + 3/4 * 4 + 1/2 * 8.
  ImageBuffer p(8, 16, 1);
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 16; ++x) p.at(y, x) = x;
  }
  const ImageBuffer t(8, 16, 1);
  EXPECT_DOUBLE_EQ(loss_grad(p, t), 15.0 / 16 + 1.75 + 3.0 + 4.0);
  EXPECT_DOUBLE_EQ(loss_grad(p, t), loss_grad_reference(p, t));
}

TEST(Losses, GradientMatchesReference) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    const int h = 5 + static_cast<int>(rng() % 30), w = 5 + static_cast<int>(rng() % 30);
    const ImageBuffer a = testing::random_image(rng, h, w, 1, 0, 10);
    const ImageBuffer b = testing::random_image(rng, h, w, 1, 0, 10);
    EXPECT_NEAR(loss_grad(a, b), loss_grad_reference(a, b), 1e-9);
  }
}

TEST(Losses, DepthCombination) {
  std::mt19937_64 rng(6);
  const ImageBuffer a = testing::random_image(rng, 16, 16, 1, 0, 10);
  const ImageBuffer b = testing::random_image(rng, 16, 16, 1, 0, 10);
  EXPECT_EQ(loss_depth(a, a), 0.0);
  EXPECT_EQ(loss_depth(a, b, 0.0), loss_data(a, b));
  EXPECT_DOUBLE_EQ(loss_depth(a, b), loss_data(a, b) + 0.5 * loss_grad(a, b));
}

TEST(Ssim, IdentityIsExactlyOne) {
  std::mt19937_64 rng(7);
  const ImageBuffer a = testing::random_image(rng, 32, 40, 3);
  EXPECT_EQ(ssim(a, a), 1.0);
  EXPECT_EQ(ssim(a, a, CropRect::margin(a.size(), 0.05)), 1.0);
}

TEST(Ssim, InvertedIsWorse) {
  const ImageBuffer a = [] {
    ImageBuffer img(30, 30, 3);
    for (int y = 0; y < 30; ++y) {
      for (int x = 0; x < 30; ++x) {
        for (int c = 0; c < 3; ++c) img.at(y, x, c) = 0.5 + 0.25 * std::sin(0.3 * x + 0.2 * y + c);
      }
    }
    return img;
  }();
  ImageBuffer inv = a;
  for (double& v : inv.samples()) v = 1.0 - v;
  EXPECT_LT(ssim(a, inv), ssim(a, a));
}

TEST(Ssim, MatchesReferenceOnNoisePairs) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> noise(0.0, 0.05);
  for (int trial = 0; trial < 3; ++trial) {
    const ImageBuffer a = testing::random_image(rng, 24, 28, 3);
    ImageBuffer b = a;
    for (double& v : b.samples()) v = std::clamp(v + noise(rng), 0.0, 1.0);
    EXPECT_NEAR(ssim(a, b), ssim_reference(a, b), 1e-6);
  }
}

TEST(Ssim, SmallFrameFallsBackToGlobalStatistics) {
  const ImageBuffer a(4, 4, 1, std::vector<double>{0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1, 0.9, 0.8, 0.7, 0.6, 0.5});
  ImageBuffer b = a;
  for (double& v : b.samples()) v = 0.5 * v + 0.1;
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < 16; ++i) {
    ma += a.samples()[i] / 16;
    mb += b.samples()[i] / 16;
  }
  double va = 0, vb = 0, cv = 0;
  for (std::size_t i = 0; i < 16; ++i) {
    va += (a.samples()[i] - ma) * (a.samples()[i] - ma) / 16;
    vb += (b.samples()[i] - mb) * (b.samples()[i] - mb) / 16;
    cv += (a.samples()[i] - ma) * (b.samples()[i] - mb) / 16;
  }
  const double expected = ((2 * ma * mb + 1e-4) * (2 * cv + 9e-4)) / ((ma * ma + mb * mb + 1e-4) * (va + vb + 9e-4));
  EXPECT_NEAR(ssim(a, b), expected, 1e-12);
}

TEST(Psnr, Cases) {
  const ImageBuffer a(4, 4, 3, 0.5);
  EXPECT_EQ(psnr(a, a), kPsnrCap);
  EXPECT_NEAR(psnr(a, ImageBuffer(4, 4, 3, 0.6)), 20.0, 1e-9);
  ImageBuffer half = a;
  for (int y = 0; y < 2; ++y) {
    for (int x = 0; x < 4; ++x) {
      for (int c = 0; c < 3; ++c) half.at(y, x, c) = 0.0;
    }
  }
  EXPECT_NEAR(psnr(a, half), 10.0 * std::log10(8.0), 1e-12);
  EXPECT_NEAR(psnr(a, half), 9.031, 5e-4);
}

TEST(Psnr, DecreasesWithNoise) {
  std::mt19937_64 rng(9);
  const ImageBuffer a = testing::random_image(rng, 16, 16, 3, 0.2, 0.8);
  double prev = kPsnrCap + 1;
  for (double amp : {0.01, 0.02, 0.05, 0.1}) {
    ImageBuffer b = a;
    std::uniform_real_distribution<double> u(-amp, amp);
    std::mt19937_64 local(1);
    for (double& v : b.samples()) v += u(local);
    const double p = psnr(a, b);
    EXPECT_LT(p, prev);
    prev = p;
  }
}

TEST(Crop, MarginAndBounds) {
  const CropRect r = CropRect::margin({100, 200}, 0.05);
  EXPECT_EQ(r.top, 5);
  EXPECT_EQ(r.left, 10);
  EXPECT_EQ(r.height, 90);
  EXPECT_EQ(r.width, 180);
  EXPECT_THROW(crop(ImageBuffer(10, 10, 1), {5, 5, 6, 2}), InvalidArgument);
}

TEST(Reports, Serialization) {
  const DepthMetricsReport d{1, 1, 1, 0, 0};
  EXPECT_EQ(csv_header(d), "delta_1,delta_2,delta_3,rmse,rel");
  EXPECT_NE(to_json(d).find("\"delta_1\""), std::string::npos);
  EXPECT_EQ(csv_header(ViewMetricsReport{}), "ssim,psnr");
  EXPECT_EQ(csv_row(ViewMetricsReport{1, 99}), "1,99");
}

}  // namespace
}  // namespace ampi
