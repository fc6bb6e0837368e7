#include "ampi/inpaint.hpp"

#include <random>

#include <gtest/gtest.h>

#include "ampi/error.hpp"
#include "ampi/slicer.hpp"
#include "ampi/synthetic.hpp"
#include "test_util.hpp"

namespace ampi {
namespace {

AdaptiveMpi disc_mpi(Size size, double radius) {
  const BinaryMask disc = testing::disc_mask(size, size.width / 2.0, size.height / 2.0, radius);
  const DisparityMap raw = testing::two_level(disc, 0.8, 0.2);
  std::mt19937_64 rng(99);
  const ImageBuffer image = testing::random_image(rng, size.height, size.width, 3);
  return slice_uniform(image, raw, 2).mpi;
}

ImageBuffer rgba_from_mask(const BinaryMask& m, double value) {
  ImageBuffer img(m.size(), 4);
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (!m(y, x)) continue;
      for (int c = 0; c < 3; ++c) img.at(y, x, c) = value;
      img.at(y, x, 3) = 1.0;
    }
  }
  return img;
}

// Pixels whose Chebyshev distance to `from` is at most r.
BinaryMask within(const BinaryMask& from, int r) {
  BinaryMask out(from.size());
  for (int y = 0; y < from.height(); ++y) {
    for (int x = 0; x < from.width(); ++x) {
      bool hit = false;
      for (int yy = std::max(0, y - r); yy <= std::min(from.height() - 1, y + r) && !hit; ++yy) {
        for (int xx = std::max(0, x - r); xx <= std::min(from.width() - 1, x + r); ++xx) {
          if (from(yy, xx)) {
            hit = true;
            break;
          }
        }
      }
      out.set(y, x, hit);
    }
  }
  return out;
}

TEST(ScaledBand, ReferenceAndScaling) {
  EXPECT_EQ(scaled_band_px({768, 1024}), 40);
  EXPECT_EQ(scaled_band_px({384, 512}), 20);
  EXPECT_EQ(scaled_band_px({4, 4}), 1);
}

TEST(AccumulateBackground, FullStackIsSource) {
  const AdaptiveMpi mpi = disc_mpi({40, 50}, 10);
  const ImageBuffer acc = accumulate_background(mpi, mpi.layer_count() - 1);
  for (int y = 0; y < 40; ++y) {
    for (int x = 0; x < 50; ++x) {
      EXPECT_EQ(acc.at(y, x, 3), 1.0);
      const int j = mpi.layers[1].occupancy(y, x) ? 1 : 0;
      for (int c = 0; c < 3; ++c) EXPECT_EQ(acc.at(y, x, c), mpi.layers[static_cast<std::size_t>(j)].rgba.at(y, x, c));
    }
  }
}

TEST(AccumulateBackground, FirstLayerOnlyLeavesDiscHole) {
  const AdaptiveMpi mpi = disc_mpi({40, 50}, 10);
  const ImageBuffer acc = accumulate_background(mpi, 0);
  EXPECT_EQ(acc, mpi.layers[0].rgba);
  EXPECT_EQ(threshold_mask(acc, 0.5, 3).complement(), mpi.layers[1].occupancy);
  EXPECT_THROW(accumulate_background(mpi, 2), InvalidArgument);
}

TEST(InferenceMask, EmptyOccluders) {
  BinaryMask known(10, 10);
  known.set(5, 5);
  EXPECT_FALSE(make_inference_mask(rgba_from_mask(known, 0.5), BinaryMask(10, 10), 4).any());
}

TEST(InferenceMask, HalfPlaneStrip) {
  const Size size{60, 200};
  BinaryMask left(size);
  for (int y = 0; y < 60; ++y) {
    for (int x = 0; x < 100; ++x) left.set(y, x);
  }
  const BinaryMask fill = make_inference_mask(rgba_from_mask(left, 0.5), left.complement(), 40);
  for (int y = 0; y < 60; ++y) {
    for (int x = 0; x < 200; ++x) EXPECT_EQ(fill(y, x), x >= 100 && x < 140) << y << "," << x;
  }
}

TEST(InferenceMask, EverythingKnown) {
  const BinaryMask all(8, 8, true);
  EXPECT_FALSE(make_inference_mask(rgba_from_mask(all, 0.2), all, 40).any());
}

TEST(TrainingPair, SquareErodesToCenter) {
  BinaryMask square(140, 140);
  for (int y = 20; y < 120; ++y) {
    for (int x = 20; x < 120; ++x) square.set(y, x);
  }
  const ImageBuffer layer = rgba_from_mask(square, 0.7);
  const TrainingPair p = make_training_pair(layer, 10);
  const BinaryMask input_alpha = threshold_mask(p.input_rgba, 0.5, 3);
  EXPECT_EQ(input_alpha.count(), 80u * 80u);
  EXPECT_TRUE(input_alpha(30, 30));
  EXPECT_TRUE(input_alpha(109, 109));
  EXPECT_FALSE(input_alpha(29, 50));
  EXPECT_EQ(p.mask.count(), 100u * 100u - 80u * 80u);
  EXPECT_FALSE((p.mask & input_alpha).any());
  EXPECT_EQ(p.mask | input_alpha, square);
  EXPECT_EQ(p.target, layer);
}

TEST(TrainingPair, ThinStripeIsDegenerate) {
  BinaryMask stripe(60, 60);
  for (int y = 20; y < 25; ++y) {
    for (int x = 0; x < 60; ++x) stripe.set(y, x);
  }
  EXPECT_THROW(make_training_pair(rgba_from_mask(stripe, 0.5), 10), DegenerateInput);
}

TEST(TrainingPair, SamplingIsSeeded) {
  const AdaptiveMpi mpi = disc_mpi({80, 80}, 25);
  const auto a = sample_training_pairs(mpi, 5, 4, 7);
  const auto b = sample_training_pairs(mpi, 5, 4, 7);
  ASSERT_EQ(a.size(), 5u);
  ASSERT_EQ(b.size(), 5u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].layer_index, b[i].layer_index);
    EXPECT_EQ(a[i].input_rgba, b[i].input_rgba);
  }
}

TEST(DiffuseFill, ConstantBoundary) {
  BinaryMask known(20, 20, true);
  BinaryMask hole(20, 20);
  for (int y = 5; y < 15; ++y) {
    for (int x = 3; x < 12; ++x) hole.set(y, x);
  }
  known.subtract(hole);
  ImageBuffer in = rgba_from_mask(known, 0.375);
  const ImageBuffer out = diffuse_fill({in, hole, 0});
  for (int y = 0; y < 20; ++y) {
    for (int x = 0; x < 20; ++x) {
      for (int c = 0; c < 3; ++c) EXPECT_EQ(out.at(y, x, c), 0.375);
      EXPECT_EQ(out.at(y, x, 3), 1.0);
    }
  }
}

TEST(DiffuseFill, OneDimensionalRamp) {
  ImageBuffer in(1, 11, 4);
  in.at(0, 0, 3) = 1.0;
  for (int c = 0; c < 3; ++c) in.at(0, 10, c) = 1.0;
  in.at(0, 10, 3) = 1.0;
  BinaryMask fill(1, 11);
  for (int x = 1; x < 10; ++x) fill.set(0, x);
  // The tridiagonal system u[i-1] - 2 u[i] + u[i+1] = 0 is solved by i / 10.
  const ImageBuffer tight = diffuse_fill({in, fill, 0}, {100000, 1e-13});
  for (int x = 0; x <= 10; ++x) {
    for (int c = 0; c < 3; ++c) EXPECT_NEAR(tight.at(0, x, c), x / 10.0, 1e-10);
  }
  const ImageBuffer loose = diffuse_fill({in, fill, 0});
  for (int x = 0; x <= 10; ++x) EXPECT_NEAR(loose.at(0, x, 0), x / 10.0, 5e-3);
}

TEST(DiffuseFill, MaximumPrinciple) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    ImageBuffer in = testing::random_image(rng, 30, 30, 4);
    BinaryMask fill(30, 30);
    for (auto& b : fill.bits()) b = rng() % 3 == 0;
    for (int y = 0; y < 30; ++y) {
      for (int x = 0; x < 30; ++x) in.at(y, x, 3) = fill(y, x) ? 0.0 : 1.0;
    }
    const ImageBuffer out = diffuse_fill({in, fill, 0});
    for (int c = 0; c < 3; ++c) {
      double lo = INFINITY, hi = -INFINITY;
      for (int y = 0; y < 30; ++y) {
        for (int x = 0; x < 30; ++x) {
          if (fill(y, x)) continue;
          lo = std::min(lo, in.at(y, x, c));
          hi = std::max(hi, in.at(y, x, c));
        }
      }
      for (int y = 0; y < 30; ++y) {
        for (int x = 0; x < 30; ++x) {
          if (!fill(y, x)) {
            EXPECT_EQ(out.at(y, x, c), in.at(y, x, c));
            continue;
          }
          EXPECT_GE(out.at(y, x, c), lo);
          EXPECT_LE(out.at(y, x, c), hi);
        }
      }
    }
  }
}

TEST(DiffuseFill, IsolatedComponentGetsGlobalMean) {
  ImageBuffer in(5, 5, 4);
  BinaryMask fill(5, 5);
  for (int x = 0; x < 5; ++x) {
    in.at(0, x, 0) = 0.2 * x;
    in.at(0, x, 3) = 1.0;
  }
  // Row 2 is fill but separated from row 0 by unknown, unfilled pixels.
  for (int x = 0; x < 5; ++x) fill.set(2, x);
  const ImageBuffer out = diffuse_fill({in, fill, 0});
  for (int x = 0; x < 5; ++x) EXPECT_NEAR(out.at(2, x, 0), 0.4, 1e-15);
}

TEST(InpaintMpi, SingleLayerUnchanged) {
  AdaptiveMpi mpi = disc_mpi({30, 30}, 8);
  mpi.layers.resize(1);
  mpi.layers[0].occupancy = BinaryMask(30, 30, true);
  const AdaptiveMpi out = inpaint_mpi(mpi, 40);
  EXPECT_EQ(out.layers[0].rgba, mpi.layers[0].rgba);
}

TEST(InpaintMpi, DiscBackgroundGainsBand) {
  const Size size{160, 160};
  const int band = 40;
  const AdaptiveMpi mpi = disc_mpi(size, 60);
  const AdaptiveMpi out = inpaint_mpi(mpi, band);
  const BinaryMask& disc = mpi.layers[1].occupancy;
  const BinaryMask gained = threshold_mask(out.layers[0].rgba, 0.5, 3) & disc;
  EXPECT_EQ(gained, within(mpi.layers[0].occupancy, band) & disc);
  EXPECT_TRUE(gained.any());
  EXPECT_LT(gained.count(), disc.count());

  // Originals untouched; nearest layer untouched.
  const ImageBuffer& before = mpi.layers[0].rgba;
  const ImageBuffer& after = out.layers[0].rgba;
  for (int y = 0; y < size.height; ++y) {
    for (int x = 0; x < size.width; ++x) {
      if (!mpi.layers[0].occupancy(y, x)) continue;
      for (int c = 0; c < 4; ++c) EXPECT_EQ(after.at(y, x, c), before.at(y, x, c));
    }
  }
  EXPECT_EQ(out.layers[1].rgba, mpi.layers[1].rgba);
  EXPECT_EQ(out.layers[0].occupancy, mpi.layers[0].occupancy);

  EXPECT_EQ(inpaint_mpi(out, band).layers[0].rgba, after);
}

TEST(InpaintMpi, BackendReceivesOccludedMaskOnly) {
  const AdaptiveMpi mpi = disc_mpi({60, 60}, 20);
  int calls = 0;
  const AdaptiveMpi out = inpaint_mpi(mpi, 5, [&](const InpaintTask& task) {
    ++calls;
    EXPECT_EQ(task.layer_index, 0);
    EXPECT_FALSE((task.fill_mask & mpi.layers[1].occupancy.complement()).any());
    ImageBuffer r = task.input_rgba;
    for (int y = 0; y < 60; ++y) {
      for (int x = 0; x < 60; ++x) {
        if (!task.fill_mask(y, x)) continue;
        r.at(y, x, 0) = 1.0;
        r.at(y, x, 3) = 1.0;
      }
    }
    return r;
  });
  EXPECT_EQ(calls, 1);
  EXPECT_EQ(out.layers[0].rgba.at(30, 30, 3), 0.0);
}

}  // namespace
}  // namespace ampi
