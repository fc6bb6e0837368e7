#include "ampi/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ampi/error.hpp"

namespace ampi {

namespace {

void check_shape(int height, int width, int channels) {
  if (height < 1 || width < 1) {
    throw InvalidArgument("image dimensions must be positive, got " + std::to_string(height) + "x" +
                          std::to_string(width));
  }
  if (channels < 1) {
    throw InvalidArgument("image must have at least one channel");
  }
}

void check_same_size(const BinaryMask& a, const BinaryMask& b) {
  if (a.size() != b.size()) {
    throw InvalidArgument("mask dimensions differ");
  }
}

}  // namespace

ImageBuffer::ImageBuffer(int height, int width, int channels, double fill)
    : height_(height), width_(width), channels_(channels) {
  check_shape(height, width, channels);
  samples_.assign(static_cast<std::size_t>(height) * static_cast<std::size_t>(width) *
                      static_cast<std::size_t>(channels),
                  fill);
}

ImageBuffer::ImageBuffer(int height, int width, int channels, std::vector<double> samples)
    : height_(height), width_(width), channels_(channels), samples_(std::move(samples)) {
  check_shape(height, width, channels);
  if (samples_.size() != static_cast<std::size_t>(height) * static_cast<std::size_t>(width) *
                             static_cast<std::size_t>(channels)) {
    throw InvalidArgument("sample count does not match " + std::to_string(height) + "x" + std::to_string(width) +
                          "x" + std::to_string(channels));
  }
}

ImageBuffer ImageBuffer::channel(int c) const {
  if (c < 0 || c >= channels_) {
    throw InvalidArgument("channel index out of range");
  }
  ImageBuffer out(height_, width_, 1);
  for (std::size_t i = 0; i < pixel_count(); ++i) {
    out.samples_[i] = samples_[i * static_cast<std::size_t>(channels_) + static_cast<std::size_t>(c)];
  }
  return out;
}

BinaryMask::BinaryMask(int height, int width, bool value) : height_(height), width_(width) {
  if (height < 1 || width < 1) {
    throw InvalidArgument("mask dimensions must be positive");
  }
  bits_.assign(static_cast<std::size_t>(height) * static_cast<std::size_t>(width), value ? 1 : 0);
}

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

bool BinaryMask::any() const {
  return std::any_of(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b != 0; });
}

BinaryMask BinaryMask::complement() const {
  BinaryMask out = *this;
  for (auto& b : out.bits_) b = b ? 0 : 1;
  return out;
}

BinaryMask& BinaryMask::operator&=(const BinaryMask& other) {
  check_same_size(*this, other);
  for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] = (bits_[i] && other.bits_[i]) ? 1 : 0;
  return *this;
}

BinaryMask& BinaryMask::operator|=(const BinaryMask& other) {
  check_same_size(*this, other);
  for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] = (bits_[i] || other.bits_[i]) ? 1 : 0;
  return *this;
}

BinaryMask& BinaryMask::subtract(const BinaryMask& other) {
  check_same_size(*this, other);
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (other.bits_[i]) bits_[i] = 0;
  }
  return *this;
}

ImageBuffer to_grayscale(const ImageBuffer& src) {
  if (src.channels() == 1) return src;
  if (src.channels() < 3) {
    throw InvalidArgument("grayscale conversion needs 1, 3 or 4 channels");
  }
  ImageBuffer out(src.height(), src.width(), 1);
  for (int y = 0; y < src.height(); ++y) {
    for (int x = 0; x < src.width(); ++x) {
      const double* p = src.pixel(y, x);
      out.at(y, x) = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
    }
  }
  return out;
}

ImageBuffer to_rgb(const ImageBuffer& src) {
  if (src.channels() == 3) return src;
  ImageBuffer out(src.height(), src.width(), 3);
  for (int y = 0; y < src.height(); ++y) {
    for (int x = 0; x < src.width(); ++x) {
      const double* p = src.pixel(y, x);
      double* q = out.pixel(y, x);
      if (src.channels() >= 3) {
        q[0] = p[0];
        q[1] = p[1];
        q[2] = p[2];
      } else {
        q[0] = q[1] = q[2] = p[0];
      }
    }
  }
  return out;
}

ImageBuffer flip_horizontal(const ImageBuffer& src) {
  ImageBuffer out(src.height(), src.width(), src.channels());
  const int c = src.channels();
  for (int y = 0; y < src.height(); ++y) {
    for (int x = 0; x < src.width(); ++x) {
      std::copy_n(src.pixel(y, src.width() - 1 - x), c, out.pixel(y, x));
    }
  }
  return out;
}

BinaryMask threshold_mask(const ImageBuffer& src, double threshold, int c) {
  BinaryMask out(src.height(), src.width());
  for (int y = 0; y < src.height(); ++y) {
    for (int x = 0; x < src.width(); ++x) {
      out.set(y, x, src.at(y, x, c) > threshold);
    }
  }
  return out;
}

bool all_finite(const ImageBuffer& img) {
  const auto s = img.samples();
  return std::all_of(s.begin(), s.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace ampi
