#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ampi {

struct Size {
  int height = 0;
  int width = 0;

  std::size_t area() const { return static_cast<std::size_t>(height) * static_cast<std::size_t>(width); }
  friend bool operator==(const Size&, const Size&) = default;
};

/// H x W x C raster of doubles, row-major with interleaved channels.
///
/// Color data is nominally in [0, 1]; disparity rasters are unbounded. A
/// default-constructed buffer is empty and only useful as a placeholder.
class ImageBuffer {
 public:
  ImageBuffer() = default;
  ImageBuffer(int height, int width, int channels, double fill = 0.0);
  ImageBuffer(Size size, int channels, double fill = 0.0) : ImageBuffer(size.height, size.width, channels, fill) {}
  ImageBuffer(int height, int width, int channels, std::vector<double> samples);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }
  Size size() const { return {height_, width_}; }
  bool empty() const { return samples_.empty(); }
  std::size_t pixel_count() const { return size().area(); }

  double& at(int y, int x, int c = 0) { return samples_[index(y, x, c)]; }
  double at(int y, int x, int c = 0) const { return samples_[index(y, x, c)]; }

  double* pixel(int y, int x) { return samples_.data() + index(y, x, 0); }
  const double* pixel(int y, int x) const { return samples_.data() + index(y, x, 0); }

  std::span<double> samples() { return samples_; }
  std::span<const double> samples() const { return samples_; }

  bool same_shape(const ImageBuffer& other) const {
    return height_ == other.height_ && width_ == other.width_ && channels_ == other.channels_;
  }

  /// Copy of one channel as a single-channel buffer.
  ImageBuffer channel(int c) const;

  friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

 private:
  std::size_t index(int y, int x, int c) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)) *
               static_cast<std::size_t>(channels_) +
           static_cast<std::size_t>(c);
  }

  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<double> samples_;
};

/// One boolean per pixel.
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int height, int width, bool value = false);
  explicit BinaryMask(Size size, bool value = false) : BinaryMask(size.height, size.width, value) {}

  int height() const { return height_; }
  int width() const { return width_; }
  Size size() const { return {height_, width_}; }
  bool empty() const { return bits_.empty(); }

  bool operator()(int y, int x) const { return bits_[index(y, x)] != 0; }
  void set(int y, int x, bool value = true) { bits_[index(y, x)] = value ? 1 : 0; }

  std::span<std::uint8_t> bits() { return bits_; }
  std::span<const std::uint8_t> bits() const { return bits_; }

  std::size_t count() const;
  bool any() const;

  BinaryMask complement() const;
  BinaryMask& operator&=(const BinaryMask& other);
  BinaryMask& operator|=(const BinaryMask& other);
  /// Clears every pixel set in `other`.
  BinaryMask& subtract(const BinaryMask& other);

  friend BinaryMask operator&(BinaryMask a, const BinaryMask& b) { return a &= b; }
  friend BinaryMask operator|(BinaryMask a, const BinaryMask& b) { return a |= b; }
  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  std::size_t index(int y, int x) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int height_ = 0;
  int width_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// Rec. 601 luma of an RGB(A) buffer; single-channel input is copied.
ImageBuffer to_grayscale(const ImageBuffer& src);

/// Drops alpha / replicates gray so the result has exactly three channels.
ImageBuffer to_rgb(const ImageBuffer& src);

ImageBuffer flip_horizontal(const ImageBuffer& src);

/// Pixels whose channel `c` exceeds `threshold`.
BinaryMask threshold_mask(const ImageBuffer& src, double threshold, int c = 0);

/// True when every sample is finite.
bool all_finite(const ImageBuffer& img);

}  // namespace ampi
