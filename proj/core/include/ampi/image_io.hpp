#pragma once

#include <filesystem>

#include "ampi/image.hpp"

namespace ampi {

/// Decodes a PNG into [0, 1] samples. Gray files give one channel, RGB three,
/// and anything with alpha (or a tRNS chunk) four. Gray+alpha is expanded to
/// RGBA. 16-bit files keep their full precision (value / 65535).
ImageBuffer read_png(const std::filesystem::path& path);

/// Encodes a 1, 3 or 4 channel buffer. Samples are clamped to [0, 1] and
/// rounded half away from zero to the target bit depth (8 or 16).
void write_png(const ImageBuffer& img, const std::filesystem::path& path, int bit_depth = 8);

/// Portable float map. Single-channel "Pf" and three-channel "PF" are both
/// accepted; rows are stored bottom-to-top per the format.
ImageBuffer read_pfm(const std::filesystem::path& path);

/// Writes little-endian float32 with a "-1.0" scale line.
void write_pfm(const ImageBuffer& img, const std::filesystem::path& path);

/// Quantizes one sample to `levels - 1` steps, clamped, half away from zero.
int quantize_unit(double value, int max_code);

}  // namespace ampi
