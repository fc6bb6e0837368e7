#include "ampi/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "ampi/error.hpp"

namespace ampi {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f != nullptr) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) {
    throw IoError("cannot open " + path.string() + ": " + std::strerror(errno));
  }
  return f;
}

struct DecodedPng {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  int channels = 0;
  int bit_depth = 0;
  std::vector<std::uint8_t> bytes;  // tightly packed rows, native-endian 16-bit
  std::vector<png_bytep> rows;
  char message[256] = {};
};

void on_png_error(png_structp png, png_const_charp msg) {
  auto* out = static_cast<DecodedPng*>(png_get_error_ptr(png));
  std::snprintf(out->message, sizeof(out->message), "%s", msg);
  png_longjmp(png, 1);
}

void on_png_warning(png_structp, png_const_charp) {}

// libpng reports errors through longjmp, so this frame holds no objects with
// non-trivial destructors besides what lives in `out`.
bool decode_png(std::FILE* file, DecodedPng& out) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &out, on_png_error, on_png_warning);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_init_io(png, file);
  png_read_info(png, info);

  const png_byte color = png_get_color_type(png, info);
  const png_byte depth = png_get_bit_depth(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
  if (depth == 16 && std::endian::native == std::endian::little) png_set_swap(png);
  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  out.width = png_get_image_width(png, info);
  out.height = png_get_image_height(png, info);
  out.channels = png_get_channels(png, info);
  out.bit_depth = png_get_bit_depth(png, info);
  const std::size_t rowbytes = png_get_rowbytes(png, info);
  out.bytes.resize(rowbytes * out.height);
  out.rows.resize(out.height);
  for (std::uint32_t y = 0; y < out.height; ++y) out.rows[y] = out.bytes.data() + y * rowbytes;
  png_read_image(png, out.rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

struct EncodeState {
  char message[256] = {};
};

void on_png_write_error(png_structp png, png_const_charp msg) {
  auto* st = static_cast<EncodeState*>(png_get_error_ptr(png));
  std::snprintf(st->message, sizeof(st->message), "%s", msg);
  png_longjmp(png, 1);
}

bool encode_png(std::FILE* file, std::uint32_t width, std::uint32_t height, int color_type, int bit_depth,
                const std::vector<png_bytep>& rows, EncodeState& st) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &st, on_png_write_error, on_png_warning);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_init_io(png, file);
  png_set_IHDR(png, info, width, height, bit_depth, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (bit_depth == 16 && std::endian::native == std::endian::little) png_set_swap(png);
  png_write_image(png, const_cast<png_bytepp>(rows.data()));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

}  // namespace

int quantize_unit(double value, int max_code) {
  const double v = std::clamp(value, 0.0, 1.0) * max_code;
  return static_cast<int>(std::lround(v));
}

ImageBuffer read_png(const std::filesystem::path& path) {
  FilePtr f = open_file(path, "rb");
  DecodedPng dec;
  if (!decode_png(f.get(), dec)) {
    throw IoError("cannot decode PNG " + path.string() + ": " + (dec.message[0] ? dec.message : "libpng failure"));
  }
  const int h = static_cast<int>(dec.height);
  const int w = static_cast<int>(dec.width);
  const int c = dec.channels;
  ImageBuffer img(h, w, c);
  auto s = img.samples();
  if (dec.bit_depth == 16) {
    const auto* p = reinterpret_cast<const std::uint16_t*>(dec.bytes.data());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = p[i] / 65535.0;
  } else {
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = dec.bytes[i] / 255.0;
  }
  return img;
}

void write_png(const ImageBuffer& img, const std::filesystem::path& path, int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) {
    throw InvalidArgument("PNG bit depth must be 8 or 16");
  }
  int color_type = 0;
  switch (img.channels()) {
    case 1: color_type = PNG_COLOR_TYPE_GRAY; break;
    case 3: color_type = PNG_COLOR_TYPE_RGB; break;
    case 4: color_type = PNG_COLOR_TYPE_RGB_ALPHA; break;
    default: throw InvalidArgument("PNG output needs 1, 3 or 4 channels, got " + std::to_string(img.channels()));
  }
  const std::size_t per_row = static_cast<std::size_t>(img.width()) * static_cast<std::size_t>(img.channels());
  const std::size_t bytes_per_sample = bit_depth == 16 ? 2 : 1;
  std::vector<std::uint8_t> buffer(per_row * bytes_per_sample * static_cast<std::size_t>(img.height()));
  const auto s = img.samples();
  if (bit_depth == 16) {
    auto* p = reinterpret_cast<std::uint16_t*>(buffer.data());
    for (std::size_t i = 0; i < s.size(); ++i) p[i] = static_cast<std::uint16_t>(quantize_unit(s[i], 65535));
  } else {
    for (std::size_t i = 0; i < s.size(); ++i) buffer[i] = static_cast<std::uint8_t>(quantize_unit(s[i], 255));
  }
  std::vector<png_bytep> rows(static_cast<std::size_t>(img.height()));
  for (std::size_t y = 0; y < rows.size(); ++y) rows[y] = buffer.data() + y * per_row * bytes_per_sample;

  FilePtr f = open_file(path, "wb");
  EncodeState st;
  if (!encode_png(f.get(), static_cast<std::uint32_t>(img.width()), static_cast<std::uint32_t>(img.height()),
                  color_type, bit_depth, rows, st)) {
    throw IoError("cannot encode PNG " + path.string() + ": " + (st.message[0] ? st.message : "libpng failure"));
  }
  if (std::fflush(f.get()) != 0) {
    throw IoError("cannot write " + path.string());
  }
}

ImageBuffer read_pfm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  std::string magic;
  int w = 0;
  int h = 0;
  double scale = 0.0;
  in >> magic >> w >> h >> scale;
  if (!in || (magic != "Pf" && magic != "PF") || w < 1 || h < 1 || scale == 0.0) {
    throw ParseError("malformed PFM header in " + path.string());
  }
  in.get();  // single whitespace byte before the raster
  const int c = magic == "PF" ? 3 : 1;
  const bool little = scale < 0.0;
  const std::size_t count = static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * static_cast<std::size_t>(c);
  std::vector<std::uint32_t> raw(count);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(count * sizeof(std::uint32_t)));
  if (static_cast<std::size_t>(in.gcount()) != count * sizeof(std::uint32_t)) {
    throw ParseError("truncated PFM raster in " + path.string());
  }
  const bool swap = little != (std::endian::native == std::endian::little);
  ImageBuffer img(h, w, c);
  for (int y = 0; y < h; ++y) {
    const int src_row = h - 1 - y;
    for (int x = 0; x < w; ++x) {
      for (int k = 0; k < c; ++k) {
        std::uint32_t bits = raw[(static_cast<std::size_t>(src_row) * static_cast<std::size_t>(w) +
                                  static_cast<std::size_t>(x)) * static_cast<std::size_t>(c) +
                                 static_cast<std::size_t>(k)];
        if (swap) bits = __builtin_bswap32(bits);
        img.at(y, x, k) = static_cast<double>(std::bit_cast<float>(bits));
      }
    }
  }
  return img;
}

void write_pfm(const ImageBuffer& img, const std::filesystem::path& path) {
  if (img.channels() != 1 && img.channels() != 3) {
    throw InvalidArgument("PFM output needs 1 or 3 channels");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  out << (img.channels() == 3 ? "PF" : "Pf") << '\n' << img.width() << ' ' << img.height() << '\n' << "-1.0\n";
  std::vector<std::uint32_t> raw;
  raw.reserve(img.samples().size());
  for (int y = img.height() - 1; y >= 0; --y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int k = 0; k < img.channels(); ++k) {
        std::uint32_t bits = std::bit_cast<std::uint32_t>(static_cast<float>(img.at(y, x, k)));
        if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
        raw.push_back(bits);
      }
    }
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size() * sizeof(std::uint32_t)));
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
}

}  // namespace ampi
