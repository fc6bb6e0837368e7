#include "ampi/filters.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "ampi/error.hpp"

namespace ampi {

namespace {

// One separable pass over a line of `n` samples. With replicated borders a
// square min/max filter equals the same filter over the window clipped to
// the frame, and k x k applied `iterations` times equals one pass with
// radius iterations * (k / 2).
void filter_line(const std::uint8_t* in, std::size_t stride, int n, int radius, MorphOp op, std::uint8_t* out,
                 std::vector<int>& prefix) {
  prefix.assign(static_cast<std::size_t>(n) + 1, 0);
  for (int i = 0; i < n; ++i) {
    prefix[static_cast<std::size_t>(i) + 1] = prefix[static_cast<std::size_t>(i)] + (in[i * stride] ? 1 : 0);
  }
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - radius);
    const int hi = std::min(n - 1, i + radius);
    const int set = prefix[static_cast<std::size_t>(hi) + 1] - prefix[static_cast<std::size_t>(lo)];
    const bool v = op == MorphOp::dilate ? set > 0 : set == hi - lo + 1;
    out[i * stride] = v ? 1 : 0;
  }
}

}  // namespace

BinaryMask morph(const BinaryMask& src, MorphOp op, int kernel, int iterations) {
  if (kernel < 1 || kernel % 2 == 0) {
    throw InvalidArgument("morphology kernel must be odd and positive, got " + std::to_string(kernel));
  }
  if (iterations < 0) {
    throw InvalidArgument("morphology iterations must be non-negative");
  }
  const int radius = iterations * (kernel / 2);
  if (radius == 0) return src;

  const int h = src.height();
  const int w = src.width();
  BinaryMask tmp(h, w);
  BinaryMask out(h, w);
  std::vector<int> prefix;
  const auto in_bits = src.bits();
  auto tmp_bits = tmp.bits();
  for (int y = 0; y < h; ++y) {
    const std::size_t row = static_cast<std::size_t>(y) * static_cast<std::size_t>(w);
    filter_line(in_bits.data() + row, 1, w, radius, op, tmp_bits.data() + row, prefix);
  }
  auto out_bits = out.bits();
  for (int x = 0; x < w; ++x) {
    filter_line(tmp_bits.data() + x, static_cast<std::size_t>(w), h, radius, op, out_bits.data() + x, prefix);
  }
  return out;
}

}  // namespace ampi
