#include "ampi/dwt.hpp"

#include <algorithm>
#include <string>

#include "ampi/error.hpp"

namespace ampi {

ImageBuffer DwtStack::concatenated() const {
  const int c = ac.channels();
  ImageBuffer out(ac.height(), ac.width(), 4 * c);
  const ImageBuffer* parts[4] = {&ac, &horizontal, &vertical, &diagonal};
  for (int y = 0; y < ac.height(); ++y) {
    for (int x = 0; x < ac.width(); ++x) {
      double* q = out.pixel(y, x);
      for (int b = 0; b < 4; ++b) std::copy_n(parts[b]->pixel(y, x), c, q + b * c);
    }
  }
  return out;
}

DwtStack DwtStack::from_concatenated(const ImageBuffer& stacked, int pad_rows, int pad_cols) {
  if (stacked.channels() % 4 != 0) {
    throw InvalidArgument("stacked DWT tensor must have 4C channels");
  }
  const int c = stacked.channels() / 4;
  DwtStack s;
  s.pad_rows = pad_rows;
  s.pad_cols = pad_cols;
  ImageBuffer* parts[4] = {&s.ac, &s.horizontal, &s.vertical, &s.diagonal};
  for (auto* p : parts) *p = ImageBuffer(stacked.height(), stacked.width(), c);
  for (int y = 0; y < stacked.height(); ++y) {
    for (int x = 0; x < stacked.width(); ++x) {
      const double* p = stacked.pixel(y, x);
      for (int b = 0; b < 4; ++b) std::copy_n(p + b * c, c, parts[b]->pixel(y, x));
    }
  }
  return s;
}

DwtStack haar_dwt(const ImageBuffer& src) {
  const int h = src.height();
  const int w = src.width();
  const int c = src.channels();
  DwtStack s;
  s.pad_rows = h % 2;
  s.pad_cols = w % 2;
  const int oh = (h + s.pad_rows) / 2;
  const int ow = (w + s.pad_cols) / 2;
  s.ac = ImageBuffer(oh, ow, c);
  s.horizontal = ImageBuffer(oh, ow, c);
  s.vertical = ImageBuffer(oh, ow, c);
  s.diagonal = ImageBuffer(oh, ow, c);
  for (int y = 0; y < oh; ++y) {
    const int y0 = 2 * y;
    const int y1 = std::min(2 * y + 1, h - 1);
    for (int x = 0; x < ow; ++x) {
      const int x0 = 2 * x;
      const int x1 = std::min(2 * x + 1, w - 1);
      const double* pa = src.pixel(y0, x0);
      const double* pb = src.pixel(y0, x1);
      const double* pc = src.pixel(y1, x0);
      const double* pd = src.pixel(y1, x1);
      for (int k = 0; k < c; ++k) {
        const double a = pa[k], b = pb[k], cc = pc[k], d = pd[k];
        s.ac.at(y, x, k) = 0.5 * (a + b + cc + d);
        s.horizontal.at(y, x, k) = 0.5 * (a + b - cc - d);
        s.vertical.at(y, x, k) = 0.5 * (a - b + cc - d);
        s.diagonal.at(y, x, k) = 0.5 * (a - b - cc + d);
      }
    }
  }
  return s;
}

ImageBuffer haar_idwt(const DwtStack& s) {
  if (s.ac.empty() || !s.ac.same_shape(s.horizontal) || !s.ac.same_shape(s.vertical) ||
      !s.ac.same_shape(s.diagonal)) {
    throw InvalidArgument("DWT coefficient blocks have inconsistent shapes");
  }
  if (s.pad_rows < 0 || s.pad_rows > 1 || s.pad_cols < 0 || s.pad_cols > 1 ||
      2 * s.ac.height() - s.pad_rows < 1 || 2 * s.ac.width() - s.pad_cols < 1) {
    throw InvalidArgument("DWT padding metadata out of range: rows " + std::to_string(s.pad_rows) + ", cols " +
                          std::to_string(s.pad_cols));
  }
  const int oh = s.ac.height();
  const int ow = s.ac.width();
  const int c = s.ac.channels();
  const int h = 2 * oh - s.pad_rows;
  const int w = 2 * ow - s.pad_cols;
  ImageBuffer out(h, w, c);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      for (int k = 0; k < c; ++k) {
        const double ll = s.ac.at(y, x, k);
        const double lh = s.horizontal.at(y, x, k);
        const double hl = s.vertical.at(y, x, k);
        const double hh = s.diagonal.at(y, x, k);
        const double vals[2][2] = {{0.5 * (ll + lh + hl + hh), 0.5 * (ll + lh - hl - hh)},
                                   {0.5 * (ll - lh + hl - hh), 0.5 * (ll - lh - hl + hh)}};
        for (int dy = 0; dy < 2; ++dy) {
          const int yy = 2 * y + dy;
          if (yy >= h) continue;
          for (int dx = 0; dx < 2; ++dx) {
            const int xx = 2 * x + dx;
            if (xx >= w) continue;
            out.at(yy, xx, k) = vals[dy][dx];
          }
        }
      }
    }
  }
  return out;
}

}  // namespace ampi
