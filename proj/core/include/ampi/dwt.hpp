#pragma once

#include "ampi/image.hpp"

namespace ampi {

/// Single-level orthonormal 2D Haar decomposition.
///
/// For each 2x2 block [[a, b], [c, d]] and channel:
///   ac         = (a + b + c + d) / 2
///   horizontal = (a + b - c - d) / 2
///   vertical   = (a - b + c - d) / 2
///   diagonal   = (a - b - c + d) / 2
/// Odd inputs are padded by replicating the last row/column; the padding is
/// recorded so the inverse can crop it away.
struct DwtStack {
  ImageBuffer ac;
  ImageBuffer horizontal;
  ImageBuffer vertical;
  ImageBuffer diagonal;
  int pad_rows = 0;
  int pad_cols = 0;

  /// Channel-concatenated tensor [ac | horizontal | vertical | diagonal],
  /// shape H/2 x W/2 x 4C.
  ImageBuffer concatenated() const;

  /// Inverse of concatenated(); padding metadata must be supplied separately.
  static DwtStack from_concatenated(const ImageBuffer& stacked, int pad_rows = 0, int pad_cols = 0);
};

DwtStack haar_dwt(const ImageBuffer& src);

/// Throws InvalidArgument if the four coefficient blocks disagree in shape
/// or the padding metadata is out of range.
ImageBuffer haar_idwt(const DwtStack& stack);

}  // namespace ampi
