#include "ampi/mpi.hpp"

#include <cmath>
#include <string>

#include "ampi/error.hpp"

namespace ampi {

void AdaptiveMpi::validate() const {
  if (layers.empty()) {
    throw InvalidArgument("MPI has no layers");
  }
  for (std::size_t j = 0; j < layers.size(); ++j) {
    const MpiLayer& l = layers[j];
    const std::string name = "layer " + std::to_string(j);
    if (l.rgba.channels() != 4 || l.rgba.size() != source_dims) {
      throw InvalidArgument(name + " is not an RGBA raster of the source size");
    }
    if (l.occupancy.size() != source_dims) {
      throw InvalidArgument(name + " occupancy does not match the source size");
    }
    if (!std::isfinite(l.disparity)) {
      throw InvalidArgument(name + " has a non-finite disparity");
    }
    if (j > 0 && !(l.disparity > layers[j - 1].disparity)) {
      throw InvalidArgument(name + " disparity does not increase over the previous layer");
    }
  }
}

BinaryMask occupancy_union(const AdaptiveMpi& mpi, int first, int last) {
  BinaryMask out(mpi.source_dims);
  for (int j = first; j < last; ++j) out |= mpi.layers[static_cast<std::size_t>(j)].occupancy;
  return out;
}

}  // namespace ampi
