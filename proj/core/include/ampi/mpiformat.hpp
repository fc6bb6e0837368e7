#pragma once

#include <filesystem>
#include <string>

#include "ampi/error.hpp"
#include "ampi/mpi.hpp"

namespace ampi {

inline constexpr int kMpiFormatMajor = 1;
inline constexpr int kMpiFormatMinor = 0;
inline constexpr const char* kManifestName = "manifest.json";

/// Container validation failure. `layer` is the offending layer index, or -1
/// when the problem is not tied to a layer.
class FormatError : public Error {
 public:
  enum class Kind {
    missing_file,
    decode,
    invalid_manifest,
    unsupported_version,
    disparity_order,
    dimension_mismatch,
    layer_count_mismatch,
    empty_layer,
  };

  FormatError(Kind kind, int layer, const std::string& what) : Error(what), kind_(kind), layer_(layer) {}

  Kind kind() const { return kind_; }
  int layer() const { return layer_; }

 private:
  Kind kind_;
  int layer_;
};

/// Writes layer_000.png ... (8-bit RGBA, far to near) and then manifest.json
/// into `dir`, creating it if needed. The manifest uses sorted keys so
/// repeated saves of the same MPI are byte-identical. Throws FormatError for
/// an invalid or empty-layer MPI and IoError on write failures.
void save_mpi(const AdaptiveMpi& mpi, const std::filesystem::path& dir);

/// Reads and validates a container. Occupancy is recovered from alpha: a
/// pixel belongs to the nearest layer whose alpha exceeds one half there.
AdaptiveMpi load_mpi(const std::filesystem::path& dir);

}  // namespace ampi
