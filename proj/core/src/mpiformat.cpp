#include "ampi/mpiformat.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <string>

#include "ampi/image_io.hpp"

namespace ampi {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string layer_file_name(std::size_t j) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "layer_%03zu.png", j);
  return buf;
}

[[noreturn]] void fail(FormatError::Kind kind, int layer, const std::string& what) {
  throw FormatError(kind, layer, what);
}

template <typename T>
T field(const json& obj, const char* key, const fs::path& manifest) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(FormatError::Kind::invalid_manifest, -1,
         manifest.string() + ": missing or malformed field '" + key + "' (" + e.what() + ")");
  }
}

}  // namespace

void save_mpi(const AdaptiveMpi& mpi, const fs::path& dir) {
  if (mpi.layers.empty()) {
    fail(FormatError::Kind::empty_layer, -1, "refusing to save an MPI without layers");
  }
  try {
    mpi.validate();
  } catch (const InvalidArgument& e) {
    fail(FormatError::Kind::invalid_manifest, -1, std::string("refusing to save an invalid MPI: ") + e.what());
  }
  for (std::size_t j = 0; j < mpi.layers.size(); ++j) {
    bool any = false;
    const auto s = mpi.layers[j].rgba.samples();
    for (std::size_t i = 3; i < s.size() && !any; i += 4) any = s[i] > 0.0;
    if (!any) {
      fail(FormatError::Kind::empty_layer, static_cast<int>(j),
           "layer " + std::to_string(j) + " is fully transparent");
    }
  }

  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create " + dir.string() + ": " + ec.message());
  }

  json layers = json::array();
  for (std::size_t j = 0; j < mpi.layers.size(); ++j) {
    const std::string name = layer_file_name(j);
    write_png(mpi.layers[j].rgba, dir / name, 8);
    layers.push_back({{"file", name}, {"disparity", mpi.layers[j].disparity}});
  }
  const json manifest = {
      {"format", "ampi-mpi"},
      {"version", std::to_string(kMpiFormatMajor) + "." + std::to_string(kMpiFormatMinor)},
      {"source_dims", {{"height", mpi.source_dims.height}, {"width", mpi.source_dims.width}}},
      {"layer_count", mpi.layers.size()},
      {"layers", layers},
      {"intrinsics",
       {{"fx", mpi.ref_intrinsics.fx}, {"fy", mpi.ref_intrinsics.fy}, {"cx", mpi.ref_intrinsics.cx},
        {"cy", mpi.ref_intrinsics.cy}}},
      {"parallax_scale", mpi.parallax_scale},
      {"transitions", mpi.transitions},
  };
  const fs::path path = dir / kManifestName;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  out << manifest.dump(2) << '\n';
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
}

AdaptiveMpi load_mpi(const fs::path& dir) {
  const fs::path manifest_path = dir / kManifestName;
  if (!fs::exists(manifest_path)) {
    fail(FormatError::Kind::missing_file, -1, "missing manifest " + manifest_path.string());
  }
  json manifest;
  {
    std::ifstream in(manifest_path, std::ios::binary);
    try {
      manifest = json::parse(in);
    } catch (const json::exception& e) {
      fail(FormatError::Kind::invalid_manifest, -1, manifest_path.string() + ": " + e.what());
    }
  }

  const auto version = field<std::string>(manifest, "version", manifest_path);
  int major = -1;
  try {
    major = std::stoi(version.substr(0, version.find('.')));
  } catch (const std::exception&) {
    fail(FormatError::Kind::invalid_manifest, -1, manifest_path.string() + ": malformed version '" + version + "'");
  }
  if (major != kMpiFormatMajor) {
    fail(FormatError::Kind::unsupported_version, -1,
         manifest_path.string() + ": unsupported container version " + version);
  }

  AdaptiveMpi mpi;
  const json dims = field<json>(manifest, "source_dims", manifest_path);
  mpi.source_dims = {field<int>(dims, "height", manifest_path), field<int>(dims, "width", manifest_path)};
  if (mpi.source_dims.height < 1 || mpi.source_dims.width < 1) {
    fail(FormatError::Kind::invalid_manifest, -1, manifest_path.string() + ": source_dims must be positive");
  }
  const json k = field<json>(manifest, "intrinsics", manifest_path);
  mpi.ref_intrinsics = {field<double>(k, "fx", manifest_path), field<double>(k, "fy", manifest_path),
                        field<double>(k, "cx", manifest_path), field<double>(k, "cy", manifest_path)};
  mpi.parallax_scale = field<double>(manifest, "parallax_scale", manifest_path);
  if (manifest.contains("transitions")) {
    mpi.transitions = field<std::vector<int>>(manifest, "transitions", manifest_path);
  }

  const json layers = field<json>(manifest, "layers", manifest_path);
  const auto declared = field<std::size_t>(manifest, "layer_count", manifest_path);
  if (!layers.is_array() || layers.size() != declared) {
    fail(FormatError::Kind::layer_count_mismatch, -1,
         manifest_path.string() + ": layer_count " + std::to_string(declared) + " does not match the layer list");
  }
  if (declared == 0) {
    fail(FormatError::Kind::empty_layer, -1, manifest_path.string() + ": container has no layers");
  }

  for (std::size_t j = 0; j < layers.size(); ++j) {
    const int idx = static_cast<int>(j);
    const auto file = field<std::string>(layers[j], "file", manifest_path);
    const auto disparity = field<double>(layers[j], "disparity", manifest_path);
    if (j > 0 && !(disparity > mpi.layers.back().disparity)) {
      fail(FormatError::Kind::disparity_order, idx,
           "layer " + std::to_string(j) + " disparity " + std::to_string(disparity) +
               " does not increase over layer " + std::to_string(j - 1));
    }
    const fs::path path = dir / file;
    if (!fs::exists(path)) {
      fail(FormatError::Kind::missing_file, idx, "layer " + std::to_string(j) + ": missing file " + path.string());
    }
    ImageBuffer rgba;
    try {
      rgba = read_png(path);
    } catch (const Error& e) {
      fail(FormatError::Kind::decode, idx, "layer " + std::to_string(j) + ": " + e.what());
    }
    if (rgba.channels() != 4) {
      fail(FormatError::Kind::decode, idx, "layer " + std::to_string(j) + ": " + path.string() + " is not RGBA");
    }
    if (rgba.size() != mpi.source_dims) {
      fail(FormatError::Kind::dimension_mismatch, idx,
           "layer " + std::to_string(j) + ": " + path.string() + " is " + std::to_string(rgba.height()) + "x" +
               std::to_string(rgba.width()) + ", expected " + std::to_string(mpi.source_dims.height) + "x" +
               std::to_string(mpi.source_dims.width));
    }
    mpi.layers.push_back({std::move(rgba), disparity, BinaryMask(mpi.source_dims)});
  }

  for (int y = 0; y < mpi.source_dims.height; ++y) {
    for (int x = 0; x < mpi.source_dims.width; ++x) {
      for (std::size_t j = mpi.layers.size(); j-- > 0;) {
        if (mpi.layers[j].rgba.at(y, x, 3) > 0.5) {
          mpi.layers[j].occupancy.set(y, x);
          break;
        }
      }
    }
  }
  return mpi;
}

}  // namespace ampi
