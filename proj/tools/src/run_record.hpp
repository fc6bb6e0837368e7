#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

namespace CLI {
class App;
}

namespace ampi::cli {

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Final value of every option of `cmd`: the parsed value when given on the
/// command line or in the config file, the captured default otherwise.
nlohmann::json effective_config(const CLI::App& cmd);

/// Reproducibility record written as run.json next to a command's outputs.
class RunRecord {
 public:
  RunRecord(std::string command, nlohmann::json config);

  /// Hashes a file, or every file of a directory except run.json.
  void add_input(const std::filesystem::path& path);
  void write(const std::filesystem::path& dir) const;

 private:
  nlohmann::json doc_;
};

}  // namespace ampi::cli
