#include "run_record.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <array>
#include <fstream>
#include <memory>
#include <vector>

#include "ampi/error.hpp"

namespace ampi::cli {

namespace fs = std::filesystem;

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for hashing");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 initialisation failed");
  }
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[md[i] >> 4];
    out += kHex[md[i] & 0xF];
  }
  return out;
}

namespace {

// Option strings become JSON numbers, booleans or arrays when they parse as
// such; anything else stays a string.
nlohmann::json typed(const std::string& s) {
  if (s.empty()) return s;
  auto v = nlohmann::json::parse(s, nullptr, false);
  return v.is_discarded() || v.is_object() ? nlohmann::json(s) : v;
}

}  // namespace

nlohmann::json effective_config(const CLI::App& cmd) {
  nlohmann::json cfg = nlohmann::json::object();
  for (const CLI::Option* opt : cmd.get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "config") continue;
    nlohmann::json value;
    const bool flag = opt->get_expected_max() == 0;
    const bool list = opt->get_expected_max() > 1;
    if (flag) {
      value = opt->count() > 0 && opt->as<bool>();
    } else if (opt->count() > 0) {
      const auto results = opt->results();
      if (list) {
        value = nlohmann::json::array();
        for (const auto& r : results) value.push_back(typed(r));
      } else if (!results.empty()) {
        value = typed(results.back());
      }
    } else {
      const std::string d = opt->get_default_str();
      if (list) value = d == "{}" || d.empty() ? nlohmann::json::array() : typed(d);
      else if (!d.empty()) value = typed(d);
    }
    cfg[name] = value;
  }
  return cfg;
}

RunRecord::RunRecord(std::string command, nlohmann::json config) {
  doc_["tool"] = "ampi";
  doc_["version"] = AMPI_VERSION;
  doc_["command"] = std::move(command);
  doc_["config"] = std::move(config);
  doc_["inputs"] = nlohmann::json::object();
}

void RunRecord::add_input(const fs::path& path) {
  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(path)) {
      if (e.is_regular_file() && e.path().filename() != "run.json") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) doc_["inputs"][f.generic_string()] = sha256_file(f);
  } else {
    doc_["inputs"][path.generic_string()] = sha256_file(path);
  }
}

void RunRecord::write(const fs::path& dir) const {
  fs::create_directories(dir);
  const fs::path p = dir / "run.json";
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot write " + p.string());
  out << doc_.dump(2) << '\n';
}

}  // namespace ampi::cli
