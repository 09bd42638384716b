#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include "vqr/error.hpp"
#include "vqr/image.hpp"
#include "vqr/vq.hpp"

namespace vqr {

inline std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  detail::require(static_cast<bool>(in), ErrorCode::kIo,
                  "cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  detail::require(!in.bad(), ErrorCode::kIo, "error reading '" + path.string() + "'");
  return bytes;
}

inline std::string read_text(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return std::string(bytes.begin(), bytes.end());
}

inline GrayImage load_pgm(const std::filesystem::path& path) {
  try {
    return read_pgm(read_file(path));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

inline Codebook load_codebook_file(const std::filesystem::path& path) {
  try {
    return load_codebook(read_file(path));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

/// Collects output files and writes them only on commit(): each goes to a
/// temporary sibling first and is renamed into place, so a failed command
/// leaves no partial outputs behind.
class OutputSet {
 public:
  void add(std::filesystem::path path, std::vector<std::uint8_t> bytes) {
    files_.emplace_back(std::move(path), std::move(bytes));
  }
  void add(std::filesystem::path path, const std::string& text) {
    add(std::move(path), std::vector<std::uint8_t>(text.begin(), text.end()));
  }

  void commit() {
    std::vector<std::filesystem::path> temps;
    try {
      for (const auto& [path, bytes] : files_) {
        auto tmp = path;
        tmp += ".tmp";
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        detail::require(static_cast<bool>(out), ErrorCode::kIo,
                        "cannot write '" + path.string() + "'");
        temps.push_back(tmp);
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
        out.close();
        detail::require(static_cast<bool>(out), ErrorCode::kIo,
                        "error writing '" + path.string() + "'");
      }
    } catch (...) {
      std::error_code ec;
      for (const auto& t : temps) std::filesystem::remove(t, ec);
      throw;
    }
    for (std::size_t i = 0; i < files_.size(); ++i) {
      std::filesystem::rename(temps[i], files_[i].first);
    }
    files_.clear();
  }

 private:
  std::vector<std::pair<std::filesystem::path, std::vector<std::uint8_t>>> files_;
};

}  // namespace vqr
