#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#ifndef RECODING_DATA_DIR
#define RECODING_DATA_DIR "data"
#endif

namespace recoding::testing {

inline std::filesystem::path data_dir() { return RECODING_DATA_DIR; }

inline std::filesystem::path vocab_path(const std::string& file) {
  return data_dir() / "vocab" / file;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("recoding_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace recoding::testing
