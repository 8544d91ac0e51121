#pragma once

#include <filesystem>
#include <random>
#include <string>

namespace test_support {

inline std::filesystem::path source_path(const std::string& rel) {
  return std::filesystem::path(TEXTNET_SOURCE_DIR) / rel;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("textnet_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace test_support
