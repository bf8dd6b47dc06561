#pragma once

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>

#include "cobra/image.hpp"
#include "cobra/rng.hpp"

namespace cobra::testing {

inline std::string data_path(const std::string& name) { return std::string(COBRA_TEST_DATA_DIR) + "/" + name; }

inline Image random_image(int width, int height, Rng& rng) {
  Image img(width, height);
  for (std::size_t i = 0; i < img.size(); ++i) img[i] = rng.uniform();
  return img;
}

// Values on the 8-bit lattice, so ties between pixels are common.
inline Image random_quantized(int width, int height, Rng& rng, int levels = 256) {
  Image img(width, height);
  for (std::size_t i = 0; i < img.size(); ++i) img[i] = static_cast<double>(rng.below(levels)) / (levels - 1);
  return img;
}

inline double max_abs_diff(const Image& a, const Image& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Fresh scratch directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() / ("cobra_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace cobra::testing
