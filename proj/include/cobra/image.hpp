#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cobra {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PixelIndex {
  int row = 0;
  int col = 0;

  friend bool operator==(const PixelIndex&, const PixelIndex&) = default;
};

/// Gray-scale raster of normalized intensities, stored row-major.
///
/// Values handed between modules are kept in [0, 1]; intermediate buffers
/// inside a filter may leave that range and are clamped before returning.
class Image {
 public:
  Image() = default;
  Image(int width, int height, double fill = 0.0);
  Image(int width, int height, std::vector<double> data);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double operator()(int row, int col) const {
    return data_[static_cast<std::size_t>(row) * width_ + col];
  }
  double& operator()(int row, int col) {
    return data_[static_cast<std::size_t>(row) * width_ + col];
  }
  double operator[](std::size_t i) const { return data_[i]; }
  double& operator[](std::size_t i) { return data_[i]; }

  /// Edge-replicating read: out-of-range coordinates snap to the nearest
  /// border pixel.
  double clamped(int row, int col) const;

  bool contains(PixelIndex p) const {
    return p.row >= 0 && p.row < height_ && p.col >= 0 && p.col < width_;
  }
  bool same_shape(const Image& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  std::span<const double> pixels() const { return data_; }
  std::span<double> pixels() { return data_; }
  const std::vector<double>& vector() const { return data_; }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

/// Binary membership mask over an image domain.
class Mask {
 public:
  Mask() = default;
  Mask(int width, int height) : width_(width), height_(height), bits_(static_cast<std::size_t>(width) * height, 0) {}

  int width() const { return width_; }
  int height() const { return height_; }
  bool operator()(int row, int col) const { return bits_[static_cast<std::size_t>(row) * width_ + col] != 0; }
  void set(int row, int col, bool on = true) {
    bits_[static_cast<std::size_t>(row) * width_ + col] = on ? 1 : 0;
  }
  std::size_t count() const;
  bool empty() const { return count() == 0; }
  /// True when every pixel set here is also set in `other`.
  bool subset_of(const Mask& other) const;

  friend bool operator==(const Mask&, const Mask&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

struct Patch {
  PixelIndex center;
  int radius = 0;
  std::vector<double> values;  // (2 * radius + 1)^2 entries, row-major
};

/// Square neighborhood of side 2*radius+1 centred on p, edge-replicated.
Patch extract_patch(const Image& img, PixelIndex p, int radius);

/// Min/max clip of every value into [0, 1].
Image clamp(Image img);

/// Rectangular sub-image; the rectangle must lie inside the image.
Image crop(const Image& img, int row0, int col0, int height, int width);

/// Centered crop to at most `size` x `size`; smaller images are returned whole.
Image center_crop(const Image& img, int size);

/// Pastes `tile` into `img` with its top-left corner at (row0, col0).
void paste(Image& img, const Image& tile, int row0, int col0);

}  // namespace cobra
