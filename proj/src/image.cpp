#include "cobra/image.hpp"

#include <algorithm>
#include <numeric>

namespace cobra {

Image::Image(int width, int height, double fill) {
  if (width < 1 || height < 1) {
    throw Error("image dimensions must be positive");
  }
  width_ = width;
  height_ = height;
  data_.assign(static_cast<std::size_t>(width) * height, fill);
}

Image::Image(int width, int height, std::vector<double> data) {
  if (width < 1 || height < 1) {
    throw Error("image dimensions must be positive");
  }
  if (data.size() != static_cast<std::size_t>(width) * height) {
    throw Error("image data length does not match width x height");
  }
  width_ = width;
  height_ = height;
  data_ = std::move(data);
}

double Image::clamped(int row, int col) const {
  row = std::clamp(row, 0, height_ - 1);
  col = std::clamp(col, 0, width_ - 1);
  return (*this)(row, col);
}

std::size_t Mask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

bool Mask::subset_of(const Mask& other) const {
  if (width_ != other.width_ || height_ != other.height_) return false;
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i] && !other.bits_[i]) return false;
  }
  return true;
}

Patch extract_patch(const Image& img, PixelIndex p, int radius) {
  if (!img.contains(p)) throw Error("patch center outside image");
  if (radius < 0) throw Error("patch radius must be non-negative");
  Patch patch{p, radius, {}};
  const int side = 2 * radius + 1;
  patch.values.reserve(static_cast<std::size_t>(side) * side);
  for (int dr = -radius; dr <= radius; ++dr) {
    for (int dc = -radius; dc <= radius; ++dc) {
      patch.values.push_back(img.clamped(p.row + dr, p.col + dc));
    }
  }
  return patch;
}

Image clamp(Image img) {
  for (double& v : img.pixels()) v = std::clamp(v, 0.0, 1.0);
  return img;
}

Image crop(const Image& img, int row0, int col0, int height, int width) {
  if (row0 < 0 || col0 < 0 || height < 1 || width < 1 || row0 + height > img.height() ||
      col0 + width > img.width()) {
    throw Error("crop rectangle outside image");
  }
  Image out(width, height);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) out(r, c) = img(row0 + r, col0 + c);
  }
  return out;
}

Image center_crop(const Image& img, int size) {
  const int h = std::min(size, img.height());
  const int w = std::min(size, img.width());
  return crop(img, (img.height() - h) / 2, (img.width() - w) / 2, h, w);
}

void paste(Image& img, const Image& tile, int row0, int col0) {
  if (row0 < 0 || col0 < 0 || row0 + tile.height() > img.height() || col0 + tile.width() > img.width()) {
    throw Error("paste rectangle outside image");
  }
  for (int r = 0; r < tile.height(); ++r) {
    for (int c = 0; c < tile.width(); ++c) img(row0 + r, col0 + c) = tile(r, c);
  }
}

}  // namespace cobra
