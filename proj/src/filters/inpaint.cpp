#include <algorithm>
#include <cmath>

#include "cobra/filters.hpp"

namespace cobra {

namespace {

constexpr double kLevel = 1.0 / 255.0;

}  // namespace

Mask detect_white_mask(const Image& img) {
  Mask mask(img.width(), img.height());
  for (int r = 0; r < img.height(); ++r) {
    for (int c = 0; c < img.width(); ++c) {
      if (img(r, c) >= 1.0 - kLevel) mask.set(r, c);
    }
  }
  return mask;
}

Mask detect_extreme_mask(const Image& img) {
  Mask mask(img.width(), img.height());
  for (int r = 0; r < img.height(); ++r) {
    for (int c = 0; c < img.width(); ++c) {
      const double v = img(r, c);
      if (v >= 1.0 - kLevel || v <= kLevel) mask.set(r, c);
    }
  }
  return mask;
}

Image inpaint(const Image& img, const Mask& mask, const InpaintOptions& opts) {
  if (mask.width() != img.width() || mask.height() != img.height()) {
    throw Error("inpaint mask does not match image shape");
  }
  const std::size_t masked = mask.count();
  if (masked == 0) return img;
  if (masked == img.size()) throw Error("inpaint mask covers the entire image");

  // Start the unknowns at the mean of the known pixels.
  double known_sum = 0.0;
  for (int r = 0; r < img.height(); ++r) {
    for (int c = 0; c < img.width(); ++c) {
      if (!mask(r, c)) known_sum += img(r, c);
    }
  }
  const double start = known_sum / static_cast<double>(img.size() - masked);

  Image out = img;
  std::vector<int> rows, cols;
  rows.reserve(masked);
  cols.reserve(masked);
  for (int r = 0; r < img.height(); ++r) {
    for (int c = 0; c < img.width(); ++c) {
      if (mask(r, c)) {
        out(r, c) = start;
        rows.push_back(r);
        cols.push_back(c);
      }
    }
  }

  // Gauss-Seidel sweeps in row-major order over in-bounds 4-neighbors.
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    double max_change = 0.0;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const int r = rows[k];
      const int c = cols[k];
      double sum = 0.0;
      int n = 0;
      if (r > 0) sum += out(r - 1, c), ++n;
      if (r + 1 < img.height()) sum += out(r + 1, c), ++n;
      if (c > 0) sum += out(r, c - 1), ++n;
      if (c + 1 < img.width()) sum += out(r, c + 1), ++n;
      if (n == 0) continue;
      const double next = sum / n;
      max_change = std::max(max_change, std::fabs(next - out(r, c)));
      out(r, c) = next;
    }
    if (max_change < opts.tol) break;
  }
  return clamp(std::move(out));
}

}  // namespace cobra
