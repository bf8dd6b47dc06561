#include <algorithm>
#include <cmath>

#include "cobra/filters.hpp"

namespace cobra {

namespace {

int wrap(int i, int n) {
  const int m = i % n;
  return m < 0 ? m + n : m;
}

double read(const Image& img, int row, int col, Border border) {
  if (border == Border::kPeriodic) return img(wrap(row, img.height()), wrap(col, img.width()));
  return img.clamped(row, col);
}

}  // namespace

Kernel Kernel::delta() { return Kernel{}; }

Kernel Kernel::gaussian(int side, double sigma) {
  if (side < 1 || side % 2 == 0) throw Error("kernel side must be odd and positive");
  if (!(sigma > 0.0)) throw Error("kernel sigma must be positive");
  Kernel k{side, side, std::vector<double>(static_cast<std::size_t>(side) * side)};
  const int r = side / 2;
  double total = 0.0;
  for (int dr = -r; dr <= r; ++dr) {
    for (int dc = -r; dc <= r; ++dc) {
      const double w = std::exp(-(dr * dr + dc * dc) / (2.0 * sigma * sigma));
      k.weights[static_cast<std::size_t>(dr + r) * side + (dc + r)] = w;
      total += w;
    }
  }
  for (double& w : k.weights) w /= total;
  return k;
}

std::vector<double> gaussian_taps(double sigma) {
  if (!(sigma > 0.0)) throw Error("gaussian sigma must be positive");
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> taps(2 * radius + 1);
  double total = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    taps[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    total += taps[i + radius];
  }
  for (double& t : taps) t /= total;
  return taps;
}

Image gaussian_filter(const Image& img, double sigma) {
  const std::vector<double> taps = gaussian_taps(sigma);
  const int radius = static_cast<int>(taps.size() / 2);
  const int h = img.height();
  const int w = img.width();

  Image horizontal(w, h);
#pragma omp parallel for schedule(static)
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) acc += taps[k + radius] * img.clamped(r, c + k);
      horizontal(r, c) = acc;
    }
  }
  Image out(w, h);
#pragma omp parallel for schedule(static)
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) acc += taps[k + radius] * horizontal.clamped(r + k, c);
      out(r, c) = acc;
    }
  }
  return clamp(std::move(out));
}

Image box_filter(const Image& img, int radius) {
  if (radius < 0) throw Error("box radius must be non-negative");
  const int side = 2 * radius + 1;
  const double norm = 1.0 / (static_cast<double>(side) * side);
  Image out(img.width(), img.height());
#pragma omp parallel for schedule(static)
  for (int r = 0; r < img.height(); ++r) {
    for (int c = 0; c < img.width(); ++c) {
      double acc = 0.0;
      for (int dr = -radius; dr <= radius; ++dr) {
        for (int dc = -radius; dc <= radius; ++dc) acc += img.clamped(r + dr, c + dc);
      }
      out(r, c) = acc * norm;
    }
  }
  return clamp(std::move(out));
}

Image bilateral_filter(const Image& img, double sigma_spatial, double sigma_range) {
  if (!(sigma_spatial > 0.0) || !(sigma_range > 0.0)) throw Error("bilateral sigmas must be positive");
  const int radius = static_cast<int>(std::ceil(3.0 * sigma_spatial));
  const int side = 2 * radius + 1;
  std::vector<double> spatial(static_cast<std::size_t>(side) * side);
  for (int dr = -radius; dr <= radius; ++dr) {
    for (int dc = -radius; dc <= radius; ++dc) {
      spatial[static_cast<std::size_t>(dr + radius) * side + (dc + radius)] =
          std::exp(-(dr * dr + dc * dc) / (2.0 * sigma_spatial * sigma_spatial));
    }
  }
  const double range_scale = 1.0 / (2.0 * sigma_range * sigma_range);
  Image out(img.width(), img.height());
#pragma omp parallel for schedule(static)
  for (int r = 0; r < img.height(); ++r) {
    for (int c = 0; c < img.width(); ++c) {
      const double center = img(r, c);
      double num = 0.0;
      double den = 0.0;
      for (int dr = -radius; dr <= radius; ++dr) {
        for (int dc = -radius; dc <= radius; ++dc) {
          const double v = img.clamped(r + dr, c + dc);
          const double d = v - center;
          const double w =
              spatial[static_cast<std::size_t>(dr + radius) * side + (dc + radius)] * std::exp(-d * d * range_scale);
          num += w * v;
          den += w;
        }
      }
      out(r, c) = num / den;
    }
  }
  return clamp(std::move(out));
}

Image correlate(const Image& img, const Kernel& kernel, Border border) {
  if (kernel.width % 2 == 0 || kernel.height % 2 == 0) throw Error("kernel sides must be odd");
  const int ry = kernel.height / 2;
  const int rx = kernel.width / 2;
  Image out(img.width(), img.height());
#pragma omp parallel for schedule(static)
  for (int r = 0; r < img.height(); ++r) {
    for (int c = 0; c < img.width(); ++c) {
      double acc = 0.0;
      for (int kr = 0; kr < kernel.height; ++kr) {
        for (int kc = 0; kc < kernel.width; ++kc) {
          acc += kernel(kr, kc) * read(img, r + kr - ry, c + kc - rx, border);
        }
      }
      out(r, c) = acc;
    }
  }
  return out;
}

Image lee_filter(const Image& img, int window, double noise_variance) {
  if (window < 3 || window % 2 == 0) throw Error("lee window must be odd and >= 3");
  if (!(noise_variance >= 0.0)) throw Error("lee noise variance must be >= 0");
  const int radius = window / 2;
  const double n = static_cast<double>(window) * window;
  Image out(img.width(), img.height());
#pragma omp parallel for schedule(static)
  for (int r = 0; r < img.height(); ++r) {
    for (int c = 0; c < img.width(); ++c) {
      double sum = 0.0;
      for (int dr = -radius; dr <= radius; ++dr) {
        for (int dc = -radius; dc <= radius; ++dc) sum += img.clamped(r + dr, c + dc);
      }
      const double mean = sum / n;
      double var = 0.0;
      for (int dr = -radius; dr <= radius; ++dr) {
        for (int dc = -radius; dc <= radius; ++dc) {
          const double d = img.clamped(r + dr, c + dc) - mean;
          var += d * d;
        }
      }
      var /= n;
      const double gain = noise_variance == 0.0 ? 1.0 : var / (var + noise_variance);
      const double v = img(r, c);
      out(r, c) = v - (1.0 - gain) * (v - mean);
    }
  }
  return clamp(std::move(out));
}

}  // namespace cobra
