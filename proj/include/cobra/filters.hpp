#pragma once

#include <vector>

#include "cobra/image.hpp"

namespace cobra {

/// Small dense 2-D kernel with odd side lengths, row-major.
struct Kernel {
  int width = 1;
  int height = 1;
  std::vector<double> weights{1.0};

  double operator()(int row, int col) const { return weights[static_cast<std::size_t>(row) * width + col]; }
  static Kernel delta();
  /// Normalized Gaussian of the given odd side.
  static Kernel gaussian(int side, double sigma);
};

enum class Border { kReplicate, kPeriodic };

/// Truncated 1-D Gaussian taps of radius ceil(3 sigma), renormalized to sum 1.
std::vector<double> gaussian_taps(double sigma);

/// Separable Gaussian blur with edge replication.
Image gaussian_filter(const Image& img, double sigma);

/// Median over a size x size window, edge replicated. Even sizes are rounded
/// up to the next odd size.
Image median_filter(const Image& img, int size);

/// Mean over a (2 * radius + 1)^2 window, edge replicated.
Image box_filter(const Image& img, int radius);

Image bilateral_filter(const Image& img, double sigma_spatial, double sigma_range);

struct TvOptions {
  double weight = 0.1;
  int max_iter = 200;
  double tol = 2e-4;
};

/// Per-iteration trace of the primal energy, for diagnostics and tests.
struct TvTrace {
  std::vector<double> energy;
};

/// Total-variation denoising by Chambolle's dual projection algorithm.
Image tv_chambolle(const Image& img, const TvOptions& opts, TvTrace* trace = nullptr);

/// Discrete isotropic total variation with forward differences.
double total_variation(const Image& img);

/// ||u - f||^2 / (2 weight) + TV(u).
double tv_energy(const Image& u, const Image& f, double weight);

Image nl_means(const Image& img, int patch_radius, int search_radius, double h);

struct RichardsonLucyOptions {
  int iterations = 10;
  Border border = Border::kReplicate;
  bool clamp_output = true;
};

/// Multiplicative Richardson-Lucy deconvolution starting from the observed image.
Image richardson_lucy(const Image& img, const Kernel& psf, const RichardsonLucyOptions& opts);

/// Correlation with a kernel (no flip) under the given border mode.
Image correlate(const Image& img, const Kernel& kernel, Border border);

Image lee_filter(const Image& img, int window, double noise_variance);

/// Pixels at or above 1 - 1/255.
Mask detect_white_mask(const Image& img);
/// Pixels at or above 1 - 1/255 or at or below 1/255.
Mask detect_extreme_mask(const Image& img);

struct InpaintOptions {
  int max_iter = 2000;
  double tol = 1e-6;
};

/// Harmonic fill of masked pixels by Gauss-Seidel 4-neighbor averaging.
Image inpaint(const Image& img, const Mask& mask, const InpaintOptions& opts = {});

}  // namespace cobra
