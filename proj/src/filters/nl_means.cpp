#include <cmath>

#include "cobra/filters.hpp"

namespace cobra {

// Weights use the summed squared patch difference: w = exp(-||P(p) - P(q)||^2 / h^2).
// Patches and search windows replicate edges, so every pixel sees a full window.
Image nl_means(const Image& img, int patch_radius, int search_radius, double h) {
  if (!(h > 0.0)) throw Error("nl-means h must be positive");
  if (patch_radius < 0 || search_radius < 0) throw Error("nl-means radii must be non-negative");
  const double inv_h2 = 1.0 / (h * h);
  Image out(img.width(), img.height());
#pragma omp parallel for schedule(dynamic, 4)
  for (int r = 0; r < img.height(); ++r) {
    for (int c = 0; c < img.width(); ++c) {
      double num = 0.0;
      double den = 0.0;
      for (int sr = -search_radius; sr <= search_radius; ++sr) {
        for (int sc = -search_radius; sc <= search_radius; ++sc) {
          const int qr = r + sr;
          const int qc = c + sc;
          double dist = 0.0;
          for (int dr = -patch_radius; dr <= patch_radius; ++dr) {
            for (int dc = -patch_radius; dc <= patch_radius; ++dc) {
              const double d = img.clamped(r + dr, c + dc) - img.clamped(qr + dr, qc + dc);
              dist += d * d;
            }
          }
          const double w = std::exp(-dist * inv_h2);
          num += w * img.clamped(qr, qc);
          den += w;
        }
      }
      out(r, c) = num / den;
    }
  }
  return clamp(std::move(out));
}

}  // namespace cobra
