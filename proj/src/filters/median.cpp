#include <algorithm>
#include <iostream>

#include "cobra/filters.hpp"

namespace cobra {

Image median_filter(const Image& img, int size) {
  if (size < 1) throw Error("median size must be >= 1");
  if (size % 2 == 0) {
    std::clog << "warning: median size " << size << " is even, using " << size + 1 << "\n";
    ++size;
  }
  const int radius = size / 2;
  const std::size_t count = static_cast<std::size_t>(size) * size;
  const std::size_t mid = (count - 1) / 2;  // lower median
  Image out(img.width(), img.height());
#pragma omp parallel
  {
    std::vector<double> window(count);
#pragma omp for schedule(static)
    for (int r = 0; r < img.height(); ++r) {
      for (int c = 0; c < img.width(); ++c) {
        std::size_t i = 0;
        for (int dr = -radius; dr <= radius; ++dr) {
          for (int dc = -radius; dc <= radius; ++dc) window[i++] = img.clamped(r + dr, c + dc);
        }
        std::nth_element(window.begin(), window.begin() + static_cast<std::ptrdiff_t>(mid), window.end());
        out(r, c) = window[mid];
      }
    }
  }
  return out;
}

}  // namespace cobra
