#include <algorithm>
#include <cmath>
#include <numeric>

#include "cobra/filters.hpp"

namespace cobra {

namespace {

constexpr double kRatioFloor = 1e-12;

Kernel flipped(const Kernel& k) {
  Kernel out = k;
  std::reverse(out.weights.begin(), out.weights.end());
  return out;
}

}  // namespace

Image richardson_lucy(const Image& img, const Kernel& psf, const RichardsonLucyOptions& opts) {
  if (opts.iterations < 1) throw Error("richardson-lucy needs at least one iteration");
  if (psf.weights.size() != static_cast<std::size_t>(psf.width) * psf.height) {
    throw Error("richardson-lucy psf has inconsistent size");
  }
  if (std::any_of(psf.weights.begin(), psf.weights.end(), [](double w) { return w < 0.0; })) {
    throw Error("richardson-lucy psf must be nonnegative");
  }
  const double total = std::accumulate(psf.weights.begin(), psf.weights.end(), 0.0);
  if (std::fabs(total - 1.0) > 1e-9) throw Error("richardson-lucy psf is not normalized");

  // Convolution with the psf is correlation with its flip; the adjoint is
  // correlation with the psf itself.
  const Kernel forward = flipped(psf);
  Image estimate = img;
  for (int iter = 0; iter < opts.iterations; ++iter) {
    Image blurred = correlate(estimate, forward, opts.border);
    for (std::size_t i = 0; i < blurred.size(); ++i) {
      blurred[i] = img[i] / std::max(blurred[i], kRatioFloor);
    }
    const Image correction = correlate(blurred, psf, opts.border);
    for (std::size_t i = 0; i < estimate.size(); ++i) estimate[i] *= correction[i];
  }
  return opts.clamp_output ? clamp(std::move(estimate)) : estimate;
}

}  // namespace cobra
