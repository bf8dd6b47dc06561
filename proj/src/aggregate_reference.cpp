#include "cobra/aggregate.hpp"

namespace cobra::reference {

Image aggregate_image(const Image& noisy, const MachineOutputs& outs, const CobraParams& params) {
  validate(params);
  if (noisy.width() != outs.width() || noisy.height() != outs.height()) {
    throw Error("noisy image and machine outputs differ in shape");
  }
  const int h = noisy.height();
  const int w = noisy.width();
  Image out(w, h);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const PixelIndex p{r, c};
      int row0 = 0, row1 = h - 1, col0 = 0, col1 = w - 1;
      if (!params.window.is_full()) {
        const int radius = params.window.radius();
        row0 = std::max(0, r - radius);
        row1 = std::min(h - 1, r + radius);
        col0 = std::max(0, c - radius);
        col1 = std::min(w - 1, c + radius);
      }
      double numerator = 0.0;
      double denominator = 0.0;
      for (int qr = row0; qr <= row1; ++qr) {
        for (int qc = col0; qc <= col1; ++qc) {
          const int weight = consensus_weight(outs, p, {qr, qc}, params);
          if (weight) {
            numerator += noisy(qr, qc);
            denominator += 1.0;
          }
        }
      }
      out(r, c) = numerator / denominator;
    }
  }
  return clamp(std::move(out));
}

}  // namespace cobra::reference
