#include <cmath>
#include <vector>

#include "cobra/filters.hpp"

namespace cobra {

namespace {

// Forward differences with zero flux across the last row/column.
void gradient(const std::vector<double>& u, int w, int h, std::vector<double>& gx, std::vector<double>& gy) {
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * w + c;
      gx[i] = c + 1 < w ? u[i + 1] - u[i] : 0.0;
      gy[i] = r + 1 < h ? u[i + w] - u[i] : 0.0;
    }
  }
}

// Negative adjoint of `gradient`.
void divergence(const std::vector<double>& px, const std::vector<double>& py, int w, int h,
                std::vector<double>& div) {
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * w + c;
      double dx = 0.0;
      if (c + 1 < w) dx += px[i];
      if (c > 0) dx -= px[i - 1];
      double dy = 0.0;
      if (r + 1 < h) dy += py[i];
      if (r > 0) dy -= py[i - w];
      div[i] = dx + dy;
    }
  }
}

double tv_of(const std::vector<double>& u, int w, int h) {
  double total = 0.0;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * w + c;
      const double gx = c + 1 < w ? u[i + 1] - u[i] : 0.0;
      const double gy = r + 1 < h ? u[i + w] - u[i] : 0.0;
      total += std::sqrt(gx * gx + gy * gy);
    }
  }
  return total;
}

}  // namespace

double total_variation(const Image& img) { return tv_of(img.vector(), img.width(), img.height()); }

double tv_energy(const Image& u, const Image& f, double weight) {
  if (!u.same_shape(f)) throw Error("tv_energy: shape mismatch");
  double fidelity = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double d = u[i] - f[i];
    fidelity += d * d;
  }
  return fidelity / (2.0 * weight) + total_variation(u);
}

Image tv_chambolle(const Image& img, const TvOptions& opts, TvTrace* trace) {
  if (!(opts.weight > 0.0)) throw Error("tv weight must be positive");
  if (opts.max_iter < 1) throw Error("tv max_iter must be >= 1");
  const int w = img.width();
  const int h = img.height();
  const std::size_t n = img.size();
  // Step size within the 1/8 bound that guarantees convergence.
  const double tau = 0.125;
  const double lambda = opts.weight;
  const std::vector<double>& f = img.vector();

  std::vector<double> px(n, 0.0), py(n, 0.0), div(n, 0.0), gx(n), gy(n), arg(n);
  std::vector<double> u = f;
  std::vector<double> u_prev(n);

  if (trace) trace->energy.clear();
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    for (std::size_t i = 0; i < n; ++i) arg[i] = div[i] - f[i] / lambda;
    gradient(arg, w, h, gx, gy);
    for (std::size_t i = 0; i < n; ++i) {
      const double norm = std::sqrt(gx[i] * gx[i] + gy[i] * gy[i]);
      const double denom = 1.0 + tau * norm;
      px[i] = (px[i] + tau * gx[i]) / denom;
      py[i] = (py[i] + tau * gy[i]) / denom;
    }
    divergence(px, py, w, h, div);
    u_prev.swap(u);
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      u[i] = f[i] - lambda * div[i];
      change += std::fabs(u[i] - u_prev[i]);
    }
    if (trace) {
      double fidelity = 0.0;
      for (std::size_t i = 0; i < n; ++i) fidelity += (u[i] - f[i]) * (u[i] - f[i]);
      trace->energy.push_back(fidelity / (2.0 * lambda) + tv_of(u, w, h));
    }
    if (change / static_cast<double>(n) < opts.tol) break;
  }
  return clamp(Image(w, h, std::move(u)));
}

}  // namespace cobra
