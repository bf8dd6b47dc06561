#include "cobra/aggregate.hpp"

#include <bit>
#include <cmath>
#include <exception>
#include <numeric>
#include <sstream>

namespace cobra {

Proportion::Proportion(std::int64_t num, std::int64_t den) {
  if (den <= 0 || num <= 0 || num > den) {
    throw Error("proportion must lie in (0, 1], got " + std::to_string(num) + "/" + std::to_string(den));
  }
  const std::int64_t g = std::gcd(num, den);
  num_ = num / g;
  den_ = den / g;
}

Proportion Proportion::from_double(double value) {
  if (!(value > 0.0 && value <= 1.0)) throw Error("proportion must lie in (0, 1]");
  int exponent = 0;
  const double fraction = std::frexp(value, &exponent);  // value = fraction * 2^exponent
  auto mantissa = static_cast<std::uint64_t>(std::ldexp(fraction, 53));
  int shift = 53 - exponent;  // value = mantissa / 2^shift
  const int trailing = std::countr_zero(mantissa);
  mantissa >>= trailing;
  shift -= trailing;
  if (shift > 62) throw Error("proportion too small to represent exactly");
  if (shift < 0) throw Error("proportion must lie in (0, 1]");
  return Proportion(static_cast<std::int64_t>(mantissa), std::int64_t{1} << shift);
}

Proportion Proportion::parse(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash != std::string::npos) {
      std::size_t used_num = 0, used_den = 0;
      const std::string num = text.substr(0, slash);
      const std::string den = text.substr(slash + 1);
      const long long n = std::stoll(num, &used_num);
      const long long d = std::stoll(den, &used_den);
      if (used_num != num.size() || used_den != den.size()) throw Error("trailing characters");
      return Proportion(n, d);
    }
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw Error("trailing characters");
    return from_double(v);
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    throw Error("cannot parse proportion '" + text + "'");
  }
}

// Products of two int64 values need 128 bits.
__extension__ typedef __int128 Wide;

bool Proportion::reached(int count, int machines) const {
  return static_cast<Wide>(count) * den_ >= static_cast<Wide>(num_) * machines;
}

int Proportion::min_count(int machines) const {
  // ceil(machines * num / den) in integer arithmetic.
  const Wide product = static_cast<Wide>(num_) * machines;
  const auto count = static_cast<int>((product + den_ - 1) / den_);
  return count;
}

std::string Proportion::to_string() const { return std::to_string(num_) + "/" + std::to_string(den_); }

bool operator<(const Proportion& a, const Proportion& b) {
  return static_cast<Wide>(a.num_) * b.den_ < static_cast<Wide>(b.num_) * a.den_;
}

CandidateWindow CandidateWindow::radius(int r) {
  if (r < 1) throw Error("window radius must be >= 1");
  return CandidateWindow(r);
}

std::string CandidateWindow::to_string() const { return is_full() ? "full" : std::to_string(radius_); }

void validate(const CobraParams& params) {
  if (!(params.epsilon > 0.0)) throw Error("epsilon must be > 0");
  if (params.patch_radius < 0) throw Error("patch radius must be >= 0");
}

MachineOutputs::MachineOutputs(const std::vector<Image>& outputs) {
  if (outputs.empty()) throw Error("at least one machine output is required");
  machines_ = static_cast<int>(outputs.size());
  width_ = outputs.front().width();
  height_ = outputs.front().height();
  for (const auto& img : outputs) {
    if (img.width() != width_ || img.height() != height_) throw Error("machine outputs differ in shape");
  }
  const std::size_t n = outputs.front().size();
  stacked_.resize(n * machines_);
  for (std::size_t i = 0; i < n; ++i) {
    for (int k = 0; k < machines_; ++k) stacked_[i * machines_ + k] = outputs[k][i];
  }
}

Image MachineOutputs::output(int k) const {
  Image img(width_, height_);
  for (std::size_t i = 0; i < img.size(); ++i) img[i] = stacked_[i * machines_ + k];
  return img;
}

int consensus_count(const MachineOutputs& outs, PixelIndex p, PixelIndex q, double epsilon) {
  int count = 0;
  for (int k = 0; k < outs.machines(); ++k) {
    if (std::fabs(outs.value(p, k) - outs.value(q, k)) <= epsilon) ++count;
  }
  return count;
}

int consensus_weight(const MachineOutputs& outs, PixelIndex p, PixelIndex q, const CobraParams& params) {
  return params.alpha.reached(consensus_count(outs, p, q, params.epsilon), outs.machines()) ? 1 : 0;
}

namespace {

struct Bounds {
  int row0, row1, col0, col1;  // inclusive
};

Bounds candidate_bounds(PixelIndex p, const CandidateWindow& window, int width, int height) {
  if (window.is_full()) return {0, height - 1, 0, width - 1};
  const int r = window.radius();
  return {std::max(0, p.row - r), std::min(height - 1, p.row + r), std::max(0, p.col - r),
          std::min(width - 1, p.col + r)};
}

void check_shapes(const Image& noisy, const MachineOutputs& outs) {
  if (noisy.width() != outs.width() || noisy.height() != outs.height()) {
    throw Error("noisy image and machine outputs differ in shape");
  }
}

// Inner kernel shared by aggregate_pixel and aggregate_image. Sums run over
// q in row-major order.
double aggregate_window(const Image& noisy, const MachineOutputs& outs, PixelIndex p, const Bounds& b,
                        double epsilon, int threshold) {
  const int m = outs.machines();
  const int w = noisy.width();
  const std::span<const double> fp = outs.predictions(static_cast<std::size_t>(p.row) * w + p.col);
  double sum = 0.0;
  std::int64_t count = 0;
  for (int r = b.row0; r <= b.row1; ++r) {
    for (int c = b.col0; c <= b.col1; ++c) {
      const std::size_t qi = static_cast<std::size_t>(r) * w + c;
      const std::span<const double> fq = outs.predictions(qi);
      int agree = 0;
      for (int k = 0; k < m; ++k) agree += std::fabs(fp[k] - fq[k]) <= epsilon ? 1 : 0;
      if (agree >= threshold) {
        sum += noisy[qi];
        ++count;
      }
    }
  }
  return sum / static_cast<double>(count);
}

}  // namespace

double aggregate_pixel(const Image& noisy, const MachineOutputs& outs, PixelIndex p, const CobraParams& params) {
  validate(params);
  check_shapes(noisy, outs);
  if (!noisy.contains(p)) throw Error("pixel outside image");
  const Bounds b = candidate_bounds(p, params.window, noisy.width(), noisy.height());
  return aggregate_window(noisy, outs, p, b, params.epsilon, params.alpha.min_count(outs.machines()));
}

Image aggregate_image(const Image& noisy, const MachineOutputs& outs, const CobraParams& params,
                      const ProgressFn& progress) {
  validate(params);
  check_shapes(noisy, outs);
  const int h = noisy.height();
  const int w = noisy.width();
  const int threshold = params.alpha.min_count(outs.machines());
  Image out(w, h);
  int rows_done = 0;
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const PixelIndex p{r, c};
      out(r, c) = aggregate_window(noisy, outs, p, candidate_bounds(p, params.window, w, h), params.epsilon,
                                   threshold);
    }
    if (progress) {
#pragma omp critical(cobra_progress)
      {
        ++rows_done;
        try {
          progress(rows_done, h);
        } catch (...) {
          if (!failure) failure = std::current_exception();
        }
      }
    }
  }
  if (failure) std::rethrow_exception(failure);
  return clamp(std::move(out));
}

Image aggregate_with_bank(const Image& noisy, const FilterBank& bank, const CobraParams& params) {
  if (bank.empty()) throw Error("filter bank is empty");
  return aggregate_image(noisy, MachineOutputs(apply_bank(bank, noisy)), params);
}

void to_json(nlohmann::json& j, const CobraParams& params) {
  j = {{"epsilon", params.epsilon},
       {"alpha", params.alpha.to_string()},
       {"patch_radius", params.patch_radius}};
  if (params.window.is_full()) {
    j["window_radius"] = "full";
  } else {
    j["window_radius"] = params.window.radius();
  }
}

void from_json(const nlohmann::json& j, CobraParams& params) {
  CobraParams out;
  out.epsilon = j.value("epsilon", out.epsilon);
  if (j.contains("alpha")) {
    const auto& a = j.at("alpha");
    out.alpha = a.is_string() ? Proportion::parse(a.get<std::string>()) : Proportion::from_double(a.get<double>());
  }
  if (j.contains("window_radius")) {
    const auto& w = j.at("window_radius");
    if (w.is_string()) {
      if (w.get<std::string>() != "full") throw Error("window_radius must be an integer or \"full\"");
      out.window = CandidateWindow::full();
    } else {
      out.window = CandidateWindow::radius(w.get<int>());
    }
  }
  out.patch_radius = j.value("patch_radius", out.patch_radius);
  validate(out);
  params = out;
}

}  // namespace cobra
