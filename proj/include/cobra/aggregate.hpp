#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "cobra/filter_bank.hpp"
#include "cobra/image.hpp"

namespace cobra {

/// Exact rational in (0, 1], used for the consensus fraction alpha so that
/// thresholds like 4/7 of the machines compare without rounding.
class Proportion {
 public:
  Proportion(std::int64_t num, std::int64_t den);

  /// Exact value of a double (every finite double is a dyadic rational).
  static Proportion from_double(double value);
  /// Accepts "k/m" or a decimal real.
  static Proportion parse(const std::string& text);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  /// Exact test of count >= machines * (num / den).
  bool reached(int count, int machines) const;
  /// Smallest count in [0, machines] satisfying reached(); machines + 1 if none.
  int min_count(int machines) const;

  std::string to_string() const;

  friend bool operator==(const Proportion& a, const Proportion& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  /// Exact ordering by value.
  friend bool operator<(const Proportion& a, const Proportion& b);

 private:
  std::int64_t num_;
  std::int64_t den_;
};

/// Candidate set for the weighted average: a square window of the given
/// radius around p (clipped to the image), or the whole image.
class CandidateWindow {
 public:
  static CandidateWindow full() { return CandidateWindow(-1); }
  static CandidateWindow radius(int r);

  bool is_full() const { return radius_ < 0; }
  int radius() const { return radius_; }
  std::string to_string() const;

  friend bool operator==(const CandidateWindow&, const CandidateWindow&) = default;

 private:
  explicit CandidateWindow(int r) : radius_(r) {}
  int radius_;
};

struct CobraParams {
  double epsilon = 0.2;
  Proportion alpha{4, 7};
  CandidateWindow window = CandidateWindow::radius(10);
  /// Feature patch radius; carried for feature extraction, not used by the weights.
  int patch_radius = 1;
};

void validate(const CobraParams& params);

/// The M machine outputs for one noisy image, stored pixel-major so that the
/// M predictions of a pixel are contiguous.
class MachineOutputs {
 public:
  explicit MachineOutputs(const std::vector<Image>& outputs);

  int machines() const { return machines_; }
  int width() const { return width_; }
  int height() const { return height_; }
  double value(PixelIndex p, int k) const {
    return stacked_[(static_cast<std::size_t>(p.row) * width_ + p.col) * machines_ + k];
  }
  std::span<const double> predictions(std::size_t pixel) const {
    return {stacked_.data() + pixel * machines_, static_cast<std::size_t>(machines_)};
  }
  Image output(int k) const;

 private:
  int machines_ = 0;
  int width_ = 0;
  int height_ = 0;
  std::vector<double> stacked_;
};

/// Number of machines k with |f_k(p) - f_k(q)| <= epsilon.
int consensus_count(const MachineOutputs& outs, PixelIndex p, PixelIndex q, double epsilon);

/// 1 when consensus_count reaches M * alpha, else 0.
int consensus_weight(const MachineOutputs& outs, PixelIndex p, PixelIndex q, const CobraParams& params);

/// Mean of the noisy intensities over candidates q with weight 1. p itself
/// always qualifies, so the average is never empty.
double aggregate_pixel(const Image& noisy, const MachineOutputs& outs, PixelIndex p, const CobraParams& params);

/// Called with (rows finished, total rows); invocations are serialized.
using ProgressFn = std::function<void(int, int)>;

/// Parallel aggregation over output pixels. Every output pixel is computed by
/// one thread with a fixed summation order, so the result does not depend on
/// the thread count.
Image aggregate_image(const Image& noisy, const MachineOutputs& outs, const CobraParams& params,
                      const ProgressFn& progress = {});

/// apply_bank followed by aggregate_image.
Image aggregate_with_bank(const Image& noisy, const FilterBank& bank, const CobraParams& params);

namespace reference {

/// Serial per-pixel evaluation through consensus_weight; kept as the baseline
/// the parallel kernel is tested and benchmarked against.
Image aggregate_image(const Image& noisy, const MachineOutputs& outs, const CobraParams& params);

}  // namespace reference

void to_json(nlohmann::json& j, const CobraParams& params);
void from_json(const nlohmann::json& j, CobraParams& params);

}  // namespace cobra
