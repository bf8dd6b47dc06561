#pragma once

#include <limits>
#include <string>
#include <vector>

#include "cobra/image.hpp"

namespace cobra {

/// Mean absolute error on the normalized scale.
double mae(const Image& denoised, const Image& original);

/// Root mean squared error on the normalized scale.
double rmse(const Image& denoised, const Image& original);

/// 10 log10(d^2 / RMSE^2) in dB; +infinity when the images are identical.
double psnr(const Image& denoised, const Image& original, double dynamic = 1.0);

/// Universal image quality index: correlation x luminance similarity x
/// contrast similarity, with population (1/N) moments.
///
/// When sigma_o * sigma_d = 0 the correlation and contrast factors are
/// replaced by 1 if both images are the same constant, else by 0. A zero
/// luminance denominator (both means zero) gives a luminance factor of 1.
double uqi(const Image& denoised, const Image& original);

/// The three UQI factors, exposed for diagnostics.
struct UqiFactors {
  double correlation;
  double luminance;
  double contrast;
};
UqiFactors uqi_factors(const Image& denoised, const Image& original);

enum class Metric { kMae, kRmse, kPsnr, kUqi };

std::string to_string(Metric metric);
Metric parse_metric(const std::string& name);
/// Metrics where a smaller value is better.
bool lower_is_better(Metric metric);
inline constexpr Metric kAllMetrics[] = {Metric::kMae, Metric::kRmse, Metric::kPsnr, Metric::kUqi};

/// All four metrics for one (denoised, original) pair, plus 0-255 variants.
struct ScoreRow {
  double mae = 0.0;
  double rmse = 0.0;
  double psnr = 0.0;
  double uqi = 0.0;
  double mae255 = 0.0;
  double rmse255 = 0.0;

  double get(Metric metric) const;
};

ScoreRow score_all(const Image& denoised, const Image& original);

/// Mean and sample standard deviation (0 for a single value). If every value
/// is +inf the mean is +inf with deviation 0; a mix of finite and infinite
/// values gives +inf for both.
struct Summary {
  double mean = 0.0;
  double std = 0.0;
  int count = 0;
};
Summary summarize(const std::vector<double>& values);

}  // namespace cobra
