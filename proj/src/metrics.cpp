#include "cobra/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace cobra {

namespace {

void check_pair(const Image& a, const Image& b) {
  if (!a.same_shape(b)) throw Error("metric inputs differ in shape");
  if (a.empty()) throw Error("metric inputs are empty");
}

struct Moments {
  double mean_o, mean_d, var_o, var_d, cov;
};

Moments moments(const Image& denoised, const Image& original) {
  const double n = static_cast<double>(original.size());
  double so = 0.0, sd = 0.0;
  for (std::size_t i = 0; i < original.size(); ++i) {
    so += original[i];
    sd += denoised[i];
  }
  const double mo = so / n;
  const double md = sd / n;
  double vo = 0.0, vd = 0.0, cv = 0.0;
  for (std::size_t i = 0; i < original.size(); ++i) {
    const double a = original[i] - mo;
    const double b = denoised[i] - md;
    vo += a * a;
    vd += b * b;
    cv += a * b;
  }
  return {mo, md, vo / n, vd / n, cv / n};
}

}  // namespace

double mae(const Image& denoised, const Image& original) {
  check_pair(denoised, original);
  double total = 0.0;
  for (std::size_t i = 0; i < original.size(); ++i) total += std::fabs(denoised[i] - original[i]);
  return total / static_cast<double>(original.size());
}

double rmse(const Image& denoised, const Image& original) {
  check_pair(denoised, original);
  double total = 0.0;
  for (std::size_t i = 0; i < original.size(); ++i) {
    const double d = denoised[i] - original[i];
    total += d * d;
  }
  return std::sqrt(total / static_cast<double>(original.size()));
}

double psnr(const Image& denoised, const Image& original, double dynamic) {
  if (!(dynamic > 0.0)) throw Error("psnr dynamic must be positive");
  const double e = rmse(denoised, original);
  if (e == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10((dynamic * dynamic) / (e * e));
}

UqiFactors uqi_factors(const Image& denoised, const Image& original) {
  check_pair(denoised, original);
  if (original.size() < 2) throw Error("uqi needs at least two pixels");
  const Moments m = moments(denoised, original);
  const double so = std::sqrt(m.var_o);
  const double sd = std::sqrt(m.var_d);
  UqiFactors f{};
  const double lum_den = m.mean_o * m.mean_o + m.mean_d * m.mean_d;
  f.luminance = lum_den == 0.0 ? 1.0 : 2.0 * m.mean_o * m.mean_d / lum_den;
  if (so * sd == 0.0) {
    const bool same_constant = so == 0.0 && sd == 0.0 && m.mean_o == m.mean_d;
    f.correlation = same_constant ? 1.0 : 0.0;
    f.contrast = same_constant ? 1.0 : 0.0;
  } else {
    f.correlation = m.cov / (so * sd);
    f.contrast = 2.0 * so * sd / (m.var_o + m.var_d);
  }
  return f;
}

double uqi(const Image& denoised, const Image& original) {
  const UqiFactors f = uqi_factors(denoised, original);
  return f.correlation * f.luminance * f.contrast;
}

std::string to_string(Metric metric) {
  switch (metric) {
    case Metric::kMae: return "mae";
    case Metric::kRmse: return "rmse";
    case Metric::kPsnr: return "psnr";
    case Metric::kUqi: return "uqi";
  }
  return "unknown";
}

Metric parse_metric(const std::string& name) {
  for (Metric m : kAllMetrics) {
    if (to_string(m) == name) return m;
  }
  throw Error("unknown metric '" + name + "'");
}

bool lower_is_better(Metric metric) { return metric == Metric::kMae || metric == Metric::kRmse; }

double ScoreRow::get(Metric metric) const {
  switch (metric) {
    case Metric::kMae: return mae;
    case Metric::kRmse: return rmse;
    case Metric::kPsnr: return psnr;
    case Metric::kUqi: return uqi;
  }
  return 0.0;
}

ScoreRow score_all(const Image& denoised, const Image& original) {
  ScoreRow row;
  row.mae = mae(denoised, original);
  row.rmse = rmse(denoised, original);
  row.psnr = psnr(denoised, original);
  row.uqi = uqi(denoised, original);
  row.mae255 = row.mae * 255.0;
  row.rmse255 = row.rmse * 255.0;
  return row;
}

Summary summarize(const std::vector<double>& values) {
  Summary s;
  s.count = static_cast<int>(values.size());
  if (values.empty()) return s;
  const auto infinite = std::count_if(values.begin(), values.end(), [](double v) { return std::isinf(v); });
  if (infinite > 0) {
    s.mean = std::numeric_limits<double>::infinity();
    s.std = infinite == static_cast<long>(values.size()) ? 0.0 : std::numeric_limits<double>::infinity();
    return s;
  }
  double total = 0.0;
  for (double v : values) total += v;
  s.mean = total / static_cast<double>(values.size());
  if (values.size() > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(sq / static_cast<double>(values.size() - 1));
  }
  return s;
}

}  // namespace cobra
