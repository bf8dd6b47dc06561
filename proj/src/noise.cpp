#include "cobra/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace cobra {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double value_or(const nlohmann::json& j, std::initializer_list<const char*> keys, double fallback) {
  for (const char* key : keys) {
    if (j.contains(key)) return j.at(key).get<double>();
  }
  return fallback;
}

}  // namespace

NoiseKind NoiseSpec::kind() const {
  return std::visit(Overloaded{
                        [](const NoNoise&) { return NoiseKind::kNone; },
                        [](const GaussianNoise&) { return NoiseKind::kGaussian; },
                        [](const SaltPepperNoise&) { return NoiseKind::kSaltPepper; },
                        [](const PoissonNoise&) { return NoiseKind::kPoisson; },
                        [](const SpeckleNoise&) { return NoiseKind::kSpeckle; },
                        [](const PatchSuppression&) { return NoiseKind::kPatchSuppression; },
                    },
                    params);
}

std::string NoiseSpec::label() const {
  std::ostringstream out;
  out << to_string(kind());
  std::visit(Overloaded{
                 [](const NoNoise&) {},
                 [&](const GaussianNoise& g) { out << "(mu=" << g.mean << ";sigma=" << g.sigma << ")"; },
                 [&](const SaltPepperNoise& s) { out << "(ratio=" << s.ratio << ";amount=" << s.amount << ")"; },
                 [&](const PoissonNoise& p) { out << "(peak=" << p.peak << ")"; },
                 [&](const SpeckleNoise& s) { out << "(variance=" << s.variance << ")"; },
                 [&](const PatchSuppression& p) {
                   out << "(n=" << p.count << ";" << p.patch_width << "x" << p.patch_height << ")";
                 },
             },
             params);
  return out.str();
}

std::string to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kNone: return "none";
    case NoiseKind::kGaussian: return "gaussian";
    case NoiseKind::kSaltPepper: return "salt_pepper";
    case NoiseKind::kPoisson: return "poisson";
    case NoiseKind::kSpeckle: return "speckle";
    case NoiseKind::kPatchSuppression: return "patch_suppression";
  }
  return "unknown";
}

NoiseKind parse_noise_kind(const std::string& name) {
  for (NoiseKind kind : {NoiseKind::kNone, NoiseKind::kGaussian, NoiseKind::kSaltPepper, NoiseKind::kPoisson,
                         NoiseKind::kSpeckle, NoiseKind::kPatchSuppression}) {
    if (to_string(kind) == name) return kind;
  }
  throw Error("unknown noise kind '" + name + "'");
}

void validate(const NoiseSpec& spec) {
  std::visit(Overloaded{
                 [](const NoNoise&) {},
                 [](const GaussianNoise& g) {
                   if (!(g.sigma >= 0.0)) throw Error("gaussian sigma must be >= 0");
                 },
                 [](const SaltPepperNoise& s) {
                   if (!(s.ratio >= 0.0 && s.ratio <= 1.0)) throw Error("sp_ratio must lie in [0, 1]");
                   if (!(s.amount >= 0.0 && s.amount <= 1.0)) throw Error("sp_amount must lie in [0, 1]");
                 },
                 [](const PoissonNoise& p) {
                   if (!(p.peak > 0.0)) throw Error("poisson peak must be > 0");
                 },
                 [](const SpeckleNoise& s) {
                   if (!(s.variance >= 0.0)) throw Error("speckle variance must be >= 0");
                 },
                 [](const PatchSuppression& p) {
                   if (p.count < 0) throw Error("n_patches must be >= 0");
                   if (p.patch_width < 1 || p.patch_height < 1) throw Error("patch dimensions must be >= 1");
                 },
             },
             spec.params);
}

Image add_gaussian(const Image& img, double mean, double sigma, Rng& rng) {
  const double center = mean / 255.0 - 0.5;
  const double scale = sigma / 255.0;
  Image out = img;
  if (scale == 0.0 && center == 0.0) return out;
  for (double& v : out.pixels()) v += center + scale * rng.normal();
  return clamp(std::move(out));
}

Image add_salt_pepper(const Image& img, double ratio, double amount, Rng& rng) {
  const std::size_t n = img.size();
  const auto replaced = static_cast<std::size_t>(std::llround(amount * static_cast<double>(n)));
  const auto white = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(replaced)));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Partial Fisher-Yates: the first `replaced` slots form a uniform sample
  // without replacement.
  for (std::size_t i = 0; i < replaced; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(order[i], order[j]);
  }
  Image out = img;
  for (std::size_t i = 0; i < replaced; ++i) out[order[i]] = i < white ? 1.0 : 0.0;
  return out;
}

Image add_poisson(const Image& img, double peak, Rng& rng) {
  if (!(peak > 0.0)) throw Error("poisson peak must be > 0");
  Image out = img;
  for (double& v : out.pixels()) v = static_cast<double>(rng.poisson(v * peak)) / peak;
  return clamp(std::move(out));
}

Image add_speckle(const Image& img, double variance, Rng& rng) {
  if (!(variance >= 0.0)) throw Error("speckle variance must be >= 0");
  Image out = img;
  if (variance == 0.0) return out;
  const double stddev = std::sqrt(variance);
  for (double& v : out.pixels()) v *= 1.0 + stddev * rng.normal();
  return clamp(std::move(out));
}

SuppressedImage suppress_patches_traced(const Image& img, int count, int patch_width, int patch_height,
                                        Rng& rng) {
  if (count < 0) throw Error("n_patches must be >= 0");
  if (patch_width < 1 || patch_height < 1) throw Error("patch dimensions must be >= 1");
  if (patch_width > img.width() || patch_height > img.height()) {
    throw Error("suppressed patch larger than image");
  }
  SuppressedImage result{img, {}};
  result.patches.reserve(static_cast<std::size_t>(count));
  const auto rows = static_cast<std::uint64_t>(img.height() - patch_height + 1);
  const auto cols = static_cast<std::uint64_t>(img.width() - patch_width + 1);
  for (int i = 0; i < count; ++i) {
    const int row = static_cast<int>(rng.below(rows));
    const int col = static_cast<int>(rng.below(cols));
    result.patches.push_back({row, col, patch_height, patch_width});
    for (int r = row; r < row + patch_height; ++r) {
      for (int c = col; c < col + patch_width; ++c) result.image(r, c) = 1.0;
    }
  }
  return result;
}

Image suppress_patches(const Image& img, int count, int patch_width, int patch_height, Rng& rng) {
  return suppress_patches_traced(img, count, patch_width, patch_height, rng).image;
}

Image apply_noise(const Image& img, const NoiseSpec& spec) {
  validate(spec);
  Rng rng(spec.seed);
  return std::visit(Overloaded{
                        [&](const NoNoise&) { return img; },
                        [&](const GaussianNoise& g) { return add_gaussian(img, g.mean, g.sigma, rng); },
                        [&](const SaltPepperNoise& s) { return add_salt_pepper(img, s.ratio, s.amount, rng); },
                        [&](const PoissonNoise& p) { return add_poisson(img, p.peak, rng); },
                        [&](const SpeckleNoise& s) { return add_speckle(img, s.variance, rng); },
                        [&](const PatchSuppression& p) {
                          return suppress_patches(img, p.count, p.patch_width, p.patch_height, rng);
                        },
                    },
                    spec.params);
}

void to_json(nlohmann::json& j, const NoiseSpec& spec) {
  nlohmann::json params = nlohmann::json::object();
  std::visit(Overloaded{
                 [](const NoNoise&) {},
                 [&](const GaussianNoise& g) { params = {{"mean", g.mean}, {"sigma", g.sigma}}; },
                 [&](const SaltPepperNoise& s) { params = {{"sp_ratio", s.ratio}, {"sp_amount", s.amount}}; },
                 [&](const PoissonNoise& p) { params = {{"peak", p.peak}}; },
                 [&](const SpeckleNoise& s) { params = {{"variance", s.variance}}; },
                 [&](const PatchSuppression& p) {
                   params = {{"n_patches", p.count}, {"patch_w", p.patch_width}, {"patch_h", p.patch_height}};
                 },
             },
             spec.params);
  j = {{"kind", to_string(spec.kind())}, {"params", params}, {"seed", spec.seed}};
}

void from_json(const nlohmann::json& j, NoiseSpec& spec) {
  const NoiseKind kind = parse_noise_kind(j.at("kind").get<std::string>());
  const nlohmann::json params = j.value("params", nlohmann::json::object());
  switch (kind) {
    case NoiseKind::kNone: spec.params = NoNoise{}; break;
    case NoiseKind::kGaussian: {
      GaussianNoise g;
      spec.params = GaussianNoise{value_or(params, {"mean", "mu"}, g.mean), value_or(params, {"sigma"}, g.sigma)};
      break;
    }
    case NoiseKind::kSaltPepper: {
      SaltPepperNoise s;
      spec.params = SaltPepperNoise{value_or(params, {"sp_ratio", "ratio"}, s.ratio),
                                    value_or(params, {"sp_amount", "amount"}, s.amount)};
      break;
    }
    case NoiseKind::kPoisson: spec.params = PoissonNoise{value_or(params, {"peak"}, PoissonNoise{}.peak)}; break;
    case NoiseKind::kSpeckle:
      spec.params = SpeckleNoise{value_or(params, {"variance"}, SpeckleNoise{}.variance)};
      break;
    case NoiseKind::kPatchSuppression: {
      PatchSuppression p;
      p.count = params.value("n_patches", p.count);
      p.patch_width = params.value("patch_w", p.patch_width);
      p.patch_height = params.value("patch_h", p.patch_height);
      spec.params = p;
      break;
    }
  }
  spec.seed = j.value("seed", std::uint64_t{0});
  validate(spec);
}

}  // namespace cobra
