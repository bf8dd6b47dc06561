#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "cobra/image.hpp"
#include "cobra/rng.hpp"

namespace cobra {

enum class NoiseKind { kNone, kGaussian, kSaltPepper, kPoisson, kSpeckle, kPatchSuppression };

/// Mean and standard deviation on the 0-255 scale. A mean of 127.5 is the
/// zero-effect center: the sampled offset is Normal(mean/255 - 0.5, (sigma/255)^2).
struct GaussianNoise {
  double mean = 127.5;
  double sigma = 25.5;
};

struct SaltPepperNoise {
  double ratio = 0.2;   // fraction of replaced pixels that turn white
  double amount = 0.1;  // fraction of all pixels replaced
};

struct PoissonNoise {
  double peak = 255.0;
};

struct SpeckleNoise {
  double variance = 0.04;
};

struct PatchSuppression {
  int count = 20;
  int patch_width = 4;
  int patch_height = 4;
};

struct NoNoise {};

using NoiseParams =
    std::variant<NoNoise, GaussianNoise, SaltPepperNoise, PoissonNoise, SpeckleNoise, PatchSuppression>;

/// One noise process together with the seed of its realization.
struct NoiseSpec {
  NoiseParams params;
  std::uint64_t seed = 0;

  NoiseKind kind() const;
  std::string label() const;
};

std::string to_string(NoiseKind kind);
NoiseKind parse_noise_kind(const std::string& name);

/// Throws cobra::Error when a parameter is outside its domain.
void validate(const NoiseSpec& spec);

struct Rect {
  int row = 0;
  int col = 0;
  int height = 0;
  int width = 0;
};

struct SuppressedImage {
  Image image;
  std::vector<Rect> patches;
};

Image add_gaussian(const Image& img, double mean, double sigma, Rng& rng);
Image add_salt_pepper(const Image& img, double ratio, double amount, Rng& rng);
Image add_poisson(const Image& img, double peak, Rng& rng);
Image add_speckle(const Image& img, double variance, Rng& rng);
Image suppress_patches(const Image& img, int count, int patch_width, int patch_height, Rng& rng);
/// Same draw sequence as suppress_patches, also returning the rectangles.
SuppressedImage suppress_patches_traced(const Image& img, int count, int patch_width, int patch_height,
                                        Rng& rng);

/// Dispatches to the generator for spec's kind, seeded with spec.seed.
Image apply_noise(const Image& img, const NoiseSpec& spec);

void to_json(nlohmann::json& j, const NoiseSpec& spec);
void from_json(const nlohmann::json& j, NoiseSpec& spec);

}  // namespace cobra
