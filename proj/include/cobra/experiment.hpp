#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "cobra/aggregate.hpp"
#include "cobra/filter_bank.hpp"
#include "cobra/noise.hpp"
#include "cobra/report.hpp"
#include "cobra/tuner.hpp"

namespace cobra {

/// Stage tags mixed into derived seeds so that every random draw of a run
/// has its own stream.
enum class SeedStage : std::uint64_t {
  kEvalNoise = 1,
  kTuneNoise = 2,
  kDatasetBase = 3,
  kDatasetTune = 4,
  kDatasetEval = 5,
  kQuadrant = 6,
  kGlobalPatches = 7,
};

/// hash(master, image index, repetition index, stage).
std::uint64_t repetition_seed(std::uint64_t master, std::size_t image, std::size_t repetition, SeedStage stage);

/// Four quadrant noises plus a global patch suppression. Quadrant boundaries:
/// pixel (r, c) is north iff r < ceil(H/2) and west iff c < ceil(W/2).
struct MixedNoiseLayout {
  NoiseSpec nw{GaussianNoise{}, 0};
  NoiseSpec ne{SaltPepperNoise{}, 0};
  NoiseSpec sw{PoissonNoise{}, 0};
  NoiseSpec se{SpeckleNoise{}, 0};
  PatchSuppression patches{};
};

/// Noises each quadrant independently, then suppresses patches over the whole
/// image. The seeds stored inside the layout are ignored; all draws derive
/// from `seed`. Requires an image of at least 2 x 2.
Image make_mixed_noise(const Image& clean, const MixedNoiseLayout& layout, std::uint64_t seed);

using NoiseModel = std::variant<NoiseSpec, MixedNoiseLayout>;

/// Applies a single-kind spec (with its seed replaced by `seed`) or a mixed layout.
Image apply_noise_model(const Image& clean, const NoiseModel& model, std::uint64_t seed);
std::string noise_label(const NoiseModel& model);

struct NamedImage {
  std::string name;
  Image image;
};

/// Loads images and center-crops them to `crop` pixels per side (0 keeps the full size).
std::vector<NamedImage> load_clean_images(const std::vector<std::string>& paths, int crop);

struct ExperimentSpec {
  std::vector<NamedImage> clean_images;
  NoiseModel noise = NoiseSpec{};
  std::vector<FilterConfig> bank = default_bank_config();
  /// Fixed parameters, or nullopt to tune them on independent noise draws.
  std::optional<CobraParams> cobra;
  /// Grid overrides as JSON (see grid_from_json); the window comes from `tune_window`.
  nlohmann::json grid = nlohmann::json::object();
  CandidateWindow tune_window = CandidateWindow::radius(10);
  int tune_copies = 2;
  int repetitions = 100;
  std::uint64_t master_seed = 0;
  /// When set, images for repetition 0 and the reports are written here.
  std::string output_dir;
};

struct ExperimentResult {
  ScoreReport report;
  CobraParams params;
  std::optional<TuningResult> tuning;
  std::vector<MethodScores> scores;  // bank order, then "cobra"
  Image noisy;                        // first image, repetition 0
  Image denoised;
  Image difference;  // 0.5 + (clean - cobra), clamped
};

inline const std::string kCobraMethod = "cobra";

ExperimentResult run_experiment(const ExperimentSpec& spec);

/// Median-size auto-tuning: one median machine per size, aggregated.
ExperimentResult run_autotune_demo(const NamedImage& clean, const NoiseModel& noise, const std::vector<int>& sizes,
                                   std::optional<CobraParams> cobra, int repetitions, std::uint64_t master_seed);

/// Filters suited to a declared noise kind, used in known-noise mode.
std::vector<FilterConfig> known_noise_bank(NoiseKind kind);

struct DatasetEntry {
  std::string clean;
  std::size_t image_index = 0;
  NoiseSpec noise;
  std::string base;
  std::string tune;
  std::string eval;
  std::uint64_t tune_seed = 0;
  std::uint64_t eval_seed = 0;
};

struct DatasetManifest {
  std::vector<DatasetEntry> entries;
  double copy_sigma = 2.55;
  std::uint64_t master_seed = 0;
  int crop = 0;  // center crop applied to the clean images, 0 for none
};

/// For every clean image in `clean_dir` and every noise spec, writes one base
/// noisy image and two copies with independent Gaussian perturbation
/// (sigma on the 0-255 scale): the tune copy and the eval copy.
DatasetManifest build_dataset(const std::string& clean_dir, const std::vector<NoiseSpec>& noises,
                              std::uint64_t master_seed, const std::string& out_dir, double copy_sigma = 2.55,
                              int crop = 0);

/// Tune pairs from the tune copies, eval pairs from the eval copies. Clean
/// images are cropped as recorded in the manifest.
DataSplit load_split(const DatasetManifest& manifest, const std::string& base_dir);

void to_json(nlohmann::json& j, const DatasetManifest& manifest);
void from_json(const nlohmann::json& j, DatasetManifest& manifest);

void to_json(nlohmann::json& j, const MixedNoiseLayout& layout);
void from_json(const nlohmann::json& j, MixedNoiseLayout& layout);

}  // namespace cobra
