#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cobra/aggregate.hpp"
#include "cobra/experiment.hpp"
#include "cobra/filter_bank.hpp"
#include "cobra/noise.hpp"

namespace cobra {

enum class ExperimentKind { kSingle, kMixed, kAutotune };

/// Everything a run reads from the JSON config. Missing keys keep these defaults.
struct Config {
  std::vector<FilterConfig> bank = default_bank_config();
  std::optional<CobraParams> cobra = CobraParams{};  // nullopt: "tune"
  NoiseSpec noise{SaltPepperNoise{}, 0};
  std::vector<NoiseSpec> dataset_noises;  // defaults to the five single-kind settings
  MixedNoiseLayout mixed;
  nlohmann::json grid = nlohmann::json::object();
  CandidateWindow tune_window = CandidateWindow::radius(10);
  int tune_copies = 2;
  int repetitions = 100;
  std::uint64_t master_seed = 0;
  int crop = 128;
  bool known_noise = false;
  ExperimentKind experiment = ExperimentKind::kSingle;
  std::vector<int> autotune_sizes = {3, 5, 11};
  std::vector<std::string> clean_images;
  double copy_sigma = 2.55;
};

/// The five single-kind noise settings at their default parameters.
std::vector<NoiseSpec> default_noise_settings();

Config config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const Config& config);
Config load_config(const std::string& path);

/// Bank for a run: known-noise mode swaps in the per-kind restricted bank.
std::vector<FilterConfig> effective_bank(const Config& config);

ExperimentSpec make_experiment_spec(const Config& config, std::vector<NamedImage> clean_images,
                                    const std::string& output_dir);

}  // namespace cobra
