#include "cobra/config.hpp"

#include <algorithm>
#include <fstream>

namespace cobra {

namespace {

using nlohmann::json;

const char* experiment_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kSingle: return "single";
    case ExperimentKind::kMixed: return "mixed";
    case ExperimentKind::kAutotune: return "autotune";
  }
  return "single";
}

ExperimentKind parse_experiment(const std::string& name) {
  if (name == "single") return ExperimentKind::kSingle;
  if (name == "mixed") return ExperimentKind::kMixed;
  if (name == "autotune") return ExperimentKind::kAutotune;
  throw Error("unknown experiment '" + name + "' (expected single, mixed or autotune)");
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "bank",          "cobra",       "noise",        "noises",      "mixed",          "grid",
      "tune_window",   "tune_copies", "repetitions",  "master_seed", "crop",           "known_noise",
      "experiment",    "autotune_sizes", "clean_images", "copy_sigma", "defaults_version"};
  return keys;
}

}  // namespace

std::vector<NoiseSpec> default_noise_settings() {
  return {{GaussianNoise{}, 0}, {SaltPepperNoise{}, 0}, {PoissonNoise{}, 0}, {SpeckleNoise{}, 0},
          {PatchSuppression{}, 0}};
}

Config config_from_json(const json& j) {
  if (!j.is_object()) throw Error("config must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& keys = known_keys();
    if (std::find(keys.begin(), keys.end(), it.key()) == keys.end()) {
      throw Error("unknown config key '" + it.key() + "'");
    }
  }
  if (j.contains("defaults_version") && j.at("defaults_version").get<int>() != kFilterDefaultsVersion) {
    throw Error("config was written for filter defaults version " +
                std::to_string(j.at("defaults_version").get<int>()) + ", this build has " +
                std::to_string(kFilterDefaultsVersion));
  }

  Config c;
  try {
    if (j.contains("bank")) c.bank = j.at("bank").get<std::vector<FilterConfig>>();
    if (j.contains("cobra")) {
      const json& cobra = j.at("cobra");
      if (cobra.is_string()) {
        if (cobra.get<std::string>() != "tune") throw Error("cobra must be an object or \"tune\"");
        c.cobra.reset();
      } else {
        c.cobra = cobra.get<CobraParams>();
      }
    }
    if (j.contains("noise")) c.noise = j.at("noise").get<NoiseSpec>();
    if (j.contains("noises")) c.dataset_noises = j.at("noises").get<std::vector<NoiseSpec>>();
    if (j.contains("mixed")) c.mixed = j.at("mixed").get<MixedNoiseLayout>();
    if (j.contains("grid")) c.grid = j.at("grid");
    if (j.contains("tune_window")) {
      const json& w = j.at("tune_window");
      c.tune_window = w.is_string() && w.get<std::string>() == "full" ? CandidateWindow::full()
                                                                      : CandidateWindow::radius(w.get<int>());
    }
    c.tune_copies = j.value("tune_copies", c.tune_copies);
    c.repetitions = j.value("repetitions", c.repetitions);
    c.master_seed = j.value("master_seed", c.master_seed);
    c.crop = j.value("crop", c.crop);
    c.known_noise = j.value("known_noise", c.known_noise);
    if (j.contains("experiment")) c.experiment = parse_experiment(j.at("experiment").get<std::string>());
    if (j.contains("autotune_sizes")) c.autotune_sizes = j.at("autotune_sizes").get<std::vector<int>>();
    if (j.contains("clean_images")) c.clean_images = j.at("clean_images").get<std::vector<std::string>>();
    c.copy_sigma = j.value("copy_sigma", c.copy_sigma);
  } catch (const json::exception& e) {
    throw Error(std::string("invalid config: ") + e.what());
  }
  if (c.dataset_noises.empty()) c.dataset_noises = default_noise_settings();
  if (c.repetitions < 1) throw Error("repetitions must be >= 1");
  if (c.tune_copies < 1) throw Error("tune_copies must be >= 1");
  if (c.crop < 0) throw Error("crop must be >= 0");
  if (c.autotune_sizes.empty()) throw Error("autotune_sizes must be nonempty");
  // Surface bank errors (unknown kinds, bad params) at load time.
  for (const auto& f : c.bank) {
    if (f.kind != "external") (void)make_filter(f);
  }
  return c;
}

json config_to_json(const Config& c) {
  json j;
  j["defaults_version"] = kFilterDefaultsVersion;
  j["bank"] = c.bank;
  if (c.cobra) {
    j["cobra"] = *c.cobra;
  } else {
    j["cobra"] = "tune";
  }
  j["noise"] = c.noise;
  j["noises"] = c.dataset_noises;
  j["mixed"] = c.mixed;
  j["grid"] = c.grid;
  if (c.tune_window.is_full()) {
    j["tune_window"] = "full";
  } else {
    j["tune_window"] = c.tune_window.radius();
  }
  j["tune_copies"] = c.tune_copies;
  j["repetitions"] = c.repetitions;
  j["master_seed"] = c.master_seed;
  j["crop"] = c.crop;
  j["known_noise"] = c.known_noise;
  j["experiment"] = experiment_name(c.experiment);
  j["autotune_sizes"] = c.autotune_sizes;
  j["clean_images"] = c.clean_images;
  j["copy_sigma"] = c.copy_sigma;
  return j;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error("config " + path + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

std::vector<FilterConfig> effective_bank(const Config& config) {
  if (!config.known_noise || config.experiment != ExperimentKind::kSingle) return config.bank;
  return known_noise_bank(config.noise.kind());
}

ExperimentSpec make_experiment_spec(const Config& config, std::vector<NamedImage> clean_images,
                                    const std::string& output_dir) {
  ExperimentSpec spec;
  spec.clean_images = std::move(clean_images);
  if (config.experiment == ExperimentKind::kMixed) {
    spec.noise = config.mixed;
  } else {
    spec.noise = config.noise;
  }
  spec.bank = effective_bank(config);
  if (config.experiment == ExperimentKind::kAutotune) {
    spec.bank.clear();
    for (int size : config.autotune_sizes) {
      spec.bank.push_back({"median-" + std::to_string(size), "median", {{"size", size}}, ""});
    }
  }
  spec.cobra = config.cobra;
  spec.grid = config.grid;
  spec.tune_window = config.tune_window;
  spec.tune_copies = config.tune_copies;
  spec.repetitions = config.repetitions;
  spec.master_seed = config.master_seed;
  spec.output_dir = output_dir;
  return spec;
}

}  // namespace cobra
