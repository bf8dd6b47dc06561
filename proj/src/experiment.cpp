#include "cobra/experiment.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "cobra/image_io.hpp"

namespace cobra {

namespace fs = std::filesystem;

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

bool is_image_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".pgm";
}

Image difference_image(const Image& clean, const Image& denoised) {
  Image diff(clean.width(), clean.height());
  for (std::size_t i = 0; i < clean.size(); ++i) diff[i] = 0.5 + (clean[i] - denoised[i]);
  return clamp(std::move(diff));
}

bool has_external(const std::vector<FilterConfig>& bank) {
  return std::any_of(bank.begin(), bank.end(), [](const FilterConfig& f) { return f.kind == "external"; });
}

}  // namespace

std::uint64_t repetition_seed(std::uint64_t master, std::size_t image, std::size_t repetition, SeedStage stage) {
  return derive_seed(master, {static_cast<std::uint64_t>(image), static_cast<std::uint64_t>(repetition),
                              static_cast<std::uint64_t>(stage)});
}

Image make_mixed_noise(const Image& clean, const MixedNoiseLayout& layout, std::uint64_t seed) {
  if (clean.width() < 2 || clean.height() < 2) throw Error("mixed noise needs an image of at least 2x2");
  const int h2 = (clean.height() + 1) / 2;
  const int w2 = (clean.width() + 1) / 2;
  struct Quadrant {
    const NoiseSpec* spec;
    int row0, col0, height, width;
  };
  const Quadrant quadrants[] = {
      {&layout.nw, 0, 0, h2, w2},
      {&layout.ne, 0, w2, h2, clean.width() - w2},
      {&layout.sw, h2, 0, clean.height() - h2, w2},
      {&layout.se, h2, w2, clean.height() - h2, clean.width() - w2},
  };
  Image out = clean;
  for (std::size_t q = 0; q < std::size(quadrants); ++q) {
    const Quadrant& quad = quadrants[q];
    NoiseSpec spec = *quad.spec;
    spec.seed = derive_seed(seed, {static_cast<std::uint64_t>(SeedStage::kQuadrant), q});
    const Image tile = crop(clean, quad.row0, quad.col0, quad.height, quad.width);
    paste(out, apply_noise(tile, spec), quad.row0, quad.col0);
  }
  if (layout.patches.count > 0) {
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(SeedStage::kGlobalPatches)}));
    out = suppress_patches(out, layout.patches.count, layout.patches.patch_width, layout.patches.patch_height, rng);
  }
  return out;
}

Image apply_noise_model(const Image& clean, const NoiseModel& model, std::uint64_t seed) {
  return std::visit(Overloaded{
                        [&](const NoiseSpec& spec) {
                          NoiseSpec seeded = spec;
                          seeded.seed = seed;
                          return apply_noise(clean, seeded);
                        },
                        [&](const MixedNoiseLayout& layout) { return make_mixed_noise(clean, layout, seed); },
                    },
                    model);
}

std::string noise_label(const NoiseModel& model) {
  return std::visit(Overloaded{
                        [](const NoiseSpec& spec) { return spec.label(); },
                        [](const MixedNoiseLayout&) { return std::string("mixed"); },
                    },
                    model);
}

std::vector<NamedImage> load_clean_images(const std::vector<std::string>& paths, int crop) {
  std::vector<NamedImage> images;
  for (const auto& path : paths) {
    Image img = load_image(path);
    if (crop > 0) img = center_crop(img, crop);
    images.push_back({fs::path(path).stem().string(), std::move(img)});
  }
  return images;
}

std::vector<FilterConfig> known_noise_bank(NoiseKind kind) {
  auto config = [](const std::string& kind_name) {
    return FilterConfig{kind_name, kind_name, default_filter_params(kind_name), ""};
  };
  switch (kind) {
    case NoiseKind::kGaussian:
      return {config("gaussian"), config("bilateral"), config("tv_chambolle"), config("nl_means")};
    case NoiseKind::kSaltPepper: {
      FilterConfig extremes = config("inpaint");
      extremes.params["mask"] = "extremes";
      return {config("median"), config("tv_chambolle"), extremes};
    }
    case NoiseKind::kPoisson:
      return {config("gaussian"), config("tv_chambolle"), config("nl_means"), config("richardson_lucy")};
    case NoiseKind::kSpeckle:
      return {config("lee"), config("median"), config("tv_chambolle"), config("gaussian")};
    case NoiseKind::kPatchSuppression:
      return {config("inpaint"), config("median"), config("gaussian")};
    case NoiseKind::kNone:
      break;
  }
  return default_bank_config();
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  if (spec.clean_images.empty()) throw Error("experiment has no clean images");
  if (spec.repetitions < 1) throw Error("repetitions must be >= 1");
  if (spec.bank.empty()) throw Error("experiment bank is empty");
  const std::string label = noise_label(spec.noise);

  ExperimentResult result;
  if (spec.cobra) {
    result.params = *spec.cobra;
  } else {
    if (has_external(spec.bank)) throw Error("tuning is not supported with external filters");
    const FilterBank bank = make_bank(spec.bank);
    std::vector<TunePair> tune;
    for (std::size_t i = 0; i < spec.clean_images.size(); ++i) {
      const NamedImage& clean = spec.clean_images[i];
      for (int t = 0; t < spec.tune_copies; ++t) {
        TunePair pair;
        pair.id = clean.name + "/tune" + std::to_string(t);
        pair.noisy = apply_noise_model(clean.image, spec.noise,
                                       repetition_seed(spec.master_seed, i, static_cast<std::size_t>(t),
                                                       SeedStage::kTuneNoise));
        pair.clean = clean.image;
        tune.push_back(std::move(pair));
      }
    }
    const TuningGrid grid = grid_from_json(spec.grid, static_cast<int>(bank.size()));
    result.tuning = grid_search(tune, bank, grid, spec.tune_window);
    result.params = result.tuning->params;
  }

  std::vector<MethodScores> scores;
  for (const auto& f : spec.bank) scores.push_back({f.name, {}});
  scores.push_back({kCobraMethod, {}});

  for (std::size_t i = 0; i < spec.clean_images.size(); ++i) {
    const NamedImage& clean = spec.clean_images[i];
    const FilterBank bank = make_bank(spec.bank, FilterContext{clean.name});
    for (int rep = 0; rep < spec.repetitions; ++rep) {
      try {
        const Image noisy = apply_noise_model(
            clean.image, spec.noise,
            repetition_seed(spec.master_seed, i, static_cast<std::size_t>(rep), SeedStage::kEvalNoise));
        const std::vector<Image> outputs = apply_bank(bank, noisy);
        const Image denoised = aggregate_image(noisy, MachineOutputs(outputs), result.params);
        for (std::size_t k = 0; k < outputs.size(); ++k) scores[k].samples.push_back(score_all(outputs[k], clean.image));
        scores.back().samples.push_back(score_all(denoised, clean.image));
        if (i == 0 && rep == 0) {
          result.noisy = noisy;
          result.denoised = denoised;
          result.difference = difference_image(clean.image, denoised);
        }
      } catch (const Error& e) {
        throw Error("image '" + clean.name + "', repetition " + std::to_string(rep) + ": " + e.what());
      }
    }
  }
  result.report = build_report(label, scores);
  result.scores = std::move(scores);

  if (!spec.output_dir.empty()) {
    const fs::path dir(spec.output_dir);
    fs::create_directories(dir);
    save_image(result.noisy, (dir / "noisy.png").string());
    save_image(result.denoised, (dir / "cobra.png").string());
    save_image(result.difference, (dir / "difference.png").string());
    write_text(dir / "report.csv", to_csv(result.report));
    write_text(dir / "report.md", to_markdown(result.report));
    nlohmann::json params = result.params;
    write_text(dir / "params.json", params.dump(2) + "\n");
    if (result.tuning) {
      const TuningGrid grid = grid_from_json(spec.grid, static_cast<int>(spec.bank.size()));
      write_text(dir / "tuning.csv", tuning_table_csv(*result.tuning, grid.objective));
    }
  }
  return result;
}

ExperimentResult run_autotune_demo(const NamedImage& clean, const NoiseModel& noise, const std::vector<int>& sizes,
                                   std::optional<CobraParams> cobra, int repetitions, std::uint64_t master_seed) {
  if (sizes.empty()) throw Error("autotune needs at least one median size");
  ExperimentSpec spec;
  spec.clean_images = {clean};
  spec.noise = noise;
  spec.bank.clear();
  for (int size : sizes) {
    spec.bank.push_back({"median-" + std::to_string(size), "median", {{"size", size}}, ""});
  }
  spec.cobra = std::move(cobra);
  spec.repetitions = repetitions;
  spec.master_seed = master_seed;
  return run_experiment(spec);
}

DatasetManifest build_dataset(const std::string& clean_dir, const std::vector<NoiseSpec>& noises,
                              std::uint64_t master_seed, const std::string& out_dir, double copy_sigma, int crop) {
  if (noises.empty()) throw Error("dataset needs at least one noise setting");
  if (!fs::is_directory(clean_dir)) throw Error("clean image directory '" + clean_dir + "' does not exist");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(clean_dir)) {
    if (entry.is_regular_file() && is_image_file(entry.path())) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Error("no .png or .pgm images in '" + clean_dir + "'");

  const fs::path out(out_dir);
  fs::create_directories(out);
  DatasetManifest manifest;
  manifest.copy_sigma = copy_sigma;
  manifest.crop = crop;
  manifest.master_seed = master_seed;
  for (std::size_t i = 0; i < files.size(); ++i) {
    Image clean = load_image(files[i].string());
    if (crop > 0) clean = center_crop(clean, crop);
    const std::string stem = files[i].stem().string();
    for (std::size_t n = 0; n < noises.size(); ++n) {
      DatasetEntry entry;
      entry.clean = fs::absolute(files[i]).lexically_normal().string();
      entry.image_index = i;
      entry.noise = noises[n];
      entry.noise.seed = repetition_seed(master_seed, i, n, SeedStage::kDatasetBase);
      entry.tune_seed = repetition_seed(master_seed, i, n, SeedStage::kDatasetTune);
      entry.eval_seed = repetition_seed(master_seed, i, n, SeedStage::kDatasetEval);
      const std::string prefix = stem + "_n" + std::to_string(n);
      entry.base = prefix + "_base.png";
      entry.tune = prefix + "_tune.png";
      entry.eval = prefix + "_eval.png";

      const Image base = apply_noise(clean, entry.noise);
      Rng tune_rng(entry.tune_seed);
      Rng eval_rng(entry.eval_seed);
      save_image(base, (out / entry.base).string());
      save_image(add_gaussian(base, 127.5, copy_sigma, tune_rng), (out / entry.tune).string());
      save_image(add_gaussian(base, 127.5, copy_sigma, eval_rng), (out / entry.eval).string());
      manifest.entries.push_back(std::move(entry));
    }
  }
  nlohmann::json j = manifest;
  write_text(out / "manifest.json", j.dump(2) + "\n");
  return manifest;
}

DataSplit load_split(const DatasetManifest& manifest, const std::string& base_dir) {
  DataSplit split;
  const fs::path base(base_dir);
  for (std::size_t e = 0; e < manifest.entries.size(); ++e) {
    const DatasetEntry& entry = manifest.entries[e];
    Image clean = load_image(entry.clean);
    if (manifest.crop > 0) clean = center_crop(clean, manifest.crop);
    const std::string id = fs::path(entry.clean).stem().string() + "/" + entry.noise.label();
    TunePair tune;
    tune.id = id + "/tune";
    tune.noisy = load_image((base / entry.tune).string());
    tune.clean = clean;
    EvalPair eval;
    eval.id = id + "/eval";
    eval.noisy = load_image((base / entry.eval).string());
    eval.clean = clean;
    if (!tune.noisy.same_shape(clean) || !eval.noisy.same_shape(clean)) {
      throw Error("dataset entry " + id + " does not match its clean image size");
    }
    split.tune_pairs.push_back(std::move(tune));
    split.eval_pairs.push_back(std::move(eval));
  }
  return split;
}

void to_json(nlohmann::json& j, const DatasetManifest& manifest) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : manifest.entries) {
    entries.push_back({{"clean", e.clean},
                       {"image_index", e.image_index},
                       {"noise", e.noise},
                       {"base", e.base},
                       {"tune", e.tune},
                       {"eval", e.eval},
                       {"tune_seed", e.tune_seed},
                       {"eval_seed", e.eval_seed}});
  }
  j = {{"copy_sigma", manifest.copy_sigma}, {"master_seed", manifest.master_seed},
       {"crop", manifest.crop}, {"entries", entries}};
}

void from_json(const nlohmann::json& j, DatasetManifest& manifest) {
  manifest.copy_sigma = j.value("copy_sigma", 2.55);
  manifest.crop = j.value("crop", 0);
  manifest.master_seed = j.value("master_seed", std::uint64_t{0});
  manifest.entries.clear();
  for (const auto& e : j.at("entries")) {
    DatasetEntry entry;
    entry.clean = e.at("clean").get<std::string>();
    entry.image_index = e.value("image_index", std::size_t{0});
    entry.noise = e.at("noise").get<NoiseSpec>();
    entry.base = e.at("base").get<std::string>();
    entry.tune = e.at("tune").get<std::string>();
    entry.eval = e.at("eval").get<std::string>();
    entry.tune_seed = e.value("tune_seed", std::uint64_t{0});
    entry.eval_seed = e.value("eval_seed", std::uint64_t{0});
    manifest.entries.push_back(std::move(entry));
  }
}

void to_json(nlohmann::json& j, const MixedNoiseLayout& layout) {
  j = {{"nw", layout.nw},
       {"ne", layout.ne},
       {"sw", layout.sw},
       {"se", layout.se},
       {"patches",
        {{"n_patches", layout.patches.count},
         {"patch_w", layout.patches.patch_width},
         {"patch_h", layout.patches.patch_height}}}};
}

void from_json(const nlohmann::json& j, MixedNoiseLayout& layout) {
  MixedNoiseLayout out;
  if (j.contains("nw")) out.nw = j.at("nw").get<NoiseSpec>();
  if (j.contains("ne")) out.ne = j.at("ne").get<NoiseSpec>();
  if (j.contains("sw")) out.sw = j.at("sw").get<NoiseSpec>();
  if (j.contains("se")) out.se = j.at("se").get<NoiseSpec>();
  if (j.contains("patches")) {
    const auto& p = j.at("patches");
    out.patches.count = p.value("n_patches", out.patches.count);
    out.patches.patch_width = p.value("patch_w", out.patches.patch_width);
    out.patches.patch_height = p.value("patch_h", out.patches.patch_height);
  }
  layout = out;
}

}  // namespace cobra
