#include "cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "cobra/config.hpp"
#include "cobra/image_io.hpp"

namespace cobra {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

Config read_config(const Globals& g) {
  Config c = g.config.empty() ? Config{} : load_config(g.config);
  if (g.seed) c.master_seed = *g.seed;
  return c;
}

const std::string& require_out(const Globals& g) {
  if (g.out.empty()) throw UsageError("--out is required");
  return g.out;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path.string());
  f << text;
}

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

// ---- noise

struct NoiseArgs {
  std::string input;
  std::string kind;
  std::optional<double> mean, sigma, amount, ratio, peak, variance;
  std::optional<int> patches, patch_w, patch_h;
};

NoiseSpec noise_from_args(const NoiseArgs& a, std::uint64_t seed) {
  NoiseSpec spec;
  spec.seed = seed;
  switch (parse_noise_kind(a.kind)) {
    case NoiseKind::kNone: spec.params = NoNoise{}; break;
    case NoiseKind::kGaussian: {
      GaussianNoise p;
      p.mean = a.mean.value_or(p.mean);
      p.sigma = a.sigma.value_or(p.sigma);
      spec.params = p;
      break;
    }
    case NoiseKind::kSaltPepper: {
      SaltPepperNoise p;
      p.amount = a.amount.value_or(p.amount);
      p.ratio = a.ratio.value_or(p.ratio);
      spec.params = p;
      break;
    }
    case NoiseKind::kPoisson: {
      PoissonNoise p;
      p.peak = a.peak.value_or(p.peak);
      spec.params = p;
      break;
    }
    case NoiseKind::kSpeckle: {
      SpeckleNoise p;
      p.variance = a.variance.value_or(p.variance);
      spec.params = p;
      break;
    }
    case NoiseKind::kPatchSuppression: {
      PatchSuppression p;
      p.count = a.patches.value_or(p.count);
      p.patch_width = a.patch_w.value_or(p.patch_width);
      p.patch_height = a.patch_h.value_or(p.patch_height);
      spec.params = p;
      break;
    }
  }
  validate(spec);
  return spec;
}

void run_noise(const Globals& g, const NoiseArgs& a, std::ostream& out) {
  const std::string& dest = require_out(g);
  NoiseSpec spec;
  try {
    spec = noise_from_args(a, g.seed.value_or(0));
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  save_image(apply_noise(load_image(a.input), spec), dest);
  out << "wrote " << dest << " (" << spec.label() << ", seed " << spec.seed << ")\n";
}

// ---- denoise

struct DenoiseArgs {
  std::string input;
  std::string filter;
  std::string params;
};

void run_denoise(const Globals& g, const DenoiseArgs& a, std::ostream& out) {
  const std::string& dest = require_out(g);
  FilterConfig fc{a.filter, a.filter, json::object(), ""};
  if (!a.params.empty()) {
    try {
      fc.params = json::parse(a.params);
    } catch (const json::exception& e) {
      throw UsageError(std::string("--params is not valid JSON: ") + e.what());
    }
  }
  const DenoiseFilter f = make_filter(fc, FilterContext{stem_of(a.input)});
  save_image(f.apply(load_image(a.input)), dest);
  out << "wrote " << dest << " (" << f.name << ")\n";
}

// ---- aggregate

struct AggregateArgs {
  std::string input;
  std::string params_file;
  std::optional<double> epsilon;
  std::string alpha;
  std::string window;
};

CandidateWindow parse_window(const std::string& text) {
  if (text == "full") return CandidateWindow::full();
  try {
    std::size_t used = 0;
    const int r = std::stoi(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return CandidateWindow::radius(r);
  } catch (const std::logic_error&) {
    throw UsageError("--window must be \"full\" or a radius, got '" + text + "'");
  }
}

void run_aggregate(const Globals& g, const AggregateArgs& a, std::ostream& out) {
  const std::string& dest = require_out(g);
  const Config config = read_config(g);
  std::optional<CobraParams> params = config.cobra;
  if (!a.params_file.empty()) {
    std::ifstream f(a.params_file);
    if (!f) throw Error("cannot open " + a.params_file);
    params = json::parse(f).get<CobraParams>();
  }
  const bool overridden = a.epsilon || !a.alpha.empty() || !a.window.empty();
  if (!params && !overridden) {
    throw Error("config asks to tune cobra parameters; run `tune` first and pass --params, or set --epsilon/--alpha");
  }
  CobraParams p = params.value_or(CobraParams{});
  if (a.epsilon) p.epsilon = *a.epsilon;
  if (!a.alpha.empty()) p.alpha = Proportion::parse(a.alpha);
  if (!a.window.empty()) p.window = parse_window(a.window);
  validate(p);

  const Image noisy = load_image(a.input);
  const FilterBank bank = make_bank(config.bank, FilterContext{stem_of(a.input)});
  save_image(aggregate_with_bank(noisy, bank, p), dest);
  out << "wrote " << dest << " (" << bank.size() << " machines, epsilon " << p.epsilon << ", alpha "
      << p.alpha.to_string() << ", window " << p.window.to_string() << ")\n";
}

// ---- tune

struct TuneArgs {
  std::vector<std::string> images;
  std::string dataset;
};

void run_tune(const Globals& g, const TuneArgs& a, std::ostream& out) {
  const std::string& dest = require_out(g);
  const Config config = read_config(g);
  const FilterBank bank = make_bank(config.bank);
  const TuningGrid grid = grid_from_json(config.grid, static_cast<int>(bank.size()));

  DataSplit split;
  if (!a.dataset.empty()) {
    std::ifstream f(fs::path(a.dataset) / "manifest.json");
    if (!f) throw Error("no manifest.json in " + a.dataset);
    const DatasetManifest manifest = json::parse(f).get<DatasetManifest>();
    split = load_split(manifest, a.dataset);
  } else {
    const std::vector<std::string>& paths = a.images.empty() ? config.clean_images : a.images;
    if (paths.empty()) throw UsageError("tune needs clean images or --dataset");
    const auto clean = load_clean_images(paths, config.crop);
    for (std::size_t i = 0; i < clean.size(); ++i) {
      for (int t = 0; t < config.tune_copies; ++t) {
        TunePair pair;
        pair.id = clean[i].name + "/tune" + std::to_string(t);
        pair.noisy = apply_noise_model(clean[i].image, config.noise,
                                       repetition_seed(config.master_seed, i, static_cast<std::size_t>(t),
                                                       SeedStage::kTuneNoise));
        pair.clean = clean[i].image;
        split.tune_pairs.push_back(std::move(pair));
      }
    }
  }

  const TuningResult result = grid_search(split.tune_pairs, bank, grid, config.tune_window);
  fs::create_directories(dest);
  write_file(fs::path(dest) / "params.json", json(result.params).dump(2) + "\n");
  write_file(fs::path(dest) / "tuning.csv", tuning_table_csv(result, grid.objective));
  out << "epsilon " << format_number(result.params.epsilon) << ", alpha " << result.params.alpha.to_string() << ", "
      << to_string(grid.objective) << ' ' << format_number(result.objective) << '\n';

  if (!split.eval_pairs.empty()) {
    std::ostringstream csv;
    csv << "pair,mae,rmse,psnr,uqi\n";
    for (const auto& row : evaluate_params(result.params, split.eval_pairs, bank)) {
      csv << row.pair_id << ',' << format_number(row.scores.mae) << ',' << format_number(row.scores.rmse) << ','
          << format_number(row.scores.psnr) << ',' << format_number(row.scores.uqi) << '\n';
    }
    write_file(fs::path(dest) / "eval.csv", csv.str());
  }
}

// ---- bench

struct BenchArgs {
  std::vector<std::string> images;
  std::optional<int> repetitions;
  std::optional<int> crop;
};

void run_bench(const Globals& g, const BenchArgs& a, std::ostream& out) {
  const std::string& dest = require_out(g);
  Config config = read_config(g);
  if (a.repetitions) config.repetitions = *a.repetitions;
  if (a.crop) config.crop = *a.crop;
  const std::vector<std::string>& paths = a.images.empty() ? config.clean_images : a.images;
  if (paths.empty()) throw UsageError("bench needs clean images (arguments or clean_images in the config)");
  const ExperimentSpec spec = make_experiment_spec(config, load_clean_images(paths, config.crop), dest);
  const ExperimentResult result = run_experiment(spec);
  out << to_markdown(result.report);
  out << "\ncobra: epsilon " << format_number(result.params.epsilon) << ", alpha " << result.params.alpha.to_string()
      << '\n';
}

// ---- dataset

struct DatasetArgs {
  std::string clean_dir;
  std::optional<int> crop;
};

void run_dataset(const Globals& g, const DatasetArgs& a, std::ostream& out) {
  const std::string& dest = require_out(g);
  const Config config = read_config(g);
  const DatasetManifest manifest = build_dataset(a.clean_dir, config.dataset_noises, config.master_seed, dest,
                                                 config.copy_sigma, a.crop.value_or(config.crop));
  out << "wrote " << manifest.entries.size() << " noisy images (x2 copies) to " << dest << '\n';
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"COBRA aggregation of denoising filters", "cobra"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config, "JSON config file");
  app.add_option("--seed", g.seed, "Master seed (noise seed for `noise`)");
  app.add_option("--out", g.out, "Output image or directory");

  NoiseArgs noise_args;
  auto* noise = app.add_subcommand("noise", "Add one kind of noise to an image");
  noise->add_option("input", noise_args.input, "Clean image")->required();
  noise->add_option("--kind", noise_args.kind, "gaussian, salt_pepper, poisson, speckle, patch_suppression, none")
      ->required();
  noise->add_option("--mean", noise_args.mean, "Gaussian mean, 0-255 scale");
  noise->add_option("--sigma", noise_args.sigma, "Gaussian sigma, 0-255 scale");
  noise->add_option("--amount", noise_args.amount, "Salt-and-pepper: fraction of pixels replaced");
  noise->add_option("--ratio", noise_args.ratio, "Salt-and-pepper: fraction of replaced pixels set white");
  noise->add_option("--peak", noise_args.peak, "Poisson peak count");
  noise->add_option("--variance", noise_args.variance, "Speckle variance");
  noise->add_option("--patches", noise_args.patches, "Number of suppressed patches");
  noise->add_option("--patch-w", noise_args.patch_w, "Patch width");
  noise->add_option("--patch-h", noise_args.patch_h, "Patch height");

  DenoiseArgs denoise_args;
  auto* denoise = app.add_subcommand("denoise", "Run one filter from the bank");
  denoise->add_option("input", denoise_args.input, "Noisy image")->required();
  denoise->add_option("--filter", denoise_args.filter, "Filter kind")->required();
  denoise->add_option("--params", denoise_args.params, "Filter parameters as JSON");

  AggregateArgs agg_args;
  auto* aggregate = app.add_subcommand("aggregate", "Denoise an image with the configured bank and COBRA");
  aggregate->add_option("input", agg_args.input, "Noisy image")->required();
  aggregate->add_option("--params", agg_args.params_file, "params.json written by `tune`");
  aggregate->add_option("--epsilon", agg_args.epsilon, "Override epsilon");
  aggregate->add_option("--alpha", agg_args.alpha, "Override alpha, k/m or decimal");
  aggregate->add_option("--window", agg_args.window, "Override window: radius or \"full\"");

  TuneArgs tune_args;
  auto* tune = app.add_subcommand("tune", "Grid-search epsilon and alpha");
  tune->add_option("images", tune_args.images, "Clean images; noisy copies are drawn from the config noise");
  tune->add_option("--dataset", tune_args.dataset, "Directory written by `dataset`; tune on tune copies");

  BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench", "Run the repeated experiment and write reports");
  bench->add_option("images", bench_args.images, "Clean images (default: clean_images from the config)");
  bench->add_option("--reps", bench_args.repetitions, "Override the repetition count");
  bench->add_option("--crop", bench_args.crop, "Center crop side, 0 for full size");

  DatasetArgs dataset_args;
  auto* dataset = app.add_subcommand("dataset", "Build noisy tune/eval copies of a directory of clean images");
  dataset->add_option("clean_dir", dataset_args.clean_dir, "Directory of clean .png/.pgm images")->required();
  dataset->add_option("--crop", dataset_args.crop, "Center crop side, 0 for full size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (noise->parsed()) run_noise(g, noise_args, out);
    if (denoise->parsed()) run_denoise(g, denoise_args, out);
    if (aggregate->parsed()) run_aggregate(g, agg_args, out);
    if (tune->parsed()) run_tune(g, tune_args, out);
    if (bench->parsed()) run_bench(g, bench_args, out);
    if (dataset->parsed()) run_dataset(g, dataset_args, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace cobra
