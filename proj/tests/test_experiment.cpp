#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "cobra/config.hpp"
#include "cobra/experiment.hpp"
#include "cobra/image_io.hpp"
#include "support.hpp"

using namespace cobra;
using cobra::testing::TempDir;
using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

NamedImage small_clean(int size = 24) {
  return {"camera", center_crop(load_image(cobra::testing::data_path("camera.png")), size)};
}

CobraParams fixed_params() {
  CobraParams p;
  p.epsilon = 0.1;
  p.alpha = Proportion(1, 2);
  p.window = CandidateWindow::radius(3);
  return p;
}

ExperimentSpec small_spec() {
  ExperimentSpec spec;
  spec.clean_images = {small_clean()};
  spec.noise = NoiseSpec{SaltPepperNoise{}, 0};
  spec.bank = {{"median", "median", json::object(), ""}, {"gaussian", "gaussian", json::object(), ""}};
  spec.cobra = fixed_params();
  spec.repetitions = 3;
  spec.master_seed = 2024;
  return spec;
}

}  // namespace

TEST_CASE("report layout") {
  MethodScores a{"a", {score_all(Image(3, 3, 0.5), Image(3, 3, 0.4)), score_all(Image(3, 3, 0.5), Image(3, 3, 0.3))}};
  MethodScores b{"b", {score_all(Image(3, 3, 0.4), Image(3, 3, 0.4)), score_all(Image(3, 3, 0.35), Image(3, 3, 0.3))}};
  const ScoreReport report = build_report("noise", {a, b});
  CHECK(report.rows.size() == 2 * 4);
  CHECK(report.methods() == std::vector<std::string>{"a", "b"});
  CHECK(report.best(Metric::kRmse) == "b");
  CHECK(report.at("a", Metric::kMae).summary.count == 2);
  CHECK(report.at("a", Metric::kMae).summary.mean == doctest::Approx(0.15));

  const std::string csv = to_csv(report);
  CHECK(csv.rfind("noise,method,metric,mean,std,reps\n", 0) == 0);
  CHECK(csv.find("noise,b,psnr,inf,inf,2\n") != std::string::npos);
  const std::string md = to_markdown(report);
  CHECK(md.find("| b | **") != std::string::npos);
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("repetition seeds are distinct per stage, image and repetition") {
  std::set<std::uint64_t> seen;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t r = 0; r < 10; ++r) {
      for (SeedStage s : {SeedStage::kEvalNoise, SeedStage::kTuneNoise, SeedStage::kDatasetBase}) {
        seen.insert(repetition_seed(1, i, r, s));
      }
    }
  }
  CHECK(seen.size() == 90);
}

TEST_CASE("mixed noise") {
  Rng rng(5);
  const Image clean = cobra::testing::random_image(7, 5, rng);

  SUBCASE("identity layout leaves the image clean") {
    MixedNoiseLayout layout;
    layout.nw = {GaussianNoise{127.5, 0.0}, 0};
    layout.ne = {SaltPepperNoise{0.2, 0.0}, 0};
    layout.sw = {NoNoise{}, 0};
    layout.se = {SpeckleNoise{0.0}, 0};
    layout.patches.count = 0;
    CHECK(make_mixed_noise(clean, layout, 3) == clean);
  }
  SUBCASE("quadrant boundaries split at the rounded-up half") {
    MixedNoiseLayout layout;
    layout.nw = {SaltPepperNoise{1.0, 1.0}, 0};  // all white
    layout.ne = {SaltPepperNoise{0.0, 1.0}, 0};  // all black
    layout.sw = {NoNoise{}, 0};
    layout.se = {SpeckleNoise{0.0}, 0};
    layout.patches.count = 0;
    const Image out = make_mixed_noise(clean, layout, 3);
    for (int r = 0; r < 5; ++r) {
      for (int c = 0; c < 7; ++c) {
        const bool north = r < 3;
        const bool west = c < 4;
        CAPTURE(r);
        CAPTURE(c);
        if (north && west) CHECK(out(r, c) == 1.0);
        if (north && !west) CHECK(out(r, c) == 0.0);
        if (!north) CHECK(out(r, c) == clean(r, c));
      }
    }
  }
  SUBCASE("default layout keeps black pixels black in the speckle quadrant") {
    Image dark = clean;
    for (int r = 3; r < 5; ++r) {
      for (int c = 4; c < 7; ++c) dark(r, c) = 0.0;
    }
    MixedNoiseLayout layout;
    layout.patches.count = 0;
    const Image out = make_mixed_noise(dark, layout, 11);
    for (int r = 3; r < 5; ++r) {
      for (int c = 4; c < 7; ++c) CHECK(out(r, c) == 0.0);
    }
  }
  SUBCASE("deterministic under the seed, ignores layout seeds") {
    MixedNoiseLayout layout;
    layout.patches = {3, 2, 2};
    const Image a = make_mixed_noise(clean, layout, 9);
    layout.nw.seed = 12345;
    CHECK(make_mixed_noise(clean, layout, 9) == a);
    CHECK(make_mixed_noise(clean, layout, 10) != a);
  }
  SUBCASE("images smaller than 2x2 are rejected") {
    CHECK_THROWS_AS(make_mixed_noise(Image(1, 5), MixedNoiseLayout{}, 0), Error);
  }
}

TEST_CASE("identity bank on clean input reproduces identity scores") {
  Rng rng(7);
  ExperimentSpec spec;
  spec.clean_images = {{"random", cobra::testing::random_image(12, 12, rng)}};
  spec.noise = NoiseSpec{NoNoise{}, 0};
  spec.bank = {{"identity", "identity", json::object(), ""}};
  CobraParams p;
  p.epsilon = 1e-12;
  p.alpha = Proportion(1, 1);
  spec.cobra = p;
  spec.repetitions = 1;
  const ExperimentResult result = run_experiment(spec);
  CHECK(result.report.rows.size() == 2 * 4);
  for (Metric m : kAllMetrics) {
    CHECK(result.report.at(kCobraMethod, m).summary.mean == result.report.at("identity", m).summary.mean);
  }
}

TEST_CASE("experiment rows are reproducible one repetition at a time") {
  const ExperimentSpec spec = small_spec();
  const ExperimentResult result = run_experiment(spec);
  REQUIRE(result.scores.size() == 3);
  CHECK(result.report.rows.size() == 3 * 4);
  CHECK(result.report.methods() == std::vector<std::string>{"median", "gaussian", "cobra"});

  const FilterBank bank = make_bank(spec.bank);
  const NamedImage& clean = spec.clean_images[0];
  for (int rep = 0; rep < spec.repetitions; ++rep) {
    const Image noisy = apply_noise_model(
        clean.image, spec.noise, repetition_seed(spec.master_seed, 0, static_cast<std::size_t>(rep), SeedStage::kEvalNoise));
    for (std::size_t k = 0; k < bank.size(); ++k) {
      CHECK(result.scores[k].samples[rep].rmse == score_all(bank[k].apply(noisy), clean.image).rmse);
    }
    const Image cobra_out = aggregate_with_bank(noisy, bank, *spec.cobra);
    CHECK(result.scores[2].samples[rep].mae == score_all(cobra_out, clean.image).mae);
    if (rep == 0) {
      CHECK(result.noisy == noisy);
      CHECK(result.denoised == cobra_out);
    }
  }
  // difference image is centered on mid-gray
  CHECK(result.difference(0, 0) ==
        doctest::Approx(std::clamp(0.5 + clean.image(0, 0) - result.denoised(0, 0), 0.0, 1.0)));
}

TEST_CASE("experiment outputs are byte-identical across runs") {
  TempDir a("exp_a"), b("exp_b");
  ExperimentSpec spec = small_spec();
  spec.output_dir = a.path().string();
  run_experiment(spec);
  spec.output_dir = b.path().string();
  run_experiment(spec);
  for (const char* name : {"report.csv", "report.md", "noisy.png", "cobra.png", "difference.png", "params.json"}) {
    CAPTURE(name);
    const std::string first = slurp(a / name);
    CHECK(!first.empty());
    CHECK(first == slurp(b / name));
  }
}

TEST_CASE("experiment tunes on independent draws when no parameters are given") {
  ExperimentSpec spec = small_spec();
  spec.cobra.reset();
  spec.grid = json::parse(R"({"epsilons": [0.05, 0.2]})");
  spec.tune_window = CandidateWindow::radius(2);
  spec.repetitions = 1;
  const ExperimentResult result = run_experiment(spec);
  REQUIRE(result.tuning);
  CHECK(result.tuning->table.size() == 2 * 2);
  CHECK(result.params.epsilon == result.tuning->params.epsilon);
  CHECK(result.params.window == CandidateWindow::radius(2));
}

TEST_CASE("experiment errors carry context") {
  ExperimentSpec spec = small_spec();
  spec.repetitions = 0;
  CHECK_THROWS_AS(run_experiment(spec), Error);
  spec = small_spec();
  spec.clean_images.clear();
  CHECK_THROWS_AS(run_experiment(spec), Error);
  spec = small_spec();
  spec.bank = {{"ext", "external", json::object(), "/nonexistent"}};
  try {
    run_experiment(spec);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("repetition 0") != std::string::npos);
    CHECK(std::string(e.what()).find("camera") != std::string::npos);
  }
}

TEST_CASE("autotune demo") {
  const NamedImage clean = small_clean();
  const ExperimentResult one = run_autotune_demo(clean, NoiseSpec{SaltPepperNoise{}, 0}, {3}, fixed_params(), 2, 1);
  CHECK(one.report.methods() == std::vector<std::string>{"median-3", "cobra"});
  const ExperimentResult three =
      run_autotune_demo(clean, NoiseSpec{SaltPepperNoise{}, 0}, {3, 5, 11}, fixed_params(), 1, 1);
  CHECK(three.report.methods().size() == 4);
  CHECK_THROWS_AS(run_autotune_demo(clean, NoiseSpec{}, {}, fixed_params(), 1, 1), Error);
}

TEST_CASE("known-noise banks") {
  auto names = [](const std::vector<FilterConfig>& bank) {
    std::vector<std::string> out;
    for (const auto& f : bank) out.push_back(f.name);
    return out;
  };
  CHECK(names(known_noise_bank(NoiseKind::kGaussian)) ==
        std::vector<std::string>{"gaussian", "bilateral", "tv_chambolle", "nl_means"});
  const auto sp = known_noise_bank(NoiseKind::kSaltPepper);
  CHECK(names(sp) == std::vector<std::string>{"median", "tv_chambolle", "inpaint"});
  CHECK(sp[2].params.at("mask") == "extremes");
  for (NoiseKind k : {NoiseKind::kPoisson, NoiseKind::kSpeckle, NoiseKind::kPatchSuppression, NoiseKind::kNone}) {
    CHECK_NOTHROW(make_bank(known_noise_bank(k)));
  }
}

TEST_CASE("dataset construction") {
  TempDir clean_dir("ds_clean"), out_a("ds_a"), out_b("ds_b");
  const Image camera = center_crop(load_image(cobra::testing::data_path("camera.png")), 20);
  save_image(camera, clean_dir / "camera.png");

  SUBCASE("one image and one noise give a base and two copies") {
    const DatasetManifest m =
        build_dataset(clean_dir.path().string(), {{SaltPepperNoise{}, 0}}, 5, out_a.path().string());
    REQUIRE(m.entries.size() == 1);
    const DatasetEntry& e = m.entries[0];
    CHECK(std::filesystem::exists(out_a / e.base));
    CHECK(std::filesystem::exists(out_a / e.tune));
    CHECK(std::filesystem::exists(out_a / e.eval));
    CHECK(std::filesystem::exists(out_a / "manifest.json"));
    CHECK(e.tune_seed != e.eval_seed);
    CHECK(load_image(out_a / e.tune) != load_image(out_a / e.eval));

    const DataSplit split = load_split(m, out_a.path().string());
    REQUIRE(split.tune_pairs.size() == 1);
    REQUIRE(split.eval_pairs.size() == 1);
    CHECK(split.tune_pairs[0].clean == camera);
    CHECK(split.tune_pairs[0].id != split.eval_pairs[0].id);

    const json j = m;
    const auto back = j.get<DatasetManifest>();
    CHECK(back.entries[0].tune == e.tune);
    CHECK(back.entries[0].noise.seed == e.noise.seed);
  }
  SUBCASE("same seed gives a byte-identical dataset") {
    const auto noises = default_noise_settings();
    const auto m = build_dataset(clean_dir.path().string(), noises, 8, out_a.path().string());
    build_dataset(clean_dir.path().string(), noises, 8, out_b.path().string());
    CHECK(m.entries.size() == 5);
    for (const auto& entry : std::filesystem::directory_iterator(out_a.path())) {
      const std::string name = entry.path().filename().string();
      CAPTURE(name);
      CHECK(slurp(entry.path().string()) == slurp(out_b / name));
    }
  }
  SUBCASE("every clean image times every noise") {
    save_image(center_crop(load_image(cobra::testing::data_path("coins.png")), 20), clean_dir / "coins.png");
    save_image(center_crop(load_image(cobra::testing::data_path("brick.png")), 20), clean_dir / "brick.pgm");
    const auto m = build_dataset(clean_dir.path().string(), default_noise_settings(), 1, out_a.path().string());
    CHECK(m.entries.size() == 15);
  }
  SUBCASE("empty or missing directories are errors") {
    TempDir empty("ds_empty");
    CHECK_THROWS_AS(build_dataset(empty.path().string(), default_noise_settings(), 1, out_a.path().string()), Error);
    CHECK_THROWS_AS(build_dataset("/nonexistent/dir", default_noise_settings(), 1, out_a.path().string()), Error);
  }
}

TEST_CASE("config parsing") {
  SUBCASE("defaults") {
    const Config c = config_from_json(json::object());
    CHECK(c.bank.size() == 8);
    REQUIRE(c.cobra);
    CHECK(c.cobra->alpha == Proportion(4, 7));
    CHECK(c.repetitions == 100);
    CHECK(c.crop == 128);
    CHECK(c.dataset_noises.size() == 5);
  }
  SUBCASE("documented keys") {
    const Config c = config_from_json(json::parse(R"({
      "bank": [{"name": "median", "params": {"size": 5}}, {"name": "g2", "kind": "gaussian", "params": {"sigma": 2.0}}],
      "cobra": "tune",
      "noise": {"kind": "gaussian", "params": {"mu": 127.5, "sigma": 10}, "seed": 3},
      "grid": {"epsilons": [0.1, 0.2]},
      "repetitions": 7,
      "master_seed": 99,
      "tune_window": "full",
      "experiment": "mixed"
    })"));
    CHECK(c.bank.size() == 2);
    CHECK(c.bank[1].kind == "gaussian");
    CHECK_FALSE(c.cobra);
    CHECK(c.noise.kind() == NoiseKind::kGaussian);
    CHECK(c.repetitions == 7);
    CHECK(c.master_seed == 99);
    CHECK(c.tune_window.is_full());
    CHECK(c.experiment == ExperimentKind::kMixed);
  }
  SUBCASE("round trip") {
    Config c;
    c.repetitions = 4;
    c.cobra.reset();
    c.known_noise = true;
    const Config back = config_from_json(config_to_json(c));
    CHECK(back.repetitions == 4);
    CHECK_FALSE(back.cobra);
    CHECK(back.known_noise);
    CHECK(back.bank.size() == c.bank.size());
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"repetitons": 3})")), Error);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"defaults_version": 999})")), Error);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"bank": [{"name": "sharpen"}]})")), Error);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"repetitions": 0})")), Error);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"cobra": "auto"})")), Error);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"experiment": "triple"})")), Error);
    CHECK_THROWS_AS(config_from_json(json::array()), Error);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), Error);
  }
}

TEST_CASE("experiment spec from config") {
  Config c;
  c.known_noise = true;
  c.noise = {GaussianNoise{}, 0};
  CHECK(effective_bank(c).size() == 4);
  c.known_noise = false;
  CHECK(effective_bank(c).size() == 8);

  c.experiment = ExperimentKind::kAutotune;
  const ExperimentSpec autotune = make_experiment_spec(c, {small_clean()}, "");
  REQUIRE(autotune.bank.size() == 3);
  CHECK(autotune.bank[2].name == "median-11");

  c.experiment = ExperimentKind::kMixed;
  const ExperimentSpec mixed = make_experiment_spec(c, {small_clean()}, "out");
  CHECK(std::holds_alternative<MixedNoiseLayout>(mixed.noise));
  CHECK(mixed.output_dir == "out");
}
