#include <doctest.h>

#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "cobra/image_io.hpp"
#include "support.hpp"

using namespace cobra;
using cobra::testing::TempDir;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "cobra");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

}  // namespace

TEST_CASE("usage errors exit 1 with usage on the error stream") {
  const Run none = run({});
  CHECK(none.code == kExitUsage);
  CHECK(none.err.find("Usage") != std::string::npos);
  CHECK(none.out.empty());

  CHECK(run({"frobnicate"}).code == kExitUsage);
  CHECK(run({"noise", "--kind", "gaussian", "--bogus", "1", "in.png", "--out", "x.png"}).code == kExitUsage);
  CHECK(run({"noise", "--kind", "pink", "in.png", "--out", "x.png"}).code == kExitUsage);
  const Run no_out = run({"noise", "--kind", "gaussian", cobra::testing::data_path("coins.png")});
  CHECK(no_out.code == kExitUsage);
  CHECK(no_out.err.find("--out") != std::string::npos);
}

TEST_CASE("help exits 0") {
  const Run help = run({"--help"});
  CHECK(help.code == kExitOk);
  CHECK(help.out.find("aggregate") != std::string::npos);
}

TEST_CASE("runtime errors exit 2") {
  TempDir dir("cli_rt");
  const Run missing = run({"noise", "--kind", "gaussian", dir / "missing.png", "--out", dir / "n.png"});
  CHECK(missing.code == kExitRuntime);
  CHECK(missing.err.find("missing.png") != std::string::npos);
  write(dir / "bad.json", "{not json");
  CHECK(run({"aggregate", "--config", dir / "bad.json", cobra::testing::data_path("coins.png"), "--out", dir / "a.png"})
            .code == kExitRuntime);
}

TEST_CASE("noise is deterministic under --seed") {
  TempDir dir("cli_noise");
  const std::string in = cobra::testing::data_path("coins.png");
  const std::vector<std::string> base = {"noise", "--kind", "salt_pepper", "--amount", "0.1", "--ratio", "0.2"};
  auto with = [&](const std::string& seed, const std::string& out) {
    auto args = base;
    for (const auto& a : {std::string("--seed"), seed, in, std::string("--out"), out}) args.push_back(a);
    return run(args);
  };
  REQUIRE(with("7", dir / "a.png").code == kExitOk);
  REQUIRE(with("7", dir / "b.png").code == kExitOk);
  REQUIRE(with("8", dir / "c.png").code == kExitOk);
  CHECK(slurp(dir / "a.png") == slurp(dir / "b.png"));
  CHECK(slurp(dir / "a.png") != slurp(dir / "c.png"));

  const Image clean = load_image(in);
  const Image noisy = load_image(dir / "a.png");
  std::size_t changed = 0;
  for (std::size_t i = 0; i < clean.size(); ++i) changed += clean[i] != noisy[i];
  CHECK(changed <= static_cast<std::size_t>(std::lround(0.1 * static_cast<double>(clean.size()))));
}

TEST_CASE("denoise and aggregate write images") {
  TempDir dir("cli_agg");
  const Image small = center_crop(load_image(cobra::testing::data_path("camera.png")), 32);
  save_image(small, dir / "in.png");

  const Run d = run({"denoise", "--filter", "median", "--params", R"({"size": 5})", dir / "in.png", "--out",
                     dir / "median.png"});
  CHECK(d.code == kExitOk);
  CHECK(load_image(dir / "median.png") == load_image(dir / "median.png"));
  CHECK(run({"denoise", "--filter", "median", "--params", "{oops", dir / "in.png", "--out", dir / "m.png"}).code ==
        kExitUsage);

  write(dir / "c.json", R"({"bank": [{"name": "median"}, {"name": "gaussian"}],
                            "cobra": {"epsilon": 0.1, "alpha": "1/2", "window_radius": 3}})");
  const Run a = run({"aggregate", "--config", dir / "c.json", dir / "in.png", "--out", dir / "out.png"});
  CHECK(a.code == kExitOk);
  const Image out = load_image(dir / "out.png");
  CHECK(out.same_shape(small));

  write(dir / "tune.json", R"({"bank": [{"name": "median"}], "cobra": "tune"})");
  CHECK(run({"aggregate", "--config", dir / "tune.json", dir / "in.png", "--out", dir / "o.png"}).code == kExitRuntime);
  CHECK(run({"aggregate", "--config", dir / "tune.json", "--epsilon", "0.1", "--alpha", "1/1", "--window", "full",
             dir / "in.png", "--out", dir / "o.png"})
            .code == kExitOk);
  CHECK(run({"aggregate", "--window", "wide", dir / "in.png", "--out", dir / "o.png"}).code == kExitUsage);
}

TEST_CASE("tune, bench and dataset") {
  TempDir dir("cli_bench");
  const Image small = center_crop(load_image(cobra::testing::data_path("camera.png")), 40);
  std::filesystem::create_directories(dir / "clean");
  save_image(small, dir / "clean/camera.png");
  write(dir / "c.json", R"({"bank": [{"name": "median"}, {"name": "gaussian"}], "cobra": "tune",
                            "grid": {"epsilons": [0.05, 0.2]}, "tune_window": 2, "tune_copies": 1,
                            "repetitions": 2, "crop": 24,
                            "noises": [{"kind": "salt_pepper", "params": {}}]})");

  const Run tune = run({"tune", "--config", dir / "c.json", "--seed", "3", dir / "clean/camera.png", "--out", dir / "tune"});
  CHECK(tune.code == kExitOk);
  CHECK(std::filesystem::exists(dir / "tune/params.json"));
  CHECK(slurp(dir / "tune/tuning.csv").rfind("epsilon,alpha,objective,value\n", 0) == 0);

  const Run ds = run({"dataset", "--config", dir / "c.json", "--seed", "3", dir / "clean", "--out", dir / "ds"});
  CHECK(ds.code == kExitOk);
  const Run tune_ds = run({"tune", "--config", dir / "c.json", "--dataset", dir / "ds", "--out", dir / "tune_ds"});
  CHECK(tune_ds.code == kExitOk);
  CHECK(std::filesystem::exists(dir / "tune_ds/eval.csv"));

  const Run b1 = run({"bench", "--config", dir / "c.json", "--seed", "3", dir / "clean/camera.png", "--out", dir / "b1"});
  const Run b2 = run({"bench", "--config", dir / "c.json", "--seed", "3", dir / "clean/camera.png", "--out", dir / "b2"});
  REQUIRE(b1.code == kExitOk);
  REQUIRE(b2.code == kExitOk);
  CHECK(b1.out.find("| cobra |") != std::string::npos);
  for (const char* name : {"report.csv", "cobra.png", "noisy.png", "difference.png"}) {
    CHECK(slurp(dir / (std::string("b1/") + name)) == slurp(dir / (std::string("b2/") + name)));
  }
  CHECK(run({"bench", "--config", dir / "c.json", "--out", dir / "b3"}).code == kExitUsage);
}
