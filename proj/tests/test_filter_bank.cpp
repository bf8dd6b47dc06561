#include <doctest.h>

#include "cobra/filter_bank.hpp"
#include "cobra/filters.hpp"
#include "cobra/image_io.hpp"
#include "support.hpp"

using namespace cobra;
using nlohmann::json;

TEST_CASE("default bank has eight uniquely named machines") {
  const auto configs = default_bank_config();
  CHECK(configs.size() == 8);
  const FilterBank bank = make_bank(configs);
  CHECK(bank.size() == 8);
  CHECK(bank.names() == std::vector<std::string>{"gaussian", "median", "bilateral", "tv_chambolle", "nl_means",
                                                 "richardson_lucy", "lee", "inpaint"});
}

TEST_CASE("filter configs are validated") {
  CHECK_THROWS_AS(make_filter({"x", "sharpen", json::object(), ""}), Error);
  CHECK_THROWS_AS(make_filter({"m", "median", {{"radius", 3}}, ""}), Error);
  CHECK_THROWS_AS(make_filter({"m", "median", {{"size", 0}}, ""}), Error);
  CHECK_THROWS_AS(make_filter({"g", "gaussian", {{"sigma", -1.0}}, ""}), Error);
  CHECK_THROWS_AS(make_filter({"l", "lee", {{"window", 4}}, ""}), Error);
  CHECK_THROWS_AS(make_filter({"i", "inpaint", {{"mask", "blue"}}, ""}), Error);
  CHECK_THROWS_AS(make_filter({"e", "external", json::object(), ""}), Error);

  const DenoiseFilter m = make_filter({"m5", "median", {{"size", 5}}, ""});
  CHECK(m.params.at("size") == 5);
  CHECK(m.kind == "median");
  CHECK(m.name == "m5");
}

TEST_CASE("bank rejects duplicate names") {
  FilterBank bank;
  bank.add(identity_filter("a"));
  CHECK_THROWS_AS(bank.add(identity_filter("a")), Error);
  CHECK_THROWS_AS(make_bank({{"median", "median", json::object(), ""}, {"median", "median", json::object(), ""}}),
                  Error);
}

TEST_CASE("apply_bank keeps bank order") {
  Rng rng(4);
  const Image img = cobra::testing::random_image(16, 12, rng);

  FilterBank single;
  single.add(identity_filter());
  const auto one = apply_bank(single, img);
  REQUIRE(one.size() == 1);
  CHECK(one[0] == img);

  const FilterBank bank = make_bank(default_bank_config());
  const auto outs = apply_bank(bank, img);
  REQUIRE(outs.size() == bank.size());
  for (std::size_t k = 0; k < bank.size(); ++k) CHECK(outs[k] == bank[k].apply(img));
  CHECK(apply_bank(bank, img) == outs);

  CHECK_THROWS_AS(apply_bank(FilterBank{}, img), Error);
}

TEST_CASE("filter errors surface from apply_bank") {
  FilterBank bank;
  bank.add(identity_filter());
  bank.add({"bad", "identity", json::object(), [](const Image&) { return Image(1, 1); }});
  CHECK_THROWS_AS(apply_bank(bank, Image(4, 4)), Error);
}

TEST_CASE("external filters read pre-rendered outputs by input stem") {
  cobra::testing::TempDir dir("external");
  Rng rng(2);
  Image rendered = cobra::testing::random_quantized(8, 6, rng);
  save_image(rendered, dir / "photo.png");

  const FilterConfig config{"bm3d-ext", "external", json::object(), dir.path().string()};
  const DenoiseFilter f = make_filter(config, FilterContext{"photo"});
  CHECK(f.apply(Image(8, 6)) == rendered);
  CHECK_THROWS_AS(f.apply(Image(5, 5)), Error);

  const DenoiseFilter missing = make_filter(config, FilterContext{"other"});
  CHECK_THROWS_AS(missing.apply(Image(8, 6)), Error);
}

TEST_CASE("filter config json") {
  const auto fc = json::parse(R"({"name": "median", "params": {"size": 3}})").get<FilterConfig>();
  CHECK(fc.kind == "median");
  CHECK(fc.params.at("size") == 3);

  const auto ext = json::parse(R"({"name": "bm3d-ext", "kind": "external", "path": "dir"})").get<FilterConfig>();
  CHECK(ext.kind == "external");
  CHECK(ext.path == "dir");

  const json back = ext;
  CHECK(back.get<FilterConfig>().path == "dir");
  CHECK(back.at("kind") == "external");
}

TEST_CASE("default parameter table") {
  CHECK(default_filter_params("median").at("size") == 3);
  CHECK(default_filter_params("richardson_lucy").at("psf_size") == 5);
  CHECK_THROWS_AS(default_filter_params("sharpen"), Error);
  for (const auto& kind : filter_kinds()) CHECK_NOTHROW(default_filter_params(kind));
}
