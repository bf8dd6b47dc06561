#include <doctest.h>

#include <omp.h>

#include <algorithm>
#include <cmath>

#include "cobra/aggregate.hpp"
#include "cobra/filters.hpp"
#include "support.hpp"

using namespace cobra;
using cobra::testing::random_image;
using cobra::testing::random_quantized;

namespace {

// The three-pixel example: two machines over a 1 x 3 strip.
struct Strip {
  Image noisy{3, 1, {10 / 255.0, 12 / 255.0, 100 / 255.0}};
  Image f1{3, 1, {10 / 255.0, 11 / 255.0, 90 / 255.0}};
  Image f2{3, 1, {9 / 255.0, 12 / 255.0, 95 / 255.0}};
  MachineOutputs outs{std::vector<Image>{f1, f2}};
};

CobraParams params_of(double epsilon, Proportion alpha, CandidateWindow window = CandidateWindow::full()) {
  CobraParams p;
  p.epsilon = epsilon;
  p.alpha = alpha;
  p.window = window;
  return p;
}

std::vector<Image> random_machines(int m, int w, int h, Rng& rng) {
  std::vector<Image> outs;
  for (int k = 0; k < m; ++k) outs.push_back(random_quantized(w, h, rng, 16));
  return outs;
}

}  // namespace

TEST_CASE("proportion arithmetic is exact") {
  const Proportion a(4, 7);
  CHECK(a.min_count(7) == 4);
  CHECK(a.reached(4, 7));
  CHECK_FALSE(a.reached(3, 7));
  CHECK(Proportion(1, 2).min_count(3) == 2);
  CHECK(Proportion(1, 1).min_count(5) == 5);
  CHECK(Proportion(2, 4) == Proportion(1, 2));
  CHECK(Proportion::parse("4/7") == a);
  CHECK(Proportion::parse("0.5") == Proportion(1, 2));
  CHECK(Proportion::from_double(0.25) == Proportion(1, 4));
  CHECK(Proportion(1, 3) < Proportion(1, 2));
  CHECK_THROWS_AS(Proportion(0, 3), Error);
  CHECK_THROWS_AS(Proportion(4, 3), Error);
  CHECK_THROWS_AS(Proportion::parse("x/7"), Error);
  // 0.1 is not 1/10 in binary; the conversion keeps the double's exact value
  const Proportion tenth = Proportion::from_double(0.1);
  CHECK(tenth.value() == 0.1);
  CHECK_FALSE(tenth == Proportion(1, 10));
}

TEST_CASE("consensus count on the strip example") {
  const Strip s;
  const double eps = 2 / 255.0;
  CHECK(consensus_count(s.outs, {0, 0}, {0, 1}, eps) == 1);
  CHECK(consensus_count(s.outs, {0, 1}, {0, 1}, eps) == 2);
  CHECK(consensus_count(s.outs, {0, 0}, {0, 2}, 1.0) == 2);

  CHECK(consensus_weight(s.outs, {0, 0}, {0, 1}, params_of(eps, Proportion(1, 1))) == 0);
  CHECK(consensus_weight(s.outs, {0, 0}, {0, 1}, params_of(eps, Proportion(1, 2))) == 1);
  CHECK(consensus_weight(s.outs, {0, 2}, {0, 2}, params_of(eps, Proportion(1, 1))) == 1);
}

TEST_CASE("aggregate_pixel on the strip example") {
  const Strip s;
  // alpha = 1 with a full window: only q = p qualifies
  CHECK(aggregate_pixel(s.noisy, s.outs, {0, 0}, params_of(2 / 255.0, Proportion(1, 1))) == 10 / 255.0);
  // alpha = 1/2: pixels 0 and 1 agree on machine 1
  CHECK(aggregate_pixel(s.noisy, s.outs, {0, 0}, params_of(2 / 255.0, Proportion(1, 2))) ==
        (10 / 255.0 + 12 / 255.0) / 2.0);
  // epsilon = 1 makes every weight 1
  CHECK(aggregate_pixel(s.noisy, s.outs, {0, 2}, params_of(1.0, Proportion(1, 1))) ==
        (10 / 255.0 + 12 / 255.0 + 100 / 255.0) / 3.0);
}

TEST_CASE("degenerate parameter settings") {
  Rng rng(5);
  const Image noisy = random_image(9, 7, rng);
  double total = 0.0;
  for (double v : noisy.pixels()) total += v;
  const double global_mean = total / static_cast<double>(noisy.size());

  SUBCASE("constant machines give the window mean") {
    const MachineOutputs outs(std::vector<Image>{Image(9, 7, 0.3), Image(9, 7, 0.8)});
    const CobraParams p = params_of(1e-9, Proportion(1, 1), CandidateWindow::radius(1));
    CHECK(aggregate_pixel(noisy, outs, {0, 0}, p) ==
          doctest::Approx((noisy(0, 0) + noisy(0, 1) + noisy(1, 0) + noisy(1, 1)) / 4.0).epsilon(1e-15));
  }
  SUBCASE("epsilon >= 1 with a full window gives the global mean everywhere") {
    const MachineOutputs outs(random_machines(3, 9, 7, rng));
    const Image out = aggregate_image(noisy, outs, params_of(1.0, Proportion(1, 1)));
    for (double v : out.pixels()) CHECK(v == doctest::Approx(global_mean).epsilon(1e-14));
  }
  SUBCASE("identity machine with tiny epsilon is a fixed point when values are distinct") {
    const MachineOutputs outs(std::vector<Image>{noisy});
    for (auto window : {CandidateWindow::full(), CandidateWindow::radius(2)}) {
      CHECK(aggregate_image(noisy, outs, params_of(1e-12, Proportion(1, 1), window)) == noisy);
    }
  }
  SUBCASE("constant noisy image stays constant") {
    const Image flat(9, 7, 0.625);
    const MachineOutputs outs(random_machines(4, 9, 7, rng));
    CHECK(aggregate_image(flat, outs, params_of(0.1, Proportion(1, 2))) == flat);
  }
}

TEST_CASE("parameter and shape validation") {
  const Strip s;
  CHECK_THROWS_AS(aggregate_image(s.noisy, s.outs, params_of(0.0, Proportion(1, 2))), Error);
  CHECK_THROWS_AS(aggregate_image(Image(2, 2), s.outs, params_of(0.1, Proportion(1, 2))), Error);
  CHECK_THROWS_AS(MachineOutputs(std::vector<Image>{Image(2, 2), Image(3, 2)}), Error);
  CHECK_THROWS_AS(MachineOutputs(std::vector<Image>{}), Error);
  CHECK_THROWS_AS(CandidateWindow::radius(0), Error);
  CHECK_THROWS_AS(aggregate_with_bank(s.noisy, FilterBank{}, CobraParams{}), Error);
}

TEST_CASE("output lies within the candidate range") {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const Image noisy = random_image(8, 8, rng);
    const MachineOutputs outs(random_machines(3, 8, 8, rng));
    const CobraParams p = params_of(0.05 + 0.3 * rng.uniform(), Proportion(1 + trial % 3, 3), CandidateWindow::radius(2));
    for (int r = 0; r < 8; ++r) {
      for (int c = 0; c < 8; ++c) {
        double lo = 1.0, hi = 0.0;
        for (int qr = std::max(0, r - 2); qr <= std::min(7, r + 2); ++qr) {
          for (int qc = std::max(0, c - 2); qc <= std::min(7, c + 2); ++qc) {
            lo = std::min(lo, noisy(qr, qc));
            hi = std::max(hi, noisy(qr, qc));
          }
        }
        const double v = aggregate_pixel(noisy, outs, {r, c}, p);
        REQUIRE(v >= lo);
        REQUIRE(v <= hi);
      }
    }
  }
}

TEST_CASE("parallel kernel matches the serial reference bitwise") {
  Rng rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const int w = 1 + static_cast<int>(rng.below(20));
    const int h = 1 + static_cast<int>(rng.below(20));
    const int m = 1 + static_cast<int>(rng.below(7));
    const Image noisy = random_image(w, h, rng);
    const MachineOutputs outs(random_machines(m, w, h, rng));
    const CandidateWindow window =
        trial % 3 == 0 ? CandidateWindow::full() : CandidateWindow::radius(1 + static_cast<int>(rng.below(4)));
    const CobraParams p =
        params_of(0.02 + 0.4 * rng.uniform(), Proportion(1 + static_cast<int>(rng.below(m)), m), window);
    CHECK(aggregate_image(noisy, outs, p) == reference::aggregate_image(noisy, outs, p));
  }
}

TEST_CASE("result does not depend on the thread count") {
  Rng rng(12);
  const Image noisy = random_image(40, 33, rng);
  const MachineOutputs outs(random_machines(5, 40, 33, rng));
  const CobraParams p = params_of(0.1, Proportion(3, 5), CandidateWindow::radius(4));
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const Image one = aggregate_image(noisy, outs, p);
  for (int threads : {2, 3, 8}) {
    omp_set_num_threads(threads);
    CHECK(aggregate_image(noisy, outs, p) == one);
  }
  omp_set_num_threads(saved);
}

TEST_CASE("machine order does not matter") {
  Rng rng(13);
  const Image noisy = random_image(12, 10, rng);
  std::vector<Image> machines = random_machines(4, 12, 10, rng);
  const CobraParams p = params_of(0.15, Proportion(2, 4), CandidateWindow::radius(3));
  const Image base = aggregate_image(noisy, MachineOutputs(machines), p);
  std::reverse(machines.begin(), machines.end());
  CHECK(aggregate_image(noisy, MachineOutputs(machines), p) == base);
  std::rotate(machines.begin(), machines.begin() + 1, machines.end());
  CHECK(aggregate_image(noisy, MachineOutputs(machines), p) == base);

  FilterBank forward, backward;
  forward.add(identity_filter("a"));
  forward.add({"b", "box", {}, [](const Image& img) { return box_filter(img, 1); }});
  backward.add(forward[1]);
  backward.add(forward[0]);
  CHECK(aggregate_with_bank(noisy, forward, p) == aggregate_with_bank(noisy, backward, p));
}

TEST_CASE("progress callback sees every row once") {
  Rng rng(14);
  const Image noisy = random_image(10, 17, rng);
  const MachineOutputs outs(random_machines(2, 10, 17, rng));
  std::vector<int> seen;
  aggregate_image(noisy, outs, CobraParams{}, [&](int done, int total) {
    CHECK(total == 17);
    seen.push_back(done);
  });
  REQUIRE(seen.size() == 17);
  for (int i = 0; i < 17; ++i) CHECK(seen[i] == i + 1);
}

TEST_CASE("cobra params json") {
  const auto p = nlohmann::json::parse(R"({"epsilon": 0.2, "alpha": "4/7", "window_radius": 10, "patch_radius": 1})")
                     .get<CobraParams>();
  CHECK(p.epsilon == 0.2);
  CHECK(p.alpha == Proportion(4, 7));
  CHECK(p.window.radius() == 10);

  const auto full = nlohmann::json::parse(R"({"alpha": 0.5, "window_radius": "full"})").get<CobraParams>();
  CHECK(full.alpha == Proportion(1, 2));
  CHECK(full.window.is_full());

  const nlohmann::json j = p;
  const auto back = j.get<CobraParams>();
  CHECK(back.alpha == p.alpha);
  CHECK(back.window == p.window);
  CHECK_THROWS(nlohmann::json::parse(R"({"window_radius": "half"})").get<CobraParams>());
  CHECK_THROWS(nlohmann::json::parse(R"({"epsilon": -1})").get<CobraParams>());
}
