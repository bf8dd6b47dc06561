// Serial reference vs OpenMP kernel over image sizes and candidate windows.
#include <benchmark/benchmark.h>

#include "cobra/aggregate.hpp"
#include "cobra/rng.hpp"

using namespace cobra;

namespace {

struct Fixture {
  Image noisy;
  MachineOutputs outs;
};

Fixture make_fixture(int side, int machines) {
  Rng rng(42);
  auto random = [&] {
    Image img(side, side);
    for (std::size_t i = 0; i < img.size(); ++i) img[i] = static_cast<double>(rng.below(256)) / 255.0;
    return img;
  };
  Image noisy = random();
  std::vector<Image> outs;
  for (int k = 0; k < machines; ++k) outs.push_back(random());
  return {std::move(noisy), MachineOutputs(std::move(outs))};
}

CobraParams params_for(int radius) {
  CobraParams p;
  p.epsilon = 0.2;
  p.alpha = Proportion(4, 7);
  p.window = radius == 0 ? CandidateWindow::full() : CandidateWindow::radius(radius);
  return p;
}

// args: image side, window radius (0 = full)
template <bool Parallel>
void BM_Aggregate(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const Fixture f = make_fixture(side, 7);
  const CobraParams p = params_for(static_cast<int>(state.range(1)));
  for (auto _ : state) {
    Image out = Parallel ? aggregate_image(f.noisy, f.outs, p) : reference::aggregate_image(f.noisy, f.outs, p);
    benchmark::DoNotOptimize(out.pixels().data());
  }
  state.SetItemsProcessed(state.iterations() * side * side);
}

void Args(benchmark::internal::Benchmark* b) {
  for (int side : {64, 128, 256}) {
    for (int radius : {5, 10}) b->Args({side, radius});
  }
  b->Args({48, 0});
  b->Unit(benchmark::kMillisecond)->UseRealTime();
}

}  // namespace

BENCHMARK(BM_Aggregate<false>)->Name("serial")->Apply(Args);
BENCHMARK(BM_Aggregate<true>)->Name("openmp")->Apply(Args);

BENCHMARK_MAIN();
