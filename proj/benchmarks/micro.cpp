#include <benchmark/benchmark.h>

#include <map>
#include <memory>
#include <string>
#include <utility>

#include "evcorner/baselines.hpp"
#include "evcorner/harris.hpp"
#include "evcorner/luvharris.hpp"
#include "evcorner/surfaces.hpp"
#include "evcorner/synth.hpp"

using namespace evc;

namespace {

const EventStream& texture(std::uint32_t w, std::uint32_t h) {
  static std::map<std::pair<std::uint32_t, std::uint32_t>, EventStream> cache;
  auto& s = cache[{w, h}];
  if (s.empty()) s = synth::generate(synth::texture_scene({w, h}, 200'000, 40, 300.0, 20'000.0, 5)).stream;
  return s;
}

void BM_TosUpdate(benchmark::State& state) {
  const EventStream& s = texture(240, 180);
  TosSurface tos(s.geometry(), static_cast<int>(state.range(0)));
  std::size_t i = 0;
  for (auto _ : state) {
    const Event& e = s.events()[i];
    benchmark::DoNotOptimize(tos.update_unchecked(e.x, e.y));
    if (++i == s.size()) i = 0;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_TosUpdate)->Arg(2)->Arg(3)->Arg(5);

void BM_LutRegeneration(benchmark::State& state) {
  const auto w = static_cast<std::uint32_t>(state.range(0));
  const auto h = static_cast<std::uint32_t>(state.range(1));
  const EventStream& s = texture(w, h);
  TosSurface tos(s.geometry(), 3);
  for (const Event& e : s.events()) tos.update(e);
  std::uint64_t gen = 0;
  for (auto _ : state) {
    HarrisLut lut = regenerate_lut(tos, {}, 0, gen++);
    benchmark::DoNotOptimize(lut.scores.data().data());
  }
  state.SetItemsProcessed(state.iterations() * w * h);
}
BENCHMARK(BM_LutRegeneration)
    ->Args({128, 128})
    ->Args({240, 180})
    ->Args({346, 260})
    ->Args({640, 480})
    ->Unit(benchmark::kMicrosecond);

void BM_Detector(benchmark::State& state) {
  const auto kind = static_cast<DetectorKind>(state.range(0));
  const EventStream& s = texture(240, 180);
  std::vector<CornerTag> out;
  out.reserve(s.size());
  for (auto _ : state) {
    state.PauseTiming();
    auto det = make_detector(kind, s.geometry(), {});
    out.clear();
    state.ResumeTiming();
    det->process(s.view(), out);
    if (auto* luv = dynamic_cast<LuvHarrisDetector*>(det.get())) luv->synchronize();
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * s.size());
  state.SetLabel(std::string(to_string(kind)));
}
BENCHMARK(BM_Detector)
    ->Arg(static_cast<int>(DetectorKind::luvharris))
    ->Arg(static_cast<int>(DetectorKind::eharris))
    ->Arg(static_cast<int>(DetectorKind::fast))
    ->Arg(static_cast<int>(DetectorKind::arc))
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
