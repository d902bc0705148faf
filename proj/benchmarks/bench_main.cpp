#include <benchmark/benchmark.h>

#include "flashden/crypto.hpp"
#include "flashden/forensics.hpp"
#include "flashden/ftl.hpp"
#include "flashden/scenario.hpp"

namespace {

using namespace flashden;

FlashGeometry bench_geom() {
  FlashGeometry g;
  g.block_count = 64;
  return g;
}

void BM_FtlSequentialWrite(benchmark::State& state) {
  for (auto _ : state) {
    state.PauseTiming();
    Ftl ftl(bench_geom());
    RandomStream rng(1);
    auto data = rng.bytes(ftl.sector_bytes());
    state.ResumeTiming();
    for (uint64_t s = 0; s < ftl.capacity_sectors(); ++s) {
      ftl.write(s, data);
    }
  }
  state.SetBytesProcessed(int64_t(state.iterations()) *
                          int64_t(bench_geom().exported_sectors()) * 2048);
}
BENCHMARK(BM_FtlSequentialWrite)->Unit(benchmark::kMillisecond);

void BM_FtlRandomOverwrite(benchmark::State& state) {
  Ftl ftl(bench_geom());
  RandomStream rng(2);
  auto data = rng.bytes(ftl.sector_bytes());
  for (uint64_t s = 0; s < ftl.capacity_sectors(); ++s) {
    ftl.write(s, data);
  }
  for (auto _ : state) {
    ftl.write(rng.below(ftl.capacity_sectors()), data);
  }
}
BENCHMARK(BM_FtlRandomOverwrite);

void BM_SectorCipherEncrypt(benchmark::State& state) {
  SectorCipher cipher(derive_key("bench"));
  RandomStream rng(3);
  auto sector = rng.bytes(2048);
  uint64_t tweak = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cipher.encrypt(tweak++, sector));
  }
  state.SetBytesProcessed(int64_t(state.iterations()) * 2048);
}
BENCHMARK(BM_SectorCipherEncrypt);

void BM_AnalyzeControlImage(benchmark::State& state) {
  ScenarioSpec spec;
  spec.name = ScenarioName::ControlPublic;
  spec.geometry = bench_geom();
  auto sim = simulate(spec);
  for (auto _ : state) {
    benchmark::DoNotOptimize(analyze(sim.image, sim.profile));
  }
}
BENCHMARK(BM_AnalyzeControlImage)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
