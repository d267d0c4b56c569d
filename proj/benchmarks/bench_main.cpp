#include <benchmark/benchmark.h>

#include "plcsynth/capacity.hpp"
#include "plcsynth/covariance.hpp"
#include "plcsynth/generator.hpp"
#include "plcsynth/metrics.hpp"

using namespace plcsynth;

namespace {

MimoGrid grid_for(std::int64_t decimation) {
  return MimoGrid::for_scheme(Scheme::mimo2x3, static_cast<std::size_t>(decimation));
}

ChannelSet sample_set(std::size_t n, std::size_t decimation) {
  GeneratorConfig c;
  c.n_realizations = n;
  c.decimation = decimation;
  c.seed = 1;
  return generate(c, ModelParameters::published());
}

void BM_AssembleR(benchmark::State& state) {
  const MimoGrid grid = grid_for(state.range(0));
  const ModelParameters params = ModelParameters::published();
  for (auto _ : state) benchmark::DoNotOptimize(assemble_R(params, grid).matrix().data());
  state.SetLabel("M=" + std::to_string(grid.size()));
}
BENCHMARK(BM_AssembleR)->Arg(16)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_PsdSqrt(benchmark::State& state) {
  const MimoGrid grid = grid_for(state.range(0));
  const ModelParameters params = ModelParameters::published();
  const Eigen::MatrixXd q = scale_to_Q(assemble_R(params, grid), params).release();
  for (auto _ : state) benchmark::DoNotOptimize(psd_sqrt(q).root.data());
  state.SetLabel("M=" + std::to_string(grid.size()));
}
BENCHMARK(BM_PsdSqrt)->Arg(16)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_Generate(benchmark::State& state) {
  GeneratorConfig c;
  c.n_realizations = static_cast<std::size_t>(state.range(0));
  c.decimation = 8;
  const ModelParameters params = ModelParameters::published();
  const MimoGrid grid = generation_grid(c);
  const Eigen::MatrixXd root = psd_sqrt(scale_to_Q(assemble_R(params, grid), params).release()).root;
  for (auto _ : state) {
    ++c.seed;
    benchmark::DoNotOptimize(generate(c, params, grid, root).realizations.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Generate)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_Metrics(benchmark::State& state) {
  const ChannelSet s = sample_set(10, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(compute_metrics(s).data());
  state.SetItemsProcessed(state.iterations() * 10);
}
BENCHMARK(BM_Metrics)->Arg(8)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Capacity(benchmark::State& state) {
  const ChannelSet s = sample_set(10, static_cast<std::size_t>(state.range(0)));
  const NoiseModel noise;
  const PsdMask mask;
  for (auto _ : state) benchmark::DoNotOptimize(capacity_ccdf(s, noise, mask).ccdf.data());
  state.SetItemsProcessed(state.iterations() * 10);
}
BENCHMARK(BM_Capacity)->Arg(8)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
