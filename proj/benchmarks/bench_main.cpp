#include <benchmark/benchmark.h>

#include <random>

#include "burnsight/backbone.hpp"
#include "burnsight/fusion_model.hpp"
#include "burnsight/lime.hpp"
#include "burnsight/segmentation.hpp"
#include "burnsight/synth.hpp"
#include "burnsight/texture.hpp"

using namespace burnsight;

namespace {

imaging::GrayImage speckle(int size) {
  imaging::SynthConfig cfg;
  return imaging::synthesize_speckle(cfg.class_params[1], size, 7);
}

}  // namespace

static void BM_Glcm(benchmark::State& state) {
  const auto img = speckle(static_cast<int>(state.range(0)));
  const texture::GlcmConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(texture::haralick_features(texture::compute_glcm(texture::quantize(img, 32), cfg)));
  }
  state.SetItemsProcessed(state.iterations() * img.size());
}
BENCHMARK(BM_Glcm)->Arg(64)->Arg(224)->Arg(512);

static void BM_Quickshift(benchmark::State& state) {
  const auto img = speckle(224);
  for (auto _ : state) benchmark::DoNotOptimize(segmentation::segment_quickshift(img));
}
BENCHMARK(BM_Quickshift)->Unit(benchmark::kMillisecond);

static void BM_Felzenszwalb(benchmark::State& state) {
  const auto img = speckle(224);
  for (auto _ : state) benchmark::DoNotOptimize(segmentation::segment_felzenszwalb(img));
}
BENCHMARK(BM_Felzenszwalb)->Unit(benchmark::kMillisecond);

static void BM_Forward(benchmark::State& state) {
  model::ModelMetadata meta;
  meta.selection = texture::FeatureSelection::all();
  const auto m = model::FusionModel::initialize(meta, 1);
  const auto v1 = model::builtin_backbone(speckle(224));
  const std::vector<double> v2 = {1.0, 0.5, 0.1, 0.3, 0.7};
  for (auto _ : state) benchmark::DoNotOptimize(model::forward(m, v1, v2));
}
BENCHMARK(BM_Forward);

static void BM_Lime(benchmark::State& state) {
  const auto img = speckle(224);
  const auto segments = segmentation::segment_grid(img, 6, 6);
  model::ModelMetadata meta;
  meta.selection = texture::FeatureSelection::none();
  const auto m = model::FusionModel::initialize(meta, 2);
  explain::Classifier classifier{[&m](const imaging::GrayImage& x) {
                                   const auto p = model::forward(m, model::builtin_backbone(x), {});
                                   return std::vector<double>(p.probabilities.begin(), p.probabilities.end());
                                 },
                                 true};
  explain::LimeConfig cfg;
  cfg.num_samples = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(explain::explain(classifier, img, segments, cfg));
}
BENCHMARK(BM_Lime)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
