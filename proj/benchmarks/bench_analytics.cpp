#include <benchmark/benchmark.h>

#include <vector>

#include "adlens/analytics.hpp"
#include "adlens/labeling.hpp"
#include "adlens/synth.hpp"
#include "adlens/util.hpp"

namespace {

using namespace adlens;

ingest::Dataset bench_dataset() {
  synth::SynthConfig config;
  config.accounts_per_tier = {40, 20, 12, 8};
  config.posts_per_account = {10, 20};
  config.seed = 11;
  synth::SynthResult result = synth::generate_corpus(config);
  labeling::label_dataset_posts(result.dataset.posts, labeling::SponsorHashtagSet::defaults());
  return std::move(result.dataset);
}

void BM_Cdf(benchmark::State& state) {
  Rng rng(1);
  std::vector<double> values(static_cast<size_t>(state.range(0)));
  for (double& v : values) v = rng.uniform_real(0, 1e6);
  for (auto _ : state) {
    auto points = analytics::cdf(values);
    benchmark::DoNotOptimize(points);
  }
}
BENCHMARK(BM_Cdf)->Range(1 << 10, 1 << 16);

void BM_EngagementSummary(benchmark::State& state) {
  ingest::Dataset ds = bench_dataset();
  for (auto _ : state) {
    auto report = analytics::engagement_summary(ds);
    benchmark::DoNotOptimize(report);
  }
}
BENCHMARK(BM_EngagementSummary)->Unit(benchmark::kMillisecond);

void BM_CommentLatency(benchmark::State& state) {
  ingest::Dataset ds = bench_dataset();
  for (auto _ : state) {
    auto report = analytics::comment_latency_stats(ds);
    benchmark::DoNotOptimize(report);
  }
}
BENCHMARK(BM_CommentLatency)->Unit(benchmark::kMillisecond);

void BM_GenerateCorpus(benchmark::State& state) {
  synth::SynthConfig config;
  config.accounts_per_tier = {20, 10, 6, 4};
  config.posts_per_account = {8, 12};
  config.seed = 13;
  for (auto _ : state) {
    auto result = synth::generate_corpus(config);
    benchmark::DoNotOptimize(result);
  }
}
BENCHMARK(BM_GenerateCorpus)->Unit(benchmark::kMillisecond);

}  // namespace
