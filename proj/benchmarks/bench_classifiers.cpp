#include <benchmark/benchmark.h>

#include <vector>

#include "adlens/contextual.hpp"
#include "adlens/forest.hpp"
#include "adlens/util.hpp"

namespace {

using namespace adlens;

ml::ContextualConfig paper_config(size_t max_len) {
  ml::ContextualConfig cfg;
  cfg.vocab_size = 2000;
  cfg.embed_dim = 32;
  cfg.max_len = max_len;
  return cfg;
}

void random_example(Rng& rng, const ml::ContextualConfig& cfg, std::vector<int>& seq,
                    std::vector<double>& numeric) {
  seq.resize(cfg.max_len);
  for (int& t : seq) t = static_cast<int>(rng.below(cfg.vocab_size));
  numeric.resize(cfg.numeric_dim);
  for (double& v : numeric) v = rng.uniform_real(-2, 2);
}

void BM_ContextualForward(benchmark::State& state) {
  auto cfg = paper_config(static_cast<size_t>(state.range(0)));
  ml::ContextualModel model = ml::ContextualModel::init(cfg, 0.08, 1);
  Rng rng(2);
  std::vector<int> seq;
  std::vector<double> numeric;
  random_example(rng, cfg, seq, numeric);
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.forward(seq, numeric));
  }
}
BENCHMARK(BM_ContextualForward)->Arg(24)->Arg(60);

void BM_ContextualBackward(benchmark::State& state) {
  auto cfg = paper_config(static_cast<size_t>(state.range(0)));
  ml::ContextualModel model = ml::ContextualModel::init(cfg, 0.08, 1);
  Rng rng(3);
  std::vector<int> seq;
  std::vector<double> numeric;
  random_example(rng, cfg, seq, numeric);
  ml::ExampleGrad grad;
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.loss_and_gradient(seq, numeric, 1, grad));
  }
}
BENCHMARK(BM_ContextualBackward)->Arg(24)->Arg(60);

void BM_ForestTrain(benchmark::State& state) {
  auto n = static_cast<size_t>(state.range(0));
  Rng rng(4);
  Matrix x(n, 64);
  std::vector<int> y(n);
  for (size_t i = 0; i < n; ++i) {
    y[i] = static_cast<int>(rng.below(2));
    for (size_t j = 0; j < x.cols; ++j) {
      x.at(i, j) = rng.uniform_real(0, 1) + (y[i] == 1 && j < 4 ? 0.4 : 0.0);
    }
  }
  ml::ForestParams params;
  params.tree_count = 20;
  params.max_depth = 10;
  params.seed = 5;
  for (auto _ : state) {
    auto model = ml::train_forest(x, y, params);
    benchmark::DoNotOptimize(model);
  }
}
BENCHMARK(BM_ForestTrain)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);

void BM_ForestPredict(benchmark::State& state) {
  Rng rng(6);
  Matrix x(1024, 64);
  std::vector<int> y(1024);
  for (size_t i = 0; i < x.rows; ++i) {
    y[i] = static_cast<int>(rng.below(2));
    for (size_t j = 0; j < x.cols; ++j) {
      x.at(i, j) = rng.uniform_real(0, 1) + (y[i] == 1 && j < 4 ? 0.4 : 0.0);
    }
  }
  ml::ForestParams params;
  params.tree_count = 50;
  params.seed = 7;
  ml::ForestModel model = ml::train_forest(x, y, params);
  size_t i = 0;
  for (auto _ : state) {
    std::span<const double> row(x.row(i % x.rows), x.cols);
    benchmark::DoNotOptimize(ml::predict_forest(model, row));
    ++i;
  }
}
BENCHMARK(BM_ForestPredict);

}  // namespace
