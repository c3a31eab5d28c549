#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "adlens/model.hpp"
#include "adlens/textprep.hpp"
#include "adlens/util.hpp"

namespace {

std::vector<std::string> sample_captions(size_t n) {
  adlens::Rng rng(1);
  static const std::vector<std::string> parts = {
      "thank you @brandco", "loving my new outfit",  "use discount code XY12",
      "#bestoutfit #ad",    "quiet sunday mornings", "running along the river",
      "many thanks to the team", "link in bio",      "#sunset #weekend",
  };
  std::vector<std::string> out;
  out.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    std::string caption;
    size_t k = 2 + rng.below(5);
    for (size_t j = 0; j < k; ++j) caption += parts[rng.below(parts.size())] + " ";
    out.push_back(std::move(caption));
  }
  return out;
}

void BM_PorterStem(benchmark::State& state) {
  static const std::vector<std::string> words = {
      "running",   "relational",  "hopefulness", "generalization", "caresses",
      "agreements", "electrical", "formalize",   "sensibilities",  "motoring"};
  size_t i = 0;
  for (auto _ : state) {
    std::string out = adlens::textprep::porter_stem(words[i % words.size()]);
    benchmark::DoNotOptimize(out);
    ++i;
  }
}
BENCHMARK(BM_PorterStem);

void BM_NormalizeText(benchmark::State& state) {
  auto captions = sample_captions(256);
  auto stopwords = adlens::textprep::default_stopwords();
  size_t i = 0;
  for (auto _ : state) {
    auto tokens = adlens::textprep::normalize_text(captions[i % captions.size()], stopwords);
    benchmark::DoNotOptimize(tokens);
    ++i;
  }
}
BENCHMARK(BM_NormalizeText);

void BM_ExtractHashtags(benchmark::State& state) {
  auto captions = sample_captions(256);
  size_t i = 0;
  for (auto _ : state) {
    auto tags = adlens::extract_hashtags(captions[i % captions.size()]);
    benchmark::DoNotOptimize(tags);
    ++i;
  }
}
BENCHMARK(BM_ExtractHashtags);

void BM_EncodeSequence(benchmark::State& state) {
  auto stopwords = adlens::textprep::default_stopwords();
  auto captions = sample_captions(512);
  std::vector<std::vector<std::string>> docs;
  for (const auto& c : captions) docs.push_back(adlens::textprep::normalize_text(c, stopwords));
  auto vocab = adlens::textprep::Vocabulary::build(docs, 2000);
  size_t i = 0;
  for (auto _ : state) {
    auto seq = adlens::textprep::encode_sequence(docs[i % docs.size()], vocab,
                                                 static_cast<size_t>(state.range(0)));
    benchmark::DoNotOptimize(seq);
    ++i;
  }
}
BENCHMARK(BM_EncodeSequence)->Arg(24)->Arg(60);

}  // namespace
