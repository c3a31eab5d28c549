#include "adlens/pipeline.hpp"

#include <algorithm>
#include <set>

#include "json.hpp"

namespace adlens::features {

FeaturePipeline FeaturePipeline::fit(std::span<const sampling::LabeledExample> train,
                                     const PipelineOptions& options,
                                     textprep::StopwordSet stopwords) {
  if (train.empty()) throw DataError("cannot fit feature pipeline on an empty training set");
  FeaturePipeline p;
  p.options_ = options;
  p.stopwords_ = std::move(stopwords);

  std::vector<std::vector<std::string>> corpus;
  corpus.reserve(train.size());
  for (const auto& e : train) {
    corpus.push_back(assemble_text_tokens(e.post, e.profile, p.stopwords_, options.extract));
  }
  p.vocab_ = textprep::Vocabulary::build(corpus, options.vocab_size);

  std::vector<NumericVector> rows;
  rows.reserve(train.size());
  for (const auto& e : train) {
    rows.push_back(extract_features(e.post, e.profile, p.vocab_, options.max_len, p.stopwords_,
                                    options.extract)
                       .numeric);
  }
  p.standardizer_ = Standardizer::fit(rows);
  return p;
}

FeatureVector FeaturePipeline::raw_features(const Post& post, const Profile& profile) const {
  return extract_features(post, profile, vocab_, options_.max_len, stopwords_, options_.extract);
}

NumericVector FeaturePipeline::standardized_numeric(const FeatureVector& fv) const {
  return standardizer_.transform(fv.numeric);
}

EncodedSet FeaturePipeline::encode(std::span<const sampling::LabeledExample> examples) const {
  EncodedSet out;
  out.sequences.reserve(examples.size());
  out.numeric = Matrix(examples.size(), kNumericFeatureCount);
  out.labels.reserve(examples.size());
  out.ids.reserve(examples.size());
  out.tiers.reserve(examples.size());
  for (size_t i = 0; i < examples.size(); ++i) {
    const auto& e = examples[i];
    FeatureVector fv = raw_features(e.post, e.profile);
    NumericVector std_numeric = standardizer_.transform(fv.numeric);
    for (size_t j = 0; j < kNumericFeatureCount; ++j) out.numeric.at(i, j) = std_numeric[j];
    out.sequences.push_back(std::move(fv.text_sequence));
    out.labels.push_back(e.label);
    out.ids.push_back(e.post.id);
    out.tiers.push_back(e.tier);
  }
  return out;
}

std::string FeaturePipeline::to_json_string() const {
  nlohmann::json j;
  j["vocab_size"] = options_.vocab_size;
  j["max_len"] = options_.max_len;
  j["scrub_sponsor_hashtags"] = options_.extract.scrub_sponsor_hashtags;
  j["include_biography"] = options_.extract.include_biography;
  j["sponsor_tags"] = options_.extract.sponsor_tags.tags;
  j["stopwords"] = std::set<std::string>(stopwords_.begin(), stopwords_.end());
  j["vocab"] = nlohmann::json::parse(vocab_.to_json_string());
  j["standardizer"] = nlohmann::json::parse(standardizer_.to_json_string());
  return j.dump();
}

FeaturePipeline FeaturePipeline::from_json_string(std::string_view text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.contains("vocab")) throw DataError("invalid pipeline JSON");
  FeaturePipeline p;
  p.options_.vocab_size = j.at("vocab_size").get<size_t>();
  p.options_.max_len = j.at("max_len").get<size_t>();
  p.options_.extract.scrub_sponsor_hashtags = j.at("scrub_sponsor_hashtags").get<bool>();
  p.options_.extract.include_biography = j.at("include_biography").get<bool>();
  p.options_.extract.sponsor_tags.tags.clear();
  for (const auto& t : j.at("sponsor_tags")) {
    p.options_.extract.sponsor_tags.tags.insert(t.get<std::string>());
  }
  for (const auto& w : j.at("stopwords")) p.stopwords_.insert(w.get<std::string>());
  p.vocab_ = textprep::Vocabulary::from_json_string(j.at("vocab").dump());
  p.standardizer_ = Standardizer::from_json_string(j.at("standardizer").dump());
  return p;
}

std::vector<double> forest_row(std::span<const int> sequence, std::span<const double> numeric) {
  std::vector<double> row(numeric.size() + kTextHashBins, 0.0);
  for (size_t j = 0; j < numeric.size(); ++j) row[j] = numeric[j];
  for (int token : sequence) {
    if (token == textprep::Vocabulary::kPadIndex) continue;
    size_t bin = splitmix64(static_cast<uint64_t>(token)) % kTextHashBins;
    row[numeric.size() + bin] = 1.0;
  }
  return row;
}

Matrix forest_matrix(const EncodedSet& encoded) {
  Matrix m(encoded.size(), kNumericFeatureCount + kTextHashBins);
  for (size_t i = 0; i < encoded.size(); ++i) {
    std::vector<double> row = forest_row(
        encoded.sequences[i],
        std::span<const double>(encoded.numeric.row(i), kNumericFeatureCount));
    std::copy(row.begin(), row.end(), m.row(i));
  }
  return m;
}

}  // namespace adlens::features
