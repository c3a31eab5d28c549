#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adlens/features.hpp"
#include "adlens/sampling.hpp"
#include "adlens/util.hpp"

namespace adlens::features {

struct PipelineOptions {
  size_t vocab_size = 5000;
  size_t max_len = 60;
  ExtractOptions extract{.scrub_sponsor_hashtags = true};
};

// Classifier-ready view of a labeled set.
struct EncodedSet {
  std::vector<std::vector<int>> sequences;
  Matrix numeric;  // standardized
  std::vector<int> labels;
  std::vector<std::string> ids;
  std::vector<TierLabel> tiers;

  size_t size() const { return labels.size(); }
};

// Vocabulary + standardizer fit on one training split, applied elsewhere.
// Serialized alongside models so evaluation uses the exact same encoding.
class FeaturePipeline {
 public:
  FeaturePipeline() = default;

  static FeaturePipeline fit(std::span<const sampling::LabeledExample> train,
                             const PipelineOptions& options,
                             textprep::StopwordSet stopwords);

  FeatureVector raw_features(const Post& post, const Profile& profile) const;
  NumericVector standardized_numeric(const FeatureVector& fv) const;
  EncodedSet encode(std::span<const sampling::LabeledExample> examples) const;

  const textprep::Vocabulary& vocab() const { return vocab_; }
  const Standardizer& standardizer() const { return standardizer_; }
  const PipelineOptions& options() const { return options_; }
  const textprep::StopwordSet& stopwords() const { return stopwords_; }

  std::string to_json_string() const;
  static FeaturePipeline from_json_string(std::string_view text);

 private:
  PipelineOptions options_;
  textprep::StopwordSet stopwords_;
  textprep::Vocabulary vocab_;
  Standardizer standardizer_;
};

inline constexpr size_t kTextHashBins = 1024;

// Forest input: standardized numeric columns followed by hashed presence
// bits of the text sequence (padding excluded).
Matrix forest_matrix(const EncodedSet& encoded);
std::vector<double> forest_row(std::span<const int> sequence, std::span<const double> numeric);

}  // namespace adlens::features
