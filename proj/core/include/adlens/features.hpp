#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "adlens/labeling.hpp"
#include "adlens/model.hpp"
#include "adlens/textprep.hpp"

namespace adlens::features {

inline constexpr size_t kNumericFeatureCount = 11;

// Frozen order of the numeric channel.
inline constexpr std::array<std::string_view, kNumericFeatureCount> kNumericFeatureNames = {
    "like_count",       "comment_count",  "caption_length_chars", "hashtag_count",
    "mention_count",    "tagged_user_count", "follower_count",    "followee_count",
    "biography_length_chars", "is_verified", "external_url_exists"};

using NumericVector = std::array<double, kNumericFeatureCount>;

struct FeatureVector {
  std::vector<int> text_sequence;
  NumericVector numeric{};  // raw values; standardization is applied downstream
};

// Field separator inserted between caption, hashtag and biography tokens.
// Normalized tokens are [a-z0-9]+, so this string cannot occur naturally.
inline constexpr std::string_view kFieldSeparatorToken = "__sep__";

struct ExtractOptions {
  // Removes disclosure hashtags from every text channel (and from the
  // hashtag count) so a classifier cannot just read the label back out.
  // Off here by default; classifier dataset builders turn it on.
  bool scrub_sponsor_hashtags = false;
  bool include_biography = true;
  labeling::SponsorHashtagSet sponsor_tags = labeling::SponsorHashtagSet::defaults();
};

// Tokens to drop when scrubbing: each tag plus its stemmed form, since
// caption tokens pass through the stemmer.
std::unordered_set<std::string> scrub_token_set(const labeling::SponsorHashtagSet& tags);

// normalize(caption) ++ sep ++ hashtags ++ sep ++ normalize(biography)
std::vector<std::string> assemble_text_tokens(const Post& post, const Profile& profile,
                                              const textprep::StopwordSet& stopwords,
                                              const ExtractOptions& options);

// Builds the text sequence and the raw numeric vector. The profile must be
// the post's author.
FeatureVector extract_features(const Post& post, const Profile& profile,
                               const textprep::Vocabulary& vocab, size_t max_len,
                               const textprep::StopwordSet& stopwords,
                               const ExtractOptions& options = {});

// Per-feature z-score parameters, fit on the training split only.
// Constant features pass through as zero.
struct Standardizer {
  NumericVector mean{};
  NumericVector stddev{};

  static Standardizer fit(const std::vector<NumericVector>& rows);
  NumericVector transform(const NumericVector& row) const;

  std::string to_json_string() const;
  static Standardizer from_json_string(std::string_view text);
};

}  // namespace adlens::features
