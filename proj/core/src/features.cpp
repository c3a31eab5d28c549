#include "adlens/features.hpp"

#include <cmath>

#include "adlens/util.hpp"
#include "json.hpp"

namespace adlens::features {

std::unordered_set<std::string> scrub_token_set(const labeling::SponsorHashtagSet& tags) {
  std::unordered_set<std::string> out;
  for (const std::string& tag : tags.tags) {
    out.insert(tag);
    std::string stem = tag;
    for (int i = 0; i < 8; ++i) {
      std::string next = textprep::porter_stem(stem);
      if (next == stem) break;
      stem = std::move(next);
    }
    out.insert(std::move(stem));
  }
  return out;
}

std::vector<std::string> assemble_text_tokens(const Post& post, const Profile& profile,
                                              const textprep::StopwordSet& stopwords,
                                              const ExtractOptions& options) {
  std::unordered_set<std::string> scrub;
  if (options.scrub_sponsor_hashtags) scrub = scrub_token_set(options.sponsor_tags);
  auto keep = [&](const std::string& tok) {
    return !options.scrub_sponsor_hashtags || !scrub.contains(tok);
  };

  std::vector<std::string> out;
  for (std::string& tok : textprep::normalize_text(post.caption, stopwords)) {
    if (keep(tok)) out.push_back(std::move(tok));
  }
  out.emplace_back(kFieldSeparatorToken);
  for (const std::string& tag : post.hashtags) {
    if (keep(tag)) out.push_back(tag);
  }
  if (options.include_biography) {
    out.emplace_back(kFieldSeparatorToken);
    for (std::string& tok : textprep::normalize_text(profile.biography, stopwords)) {
      if (keep(tok)) out.push_back(std::move(tok));
    }
  }
  return out;
}

FeatureVector extract_features(const Post& post, const Profile& profile,
                               const textprep::Vocabulary& vocab, size_t max_len,
                               const textprep::StopwordSet& stopwords,
                               const ExtractOptions& options) {
  if (post.author != profile.username) {
    throw DataError("author mismatch: post by '" + post.author + "', profile '" +
                    profile.username + "'");
  }
  FeatureVector fv;
  fv.text_sequence =
      textprep::encode_sequence(assemble_text_tokens(post, profile, stopwords, options), vocab,
                                max_len);

  size_t hashtag_count = post.hashtags.size();
  if (options.scrub_sponsor_hashtags) {
    hashtag_count = 0;
    for (const std::string& tag : post.hashtags) {
      if (!options.sponsor_tags.contains(tag)) ++hashtag_count;
    }
  }

  fv.numeric = {static_cast<double>(post.like_count),
                static_cast<double>(post.comments.size()),
                static_cast<double>(utf8_length(post.caption)),
                static_cast<double>(hashtag_count),
                static_cast<double>(post.mentions.size()),
                static_cast<double>(post.tagged_users.size()),
                static_cast<double>(profile.follower_count),
                static_cast<double>(profile.followee_count),
                static_cast<double>(utf8_length(profile.biography)),
                profile.is_verified ? 1.0 : 0.0,
                profile.external_url.has_value() ? 1.0 : 0.0};
  return fv;
}

Standardizer Standardizer::fit(const std::vector<NumericVector>& rows) {
  if (rows.empty()) throw DataError("cannot fit standardizer on empty data");
  Standardizer s;
  auto n = static_cast<double>(rows.size());
  for (const NumericVector& row : rows) {
    for (size_t i = 0; i < kNumericFeatureCount; ++i) s.mean[i] += row[i];
  }
  for (size_t i = 0; i < kNumericFeatureCount; ++i) s.mean[i] /= n;
  for (const NumericVector& row : rows) {
    for (size_t i = 0; i < kNumericFeatureCount; ++i) {
      double d = row[i] - s.mean[i];
      s.stddev[i] += d * d;
    }
  }
  for (size_t i = 0; i < kNumericFeatureCount; ++i) s.stddev[i] = std::sqrt(s.stddev[i] / n);
  return s;
}

NumericVector Standardizer::transform(const NumericVector& row) const {
  NumericVector out{};
  for (size_t i = 0; i < kNumericFeatureCount; ++i) {
    out[i] = stddev[i] > 1e-12 ? (row[i] - mean[i]) / stddev[i] : 0.0;
  }
  return out;
}

std::string Standardizer::to_json_string() const {
  nlohmann::json j;
  j["mean"] = mean;
  j["stddev"] = stddev;
  return j.dump();
}

Standardizer Standardizer::from_json_string(std::string_view text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.contains("mean") || !j.contains("stddev")) {
    throw DataError("invalid standardizer JSON");
  }
  Standardizer s;
  for (size_t i = 0; i < kNumericFeatureCount; ++i) {
    s.mean[i] = j["mean"].at(i).get<double>();
    s.stddev[i] = j["stddev"].at(i).get<double>();
  }
  return s;
}

}  // namespace adlens::features
