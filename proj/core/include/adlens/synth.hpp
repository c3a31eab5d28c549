#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "adlens/ingest.hpp"
#include "adlens/model.hpp"

namespace adlens::synth {

// Observed rates of promotional text signals in disclosed sponsored posts;
// the generator plants them at these rates by default.
struct SignalRates {
  double product_in_caption = 0.94;
  double mention = 0.91;
  double gratitude = 0.78;
  double call_to_action = 0.53;
  double product_hashtag = 0.97;
  double bio_sponsor_info = 0.63;
  double bio_tag_or_mention = 0.54;
  double bio_call_to_action = 0.34;
  double bio_external_url = 0.21;
  double bio_video_link = 0.11;
};

struct EngagementModel {
  std::array<double, 4> comment_mean = {6, 15, 40, 120};  // indexed by tier, nano..mega
  double sponsored_comment_multiplier = 0.5;
  std::array<double, 4> like_mean = {50, 400, 3000, 20000};
  double sponsored_like_multiplier = 0.8;
  std::array<double, 4> latency_median_minutes = {30, 45, 90, 180};
  double sponsored_latency_multiplier = 1.4;
  double repeat_commenter_fraction = 0.30;
};

struct SynthConfig {
  std::array<int, 4> accounts_per_tier = {50, 25, 15, 10};  // nano..mega
  std::array<int, 2> posts_per_account = {5, 30};
  std::array<int, 2> stories_per_account = {0, 16};
  double sponsored_fraction = 0.2;
  double hidden_fraction = 0.0;  // subset of sponsored_fraction
  int min_declared_per_account = 0;
  SignalRates signals;
  EngagementModel engagement;
  std::array<double, 4> paid_story_fraction = {0.0, 0.05, 0.10, 0.20};
  std::array<double, 4> single_category_fraction = {0.70, 0.70, 0.58, 0.50};
  std::optional<std::string> neutral_templates_path;
  uint64_t seed = 0;

  void validate() const;
  static SynthConfig from_json_string(std::string_view text);
  std::string to_json_string() const;
};

enum class TrueStatus { Sponsored, Hidden, Organic };
std::string_view to_string(TrueStatus status);
std::optional<TrueStatus> true_status_from_string(std::string_view s);

struct ManifestEntry {
  std::string post_id;
  TrueStatus status = TrueStatus::Organic;
};

struct SynthResult {
  ingest::Dataset dataset;
  std::vector<ManifestEntry> manifest;  // sorted by post id
};

// Deterministic under config.seed; equal seeds give byte-identical JSONL.
SynthResult generate_corpus(const SynthConfig& config);

// write_dataset_dir layout plus manifest.jsonl {post_id, true_status}.
void write_corpus(const SynthResult& result, const std::filesystem::path& dir);
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

}  // namespace adlens::synth
