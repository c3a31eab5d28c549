#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adlens/ingest.hpp"
#include "adlens/model.hpp"

namespace adlens::analytics {

struct CdfPoint {
  double x = 0;
  double f = 0;  // fraction of values <= x
};

// Empirical CDF over the distinct observed values, no binning.
// F is (# values <= x) / N; the final point always has F = 1.
std::vector<CdfPoint> cdf(std::vector<double> values);

struct GroupKey {
  TierLabel tier = TierLabel::Nano;
  SponsorLabel label = SponsorLabel::NonSponsored;

  auto operator<=>(const GroupKey&) const = default;
};

struct EngagementSummary {
  GroupKey key;
  size_t post_count = 0;
  std::vector<double> comment_counts;
  std::vector<double> like_counts;
  // count / author's follower_count; only authors with followers > 0.
  std::vector<double> comment_counts_normalized;
  std::vector<double> like_counts_normalized;
};

struct EngagementReport {
  std::vector<EngagementSummary> groups;  // ordered by (tier, label)
  std::vector<std::string> zero_follower_authors;
};

EngagementReport engagement_summary(const ingest::Dataset& ds);

struct LatencyGroup {
  GroupKey key;
  std::vector<double> latencies_minutes;  // sorted ascending
  std::optional<double> median_minutes;   // null when no comments
};

struct LatencyReport {
  std::vector<LatencyGroup> groups;
};

// Minutes between a post and each of its comments, grouped by
// (tier, label). A comment older than its post is a data error.
LatencyReport comment_latency_stats(const ingest::Dataset& ds);

struct RepeaterStats {
  std::string username;
  TierLabel tier = TierLabel::Nano;
  std::vector<int> comments_per_commenter;  // one entry per distinct commenter
  double repeat_fraction = 0;               // commenters with more than one comment
};

struct RepeaterReport {
  std::vector<RepeaterStats> influencers;  // ordered by username
};

RepeaterReport repeat_commenter_stats(const ingest::Dataset& ds);

struct ShareEntry {
  std::string username;
  TierLabel tier = TierLabel::Nano;
  double share = 0;  // sponsored / total
  size_t total = 0;
};

struct ShareReport {
  std::vector<ShareEntry> post_shares;
  std::vector<ShareEntry> story_shares;
  double global_post_share = 0;
  double global_story_share = 0;
  std::vector<std::string> accounts_without_posts;
  std::vector<std::string> accounts_without_stories;
};

ShareReport sponsored_share(const ingest::Dataset& ds);

struct CategoryCount {
  std::string category;
  TierLabel tier = TierLabel::Nano;
  size_t accounts = 0;  // distinct accounts with >= 1 paid story in the category
};

struct AccountCategories {
  std::string username;
  TierLabel tier = TierLabel::Nano;
  size_t categories = 0;  // distinct categories promoted
};

struct CategoryReport {
  std::vector<CategoryCount> counts;              // ordered by (category, tier)
  std::vector<AccountCategories> per_account;     // ordered by username
};

CategoryReport product_category_counts(const ingest::Dataset& ds);

// Writes the machine-readable figure analogs:
//   cdf_followers.csv, comments_abs.csv, comments_norm.csv, likes_abs.csv,
//   likes_norm.csv, latency.csv, repeaters.csv, share.csv, categories.csv
// plus diagnostics.json (medians, global shares, excluded accounts).
void write_reports_csv(const ingest::Dataset& ds, const std::filesystem::path& out_dir);

}  // namespace adlens::analytics
