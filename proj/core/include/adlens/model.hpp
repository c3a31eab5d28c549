#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace adlens {

// Stories auto-expire exactly one day after posting.
inline constexpr int64_t kStoryLifetimeSeconds = 24 * 60 * 60;

enum class SponsorLabel { Unlabeled, Sponsored, NonSponsored };

// Follower-count bands, ordered Mega > Macro > Micro > Nano.
enum class TierLabel { Nano = 0, Micro = 1, Macro = 2, Mega = 3 };

inline constexpr TierLabel kAllTiers[] = {TierLabel::Nano, TierLabel::Micro,
                                          TierLabel::Macro, TierLabel::Mega};

std::string_view to_string(TierLabel tier);
std::string_view to_string(SponsorLabel label);
std::optional<TierLabel> tier_from_string(std::string_view s);
std::optional<SponsorLabel> sponsor_label_from_string(std::string_view s);

struct Profile {
  std::string username;
  int64_t follower_count = 0;
  int64_t followee_count = 0;
  int64_t media_count = 0;
  bool is_verified = false;
  std::string biography;
  std::optional<std::string> external_url;

  // Throws DataError naming the offending field.
  void validate() const;
};

struct CommentRef {
  std::string commenter;
  int64_t taken_at = 0;  // Unix seconds, UTC
};

struct Post {
  std::string id;
  std::string author;
  int64_t taken_at = 0;  // Unix seconds, UTC
  std::string caption;
  std::vector<std::string> hashtags;  // lowercase, deduplicated, no '#'
  std::vector<std::string> mentions;  // lowercase, deduplicated, no '@'
  std::vector<std::string> tagged_users;
  int64_t like_count = 0;
  std::vector<CommentRef> comments;
  SponsorLabel sponsor_label = SponsorLabel::Unlabeled;

  // Recomputes hashtags/mentions from the caption; they are derived data.
  void derive_text_fields();
  void validate() const;
};

struct Story {
  std::string id;
  std::string author;
  int64_t taken_at = 0;
  bool paid_partnership = false;
  std::optional<std::string> advertiser_category;
  int64_t expires_at = 0;  // always taken_at + kStoryLifetimeSeconds

  void validate() const;
};

// Every maximal '#'-prefixed run of [A-Za-z0-9_], lowercased, '#' stripped,
// deduplicated, in first-appearance order.
std::vector<std::string> extract_hashtags(std::string_view caption);

// Every maximal '@'-prefixed run of [A-Za-z0-9._], lowercased, '@' stripped,
// deduplicated, in first-appearance order. A mid-word '@' counts: filtering
// email-looking tokens is the caller's concern.
std::vector<std::string> extract_mentions(std::string_view caption);

}  // namespace adlens
