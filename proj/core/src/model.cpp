#include "adlens/model.hpp"

#include <unordered_set>

#include "adlens/util.hpp"

namespace adlens {

std::string_view to_string(TierLabel tier) {
  switch (tier) {
    case TierLabel::Nano: return "nano";
    case TierLabel::Micro: return "micro";
    case TierLabel::Macro: return "macro";
    case TierLabel::Mega: return "mega";
  }
  return "nano";
}

std::string_view to_string(SponsorLabel label) {
  switch (label) {
    case SponsorLabel::Unlabeled: return "unlabeled";
    case SponsorLabel::Sponsored: return "sponsored";
    case SponsorLabel::NonSponsored: return "non_sponsored";
  }
  return "unlabeled";
}

std::optional<TierLabel> tier_from_string(std::string_view s) {
  if (s == "nano") return TierLabel::Nano;
  if (s == "micro") return TierLabel::Micro;
  if (s == "macro") return TierLabel::Macro;
  if (s == "mega") return TierLabel::Mega;
  return std::nullopt;
}

std::optional<SponsorLabel> sponsor_label_from_string(std::string_view s) {
  if (s == "unlabeled") return SponsorLabel::Unlabeled;
  if (s == "sponsored") return SponsorLabel::Sponsored;
  if (s == "non_sponsored") return SponsorLabel::NonSponsored;
  return std::nullopt;
}

namespace {

bool hashtag_char(char c) { return is_ascii_alnum(c) || c == '_'; }
bool mention_char(char c) { return is_ascii_alnum(c) || c == '.' || c == '_'; }

std::vector<std::string> extract_marked_tokens(std::string_view text, char marker,
                                               bool (*in_class)(char)) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (size_t i = 0; i < text.size(); ++i) {
    if (text[i] != marker) continue;
    size_t j = i + 1;
    while (j < text.size() && in_class(text[j])) ++j;
    if (j == i + 1) continue;  // bare marker
    std::string token = lower_ascii(text.substr(i + 1, j - i - 1));
    if (seen.insert(token).second) out.push_back(std::move(token));
    i = j - 1;
  }
  return out;
}

}  // namespace

std::vector<std::string> extract_hashtags(std::string_view caption) {
  return extract_marked_tokens(caption, '#', hashtag_char);
}

std::vector<std::string> extract_mentions(std::string_view caption) {
  return extract_marked_tokens(caption, '@', mention_char);
}

void Profile::validate() const {
  if (username.empty()) throw DataError("username must be non-empty");
  for (char c : username) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      throw DataError("username must not contain whitespace");
    }
  }
  if (follower_count < 0) throw DataError("follower_count must be >= 0");
  if (followee_count < 0) throw DataError("followee_count must be >= 0");
  if (media_count < 0) throw DataError("media_count must be >= 0");
}

void Post::derive_text_fields() {
  hashtags = extract_hashtags(caption);
  mentions = extract_mentions(caption);
}

void Post::validate() const {
  if (id.empty()) throw DataError("post id must be non-empty");
  if (author.empty()) throw DataError("post username must be non-empty");
  if (like_count < 0) throw DataError("like_count must be >= 0");
  for (const CommentRef& c : comments) {
    if (c.commenter.empty()) throw DataError("comment username must be non-empty");
    if (c.taken_at < taken_at) {
      throw DataError("comment taken_at must be >= post taken_at (post " + id + ")");
    }
  }
}

void Story::validate() const {
  if (id.empty()) throw DataError("story id must be non-empty");
  if (author.empty()) throw DataError("story username must be non-empty");
  if (expires_at != taken_at + kStoryLifetimeSeconds) {
    throw DataError("expires_at must equal taken_at + 24h (story " + id + ")");
  }
  if (advertiser_category.has_value() && !paid_partnership) {
    throw DataError("advertiser_category requires paid_partnership (story " + id + ")");
  }
}

}  // namespace adlens
