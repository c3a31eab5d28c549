#include "adlens/labeling.hpp"

#include <algorithm>
#include <cmath>

#include "adlens/util.hpp"

namespace adlens::labeling {

SponsorHashtagSet SponsorHashtagSet::defaults() {
  return {{"ad", "advert", "sponsored", "advertising", "giveaway", "spon", "sponsor"}};
}

void SponsorHashtagSet::validate() const {
  if (tags.empty()) throw DataError("sponsor hashtag set must be non-empty");
  for (const auto& t : tags) {
    if (t.empty() || t.find('#') != std::string::npos || t != lower_ascii(t)) {
      throw DataError("sponsor hashtag must be lowercase without '#': '" + t + "'");
    }
  }
}

SponsorLabel label_post(const Post& post, const SponsorHashtagSet& tags) {
  for (const auto& h : post.hashtags) {
    if (tags.contains(h)) return SponsorLabel::Sponsored;
  }
  return SponsorLabel::NonSponsored;
}

SponsorLabel label_story(const Story& story) {
  return story.paid_partnership ? SponsorLabel::Sponsored : SponsorLabel::NonSponsored;
}

TierLabel tier_for_follower_count(int64_t follower_count) {
  if (follower_count >= 1'000'000) return TierLabel::Mega;
  if (follower_count >= 100'000) return TierLabel::Macro;
  if (follower_count > 10'000) return TierLabel::Micro;
  return TierLabel::Nano;
}

TierLabel assign_tier(const Profile& profile) {
  return tier_for_follower_count(profile.follower_count);
}

void label_dataset_posts(std::vector<Post>& posts, const SponsorHashtagSet& tags) {
  for (Post& p : posts) p.sponsor_label = label_post(p, tags);
}

std::vector<Profile> draw_validation_sample(const std::vector<Profile>& accounts, double fraction,
                                            uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw UsageError("validation sample fraction must be in (0, 1]");
  }
  if (accounts.empty()) return {};

  // Canonical order first so the draw depends on content, not input order.
  std::vector<size_t> order(accounts.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return accounts[a].username < accounts[b].username;
  });

  std::vector<size_t> mandatory;  // every account above 10K followers
  std::vector<size_t> pool;
  for (size_t idx : order) {
    if (accounts[idx].follower_count > 10'000) {
      mandatory.push_back(idx);
    } else {
      pool.push_back(idx);
    }
  }

  auto target = static_cast<size_t>(
      std::ceil(fraction * static_cast<double>(accounts.size())));
  target = std::max(target, mandatory.size());
  size_t fill = std::min(target - mandatory.size(), pool.size());

  Rng rng(seed);
  std::vector<Profile> out;
  out.reserve(mandatory.size() + fill);
  for (size_t idx : mandatory) out.push_back(accounts[idx]);
  for (size_t pick : rng.sample_without_replacement(pool.size(), fill)) {
    out.push_back(accounts[pool[pick]]);
  }
  return out;
}

}  // namespace adlens::labeling
