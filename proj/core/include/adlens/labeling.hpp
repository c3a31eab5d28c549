#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "adlens/model.hpp"

namespace adlens::labeling {

// Disclosure hashtags that mark a post as sponsored. Lowercase, no '#'.
struct SponsorHashtagSet {
  std::set<std::string> tags;

  static SponsorHashtagSet defaults();
  void validate() const;
  bool contains(const std::string& tag) const { return tags.contains(tag); }
};

// Sponsored iff the post carries at least one disclosure hashtag
// (exact-token match; '#adventure' does not count).
SponsorLabel label_post(const Post& post, const SponsorHashtagSet& tags);

// Stories carry explicit platform metadata instead of hashtags.
SponsorLabel label_story(const Story& story);

// Follower bands: Mega >= 1M, Macro [100K, 1M), Micro (10K, 100K),
// Nano [0, 10K]. Exactly 10,000 followers is Nano so the bands partition
// every count.
TierLabel assign_tier(const Profile& profile);
TierLabel tier_for_follower_count(int64_t follower_count);

// Labels every post and story in place.
void label_dataset_posts(std::vector<Post>& posts, const SponsorHashtagSet& tags);

// ceil(fraction * N) accounts drawn uniformly without replacement, except
// that every account above 10K followers is always included (the audit
// checks all of those). Deterministic under seed.
std::vector<Profile> draw_validation_sample(const std::vector<Profile>& accounts, double fraction,
                                            uint64_t seed);

}  // namespace adlens::labeling
