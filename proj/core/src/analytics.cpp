#include "adlens/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "adlens/labeling.hpp"
#include "adlens/util.hpp"
#include "json.hpp"

namespace adlens::analytics {

namespace {

TierLabel tier_of_author(const ingest::Dataset& ds, const std::string& author) {
  const Profile* p = ds.find_profile(author);
  if (p == nullptr) throw DataError("unknown profile '" + author + "'");
  return labeling::assign_tier(*p);
}

SponsorLabel require_label(const Post& p) {
  if (p.sponsor_label == SponsorLabel::Unlabeled) {
    throw DataError("post " + p.id + " is unlabeled; run labeling first");
  }
  return p.sponsor_label;
}

}  // namespace

std::vector<CdfPoint> cdf(std::vector<double> values) {
  if (values.empty()) throw DataError("empty sample");
  for (double v : values) {
    if (!std::isfinite(v)) throw DataError("non-finite value in sample");
  }
  std::sort(values.begin(), values.end());
  std::vector<CdfPoint> out;
  size_t n = values.size();
  for (size_t i = 0; i < n; ++i) {
    if (i + 1 < n && values[i + 1] == values[i]) continue;  // keep last of a run
    out.push_back({values[i], static_cast<double>(i + 1) / static_cast<double>(n)});
  }
  return out;
}

EngagementReport engagement_summary(const ingest::Dataset& ds) {
  std::map<GroupKey, EngagementSummary> groups;
  std::set<std::string> zero_follower;
  for (const Post& p : ds.posts) {
    GroupKey key{tier_of_author(ds, p.author), require_label(p)};
    EngagementSummary& g = groups[key];
    g.key = key;
    g.post_count += 1;
    auto comments = static_cast<double>(p.comments.size());
    auto likes = static_cast<double>(p.like_count);
    g.comment_counts.push_back(comments);
    g.like_counts.push_back(likes);
    int64_t followers = ds.find_profile(p.author)->follower_count;
    if (followers > 0) {
      g.comment_counts_normalized.push_back(comments / static_cast<double>(followers));
      g.like_counts_normalized.push_back(likes / static_cast<double>(followers));
    } else {
      zero_follower.insert(p.author);
    }
  }
  EngagementReport report;
  for (auto& [_, g] : groups) report.groups.push_back(std::move(g));
  report.zero_follower_authors.assign(zero_follower.begin(), zero_follower.end());
  return report;
}

LatencyReport comment_latency_stats(const ingest::Dataset& ds) {
  std::map<GroupKey, LatencyGroup> groups;
  for (const Post& p : ds.posts) {
    GroupKey key{tier_of_author(ds, p.author), require_label(p)};
    LatencyGroup& g = groups[key];
    g.key = key;
    for (const CommentRef& c : p.comments) {
      if (c.taken_at < p.taken_at) {
        throw DataError("comment precedes post " + p.id);
      }
      g.latencies_minutes.push_back(static_cast<double>(c.taken_at - p.taken_at) / 60.0);
    }
  }
  LatencyReport report;
  for (auto& [_, g] : groups) {
    std::sort(g.latencies_minutes.begin(), g.latencies_minutes.end());
    g.median_minutes = median_of_sorted(g.latencies_minutes);
    report.groups.push_back(std::move(g));
  }
  return report;
}

RepeaterReport repeat_commenter_stats(const ingest::Dataset& ds) {
  std::map<std::string, std::map<std::string, int>> per_influencer;
  for (const Post& p : ds.posts) {
    require_label(p);
    auto& counts = per_influencer[p.author];
    for (const CommentRef& c : p.comments) ++counts[c.commenter];
  }
  RepeaterReport report;
  for (auto& [author, counts] : per_influencer) {
    RepeaterStats stats;
    stats.username = author;
    stats.tier = tier_of_author(ds, author);
    size_t repeaters = 0;
    for (const auto& [_, n] : counts) {
      stats.comments_per_commenter.push_back(n);
      if (n > 1) ++repeaters;
    }
    stats.repeat_fraction =
        counts.empty() ? 0.0 : static_cast<double>(repeaters) / static_cast<double>(counts.size());
    report.influencers.push_back(std::move(stats));
  }
  return report;
}

ShareReport sponsored_share(const ingest::Dataset& ds) {
  struct Tally {
    size_t sponsored = 0;
    size_t total = 0;
  };
  std::map<std::string, Tally> post_tally, story_tally;
  for (const Post& p : ds.posts) {
    Tally& t = post_tally[p.author];
    ++t.total;
    if (require_label(p) == SponsorLabel::Sponsored) ++t.sponsored;
  }
  for (const Story& s : ds.stories) {
    Tally& t = story_tally[s.author];
    ++t.total;
    if (labeling::label_story(s) == SponsorLabel::Sponsored) ++t.sponsored;
  }

  ShareReport report;
  size_t spon = 0, total = 0;
  for (const auto& [author, t] : post_tally) {
    report.post_shares.push_back({author, tier_of_author(ds, author),
                                  static_cast<double>(t.sponsored) / static_cast<double>(t.total),
                                  t.total});
    spon += t.sponsored;
    total += t.total;
  }
  report.global_post_share = total == 0 ? 0.0 : static_cast<double>(spon) / static_cast<double>(total);

  spon = total = 0;
  for (const auto& [author, t] : story_tally) {
    report.story_shares.push_back({author, tier_of_author(ds, author),
                                   static_cast<double>(t.sponsored) / static_cast<double>(t.total),
                                   t.total});
    spon += t.sponsored;
    total += t.total;
  }
  report.global_story_share =
      total == 0 ? 0.0 : static_cast<double>(spon) / static_cast<double>(total);

  for (const auto& [name, _] : ds.profiles) {
    if (!post_tally.contains(name)) report.accounts_without_posts.push_back(name);
    if (!story_tally.contains(name)) report.accounts_without_stories.push_back(name);
  }
  return report;
}

CategoryReport product_category_counts(const ingest::Dataset& ds) {
  // category -> tier -> accounts; account -> categories
  std::map<std::string, std::map<TierLabel, std::set<std::string>>> by_category;
  std::map<std::string, std::set<std::string>> by_account;
  for (const Story& s : ds.stories) {
    if (!s.paid_partnership || !s.advertiser_category.has_value()) continue;
    TierLabel tier = tier_of_author(ds, s.author);
    by_category[*s.advertiser_category][tier].insert(s.author);
    by_account[s.author].insert(*s.advertiser_category);
  }
  CategoryReport report;
  for (const auto& [category, tiers] : by_category) {
    for (const auto& [tier, accounts] : tiers) {
      report.counts.push_back({category, tier, accounts.size()});
    }
  }
  for (const auto& [account, categories] : by_account) {
    report.per_account.push_back({account, tier_of_author(ds, account), categories.size()});
  }
  return report;
}

namespace {

std::string group_prefix(const GroupKey& key) {
  return std::string(to_string(key.tier)) + "," + std::string(to_string(key.label));
}

void write_group_cdfs(std::ostringstream& out, const GroupKey& key,
                      const std::vector<double>& values) {
  if (values.empty()) return;
  for (const CdfPoint& pt : cdf(values)) {
    out << group_prefix(key) << "," << format_double(pt.x) << "," << format_double(pt.f) << "\n";
  }
}

}  // namespace

void write_reports_csv(const ingest::Dataset& ds, const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  // cdf_followers.csv: follower/followee distributions, overall and per tier.
  {
    std::ostringstream out;
    out << "series,x,F\n";
    std::vector<double> followers, followees;
    std::map<TierLabel, std::vector<double>> per_tier;
    for (const auto& [_, p] : ds.profiles) {
      followers.push_back(static_cast<double>(p.follower_count));
      followees.push_back(static_cast<double>(p.followee_count));
      per_tier[labeling::assign_tier(p)].push_back(static_cast<double>(p.follower_count));
    }
    if (!followers.empty()) {
      for (const CdfPoint& pt : cdf(followers)) {
        out << "followers_all," << format_double(pt.x) << "," << format_double(pt.f) << "\n";
      }
      for (const CdfPoint& pt : cdf(followees)) {
        out << "followees_all," << format_double(pt.x) << "," << format_double(pt.f) << "\n";
      }
      for (const auto& [tier, values] : per_tier) {
        for (const CdfPoint& pt : cdf(values)) {
          out << "followers_" << to_string(tier) << "," << format_double(pt.x) << ","
              << format_double(pt.f) << "\n";
        }
      }
    }
    write_text_file(out_dir / "cdf_followers.csv", out.str());
  }

  EngagementReport engagement = engagement_summary(ds);
  {
    std::ostringstream abs_out, norm_out, labs_out, lnorm_out;
    const std::string header = "tier,label,x,F\n";
    abs_out << header;
    norm_out << header;
    labs_out << header;
    lnorm_out << header;
    for (const EngagementSummary& g : engagement.groups) {
      write_group_cdfs(abs_out, g.key, g.comment_counts);
      write_group_cdfs(norm_out, g.key, g.comment_counts_normalized);
      write_group_cdfs(labs_out, g.key, g.like_counts);
      write_group_cdfs(lnorm_out, g.key, g.like_counts_normalized);
    }
    write_text_file(out_dir / "comments_abs.csv", abs_out.str());
    write_text_file(out_dir / "comments_norm.csv", norm_out.str());
    write_text_file(out_dir / "likes_abs.csv", labs_out.str());
    write_text_file(out_dir / "likes_norm.csv", lnorm_out.str());
  }

  LatencyReport latency = comment_latency_stats(ds);
  {
    std::ostringstream out;
    out << "tier,label,latency_minutes,F\n";
    for (const LatencyGroup& g : latency.groups) {
      write_group_cdfs(out, g.key, g.latencies_minutes);
    }
    write_text_file(out_dir / "latency.csv", out.str());
  }

  RepeaterReport repeaters = repeat_commenter_stats(ds);
  {
    // Pooled per tier: distribution of comments per distinct commenter.
    std::ostringstream out;
    out << "tier,comments_per_user,F\n";
    std::map<TierLabel, std::vector<double>> pooled;
    for (const RepeaterStats& r : repeaters.influencers) {
      for (int c : r.comments_per_commenter) {
        pooled[r.tier].push_back(static_cast<double>(c));
      }
    }
    for (const auto& [tier, values] : pooled) {
      for (const CdfPoint& pt : cdf(values)) {
        out << to_string(tier) << "," << format_double(pt.x) << "," << format_double(pt.f) << "\n";
      }
    }
    write_text_file(out_dir / "repeaters.csv", out.str());
  }

  ShareReport share = sponsored_share(ds);
  {
    std::ostringstream out;
    out << "kind,tier,username,share,total\n";
    for (const ShareEntry& e : share.post_shares) {
      out << "post," << to_string(e.tier) << "," << e.username << "," << format_double(e.share)
          << "," << e.total << "\n";
    }
    for (const ShareEntry& e : share.story_shares) {
      out << "story," << to_string(e.tier) << "," << e.username << "," << format_double(e.share)
          << "," << e.total << "\n";
    }
    write_text_file(out_dir / "share.csv", out.str());
  }

  CategoryReport categories = product_category_counts(ds);
  {
    std::ostringstream out;
    out << "record,tier,key,value\n";
    for (const CategoryCount& c : categories.counts) {
      out << "category_accounts," << to_string(c.tier) << "," << c.category << "," << c.accounts
          << "\n";
    }
    std::map<TierLabel, std::vector<double>> products_per_account;
    for (const AccountCategories& a : categories.per_account) {
      products_per_account[a.tier].push_back(static_cast<double>(a.categories));
    }
    for (const auto& [tier, values] : products_per_account) {
      for (const CdfPoint& pt : cdf(values)) {
        out << "products_per_account," << to_string(tier) << "," << format_double(pt.x) << ","
            << format_double(pt.f) << "\n";
      }
    }
    write_text_file(out_dir / "categories.csv", out.str());
  }

  {
    nlohmann::json diag;
    diag["latency_unit"] = "minutes";
    nlohmann::json medians = nlohmann::json::array();
    for (const LatencyGroup& g : latency.groups) {
      nlohmann::json m;
      m["tier"] = to_string(g.key.tier);
      m["label"] = to_string(g.key.label);
      if (g.median_minutes.has_value()) {
        m["median_minutes"] = *g.median_minutes;
      } else {
        m["median_minutes"] = nullptr;
      }
      medians.push_back(std::move(m));
    }
    diag["latency_medians"] = std::move(medians);
    diag["global_post_share"] = share.global_post_share;
    diag["global_story_share"] = share.global_story_share;
    diag["zero_follower_authors"] = engagement.zero_follower_authors;
    diag["accounts_without_posts"] = share.accounts_without_posts;
    diag["accounts_without_stories"] = share.accounts_without_stories;
    write_text_file(out_dir / "diagnostics.json", diag.dump(2) + "\n");
  }
}

}  // namespace adlens::analytics
