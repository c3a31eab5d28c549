#include "adlens/synth.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "adlens/labeling.hpp"
#include "adlens/textprep.hpp"
#include "adlens/util.hpp"
#include "json.hpp"

namespace adlens::synth {

namespace {

// Generation window: July-August 2019, Unix seconds.
constexpr int64_t kWindowStart = 1561939200;
constexpr int64_t kWindowEnd = 1567209600;

const std::vector<std::pair<std::string, std::string>>& product_pool() {
  // (raw caption word, hashtag base)
  static const std::vector<std::pair<std::string, std::string>> pool = {
      {"outfit", "outfit"},       {"serum", "glowserum"},   {"sneakers", "kicks"},
      {"protein shake", "shake"}, {"watch", "timepiece"},   {"backpack", "daypack"},
      {"coffee blend", "brew"},   {"leggings", "leggings"}, {"sunglasses", "shades"},
      {"candle", "candleco"},     {"planner", "planner"},   {"skincare set", "glowkit"},
      {"headphones", "soundbuds"}, {"snack box", "snackbox"}, {"yoga mat", "flowmat"},
  };
  return pool;
}

const std::vector<std::string>& brand_pool() {
  static const std::vector<std::string> pool = {
      "brandco",    "stylehaus",  "glowlab",   "peakgear",  "nordicfit",
      "purebeanco", "lumenwear",  "vitaboost", "urbanloft", "wildtrailco",
      "silkroom",   "brightlane", "zestfoods", "mooncraft", "fleetstep",
  };
  return pool;
}

const std::vector<std::string>& hashtag_variant_suffixes() {
  static const std::vector<std::string> pool = {"", "day", "style", "love", "life"};
  return pool;
}

const std::vector<std::string>& hashtag_variant_prefixes() {
  static const std::vector<std::string> pool = {"", "best", "trendy", "my"};
  return pool;
}

const std::vector<std::string>& cta_pool() {
  static const std::vector<std::string> pool = {
      "link in bio",      "download it now",        "watch my story for more",
      "use discount code", "comment to win",        "like to win",
      "swipe up for more", "check the link in bio",
  };
  return pool;
}

const std::vector<std::string>& generic_hashtag_pool() {
  static const std::vector<std::string> pool = {
      "sunset", "family", "weekend", "nature", "hiking",  "coffee",  "art",
      "music",  "friends", "homemade", "autumn", "morning", "citylife", "slowliving",
  };
  return pool;
}

const std::vector<std::string>& neutral_bio_pool() {
  static const std::vector<std::string> pool = {
      "coffee lover and weekend hiker",
      "mum of two, baker of many things",
      "travel, light, and film photos",
      "plants, books, rainy days",
      "amateur cook, professional eater",
      "runner in progress",
      "cat person living a dog person's life",
      "sketching my way through the city",
      "collecting sunsets",
      "probably in the garden",
  };
  return pool;
}

const std::vector<std::string>& place_pool() {
  static const std::vector<std::string> pool = {
      "the lake",    "the coast",      "the old town", "the harbor", "the valley",
      "the ridge",   "the north shore", "the gardens",  "the pier",   "the east market",
  };
  return pool;
}

const std::vector<std::string>& category_pool() {
  static const std::vector<std::string> pool = {
      "Health/Beauty",   "Product/Service", "Clothing (Brand)", "Food & Beverage",
      "Travel",          "Fitness",         "Electronics",      "Jewelry/Watches",
      "Home & Garden",   "Toys & Games",    "Pet Supplies",     "Finance",
      "Education",       "Entertainment",   "Automotive",       "Sports",
      "Art & Design",    "Music",           "Photography",      "Gaming",
  };
  return pool;
}

std::string fill_placeholders(std::string text, Rng& rng) {
  auto replace_all = [&](std::string_view key, auto make_value) {
    size_t pos;
    while ((pos = text.find(key)) != std::string::npos) {
      text.replace(pos, key.size(), make_value());
    }
  };
  replace_all("{place}", [&] { return place_pool()[rng.below(place_pool().size())]; });
  replace_all("{day}", [&] {
    static const std::vector<std::string> days = {"monday", "tuesday",  "wednesday", "thursday",
                                                  "friday", "saturday", "sunday"};
    return days[rng.below(days.size())];
  });
  replace_all("{n}", [&] { return std::to_string(rng.uniform_int(2, 12)); });
  return text;
}

std::vector<std::string> load_neutral_templates(const SynthConfig& config) {
  std::filesystem::path path = config.neutral_templates_path.has_value()
                                   ? std::filesystem::path(*config.neutral_templates_path)
                                   : textprep::default_data_dir() / "neutral_captions.txt";
  std::istringstream in(read_text_file(path));
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (!line.empty()) out.push_back(line);
  }
  if (out.empty()) throw DataError("neutral caption template file is empty: " + path.string());
  return out;
}

struct FollowerBand {
  int64_t lo, hi;
};

FollowerBand follower_band(TierLabel tier) {
  switch (tier) {
    case TierLabel::Nano: return {150, 10'000};
    case TierLabel::Micro: return {10'001, 99'999};
    case TierLabel::Macro: return {100'000, 999'999};
    case TierLabel::Mega: return {1'000'000, 8'000'000};
  }
  return {150, 10'000};
}

double verified_rate(TierLabel tier) {
  switch (tier) {
    case TierLabel::Nano: return 0.005;
    case TierLabel::Micro: return 0.04;
    case TierLabel::Macro: return 0.22;
    case TierLabel::Mega: return 0.82;
  }
  return 0.0;
}

struct AccountPlan {
  std::string username;
  TierLabel tier = TierLabel::Nano;
  int post_count = 0;
  int story_count = 0;
  std::vector<size_t> post_slots;  // global post indices
};

std::string gratitude_phrase(Rng& rng, const std::string& brand, const std::string& product) {
  switch (rng.below(5)) {
    case 0: return "thank you @" + brand;
    case 1: return "many thanks to @" + brand;
    case 2: return product + " from this page";
    case 3: return "my top choice is " + product;
    default: return "go and follow @" + brand;
  }
}

std::string make_discount_code(Rng& rng) {
  std::string code;
  for (int i = 0; i < 3; ++i) code += static_cast<char>('A' + rng.below(26));
  code += std::to_string(rng.uniform_int(10, 99));
  return code;
}

}  // namespace

std::string_view to_string(TrueStatus status) {
  switch (status) {
    case TrueStatus::Sponsored: return "sponsored";
    case TrueStatus::Hidden: return "hidden";
    case TrueStatus::Organic: return "organic";
  }
  return "organic";
}

std::optional<TrueStatus> true_status_from_string(std::string_view s) {
  if (s == "sponsored") return TrueStatus::Sponsored;
  if (s == "hidden") return TrueStatus::Hidden;
  if (s == "organic") return TrueStatus::Organic;
  return std::nullopt;
}

void SynthConfig::validate() const {
  auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in01(sponsored_fraction) || !in01(hidden_fraction)) {
    throw UsageError("fractions must lie in [0, 1]");
  }
  if (hidden_fraction > sponsored_fraction) {
    throw UsageError("infeasible config: hidden fraction exceeds sponsored fraction");
  }
  for (double r : {signals.product_in_caption, signals.mention, signals.gratitude,
                   signals.call_to_action, signals.product_hashtag, signals.bio_sponsor_info,
                   signals.bio_tag_or_mention, signals.bio_call_to_action,
                   signals.bio_external_url, signals.bio_video_link}) {
    if (!in01(r)) throw UsageError("signal rates must lie in [0, 1]");
  }
  for (int c : accounts_per_tier) {
    if (c < 0) throw UsageError("account counts must be >= 0");
  }
  if (posts_per_account[0] < 0 || posts_per_account[1] < posts_per_account[0]) {
    throw UsageError("invalid posts_per_account range");
  }
  if (stories_per_account[0] < 0 || stories_per_account[1] < stories_per_account[0]) {
    throw UsageError("invalid stories_per_account range");
  }
  if (min_declared_per_account < 0) throw UsageError("min_declared_per_account must be >= 0");
  if (min_declared_per_account > posts_per_account[0]) {
    throw UsageError("min_declared_per_account exceeds the minimum posts per account");
  }
}

SynthResult generate_corpus(const SynthConfig& config) {
  config.validate();
  Rng rng(config.seed);
  std::vector<std::string> neutral_templates = load_neutral_templates(config);
  labeling::SponsorHashtagSet sponsor_tags = labeling::SponsorHashtagSet::defaults();
  std::vector<std::string> sponsor_tag_list(sponsor_tags.tags.begin(), sponsor_tags.tags.end());

  // Account plans and post slots.
  std::vector<AccountPlan> accounts;
  size_t total_posts = 0;
  for (TierLabel tier : kAllTiers) {
    int count = config.accounts_per_tier[static_cast<size_t>(tier)];
    for (int i = 0; i < count; ++i) {
      AccountPlan plan;
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%s_%04d", std::string(to_string(tier)).c_str(), i + 1);
      plan.username = buf;
      plan.tier = tier;
      plan.post_count =
          static_cast<int>(rng.uniform_int(config.posts_per_account[0], config.posts_per_account[1]));
      plan.story_count = static_cast<int>(
          rng.uniform_int(config.stories_per_account[0], config.stories_per_account[1]));
      for (int p = 0; p < plan.post_count; ++p) plan.post_slots.push_back(total_posts++);
      accounts.push_back(std::move(plan));
    }
  }
  if (total_posts == 0) throw UsageError("config generates no posts");

  // True-status assignment with exact counts.
  auto n_sponsored = static_cast<size_t>(
      std::llround(config.sponsored_fraction * static_cast<double>(total_posts)));
  auto n_hidden = static_cast<size_t>(
      std::llround(config.hidden_fraction * static_cast<double>(total_posts)));
  n_hidden = std::min(n_hidden, n_sponsored);
  size_t mandatory = static_cast<size_t>(config.min_declared_per_account) * accounts.size();
  if (n_sponsored - n_hidden < mandatory) {
    throw UsageError("infeasible config: sponsored fraction cannot cover min_declared_per_account");
  }

  std::vector<TrueStatus> status(total_posts, TrueStatus::Organic);
  std::vector<bool> reserved(total_posts, false);
  size_t declared_left = n_sponsored - n_hidden;
  for (const AccountPlan& plan : accounts) {
    for (size_t picked :
         rng.sample_without_replacement(plan.post_slots.size(),
                                        static_cast<size_t>(config.min_declared_per_account))) {
      status[plan.post_slots[picked]] = TrueStatus::Sponsored;
      reserved[plan.post_slots[picked]] = true;
      --declared_left;
    }
  }
  std::vector<size_t> free_slots;
  for (size_t i = 0; i < total_posts; ++i) {
    if (!reserved[i]) free_slots.push_back(i);
  }
  size_t remaining_sponsored = declared_left + n_hidden;
  std::vector<size_t> chosen = rng.sample_without_replacement(free_slots.size(), remaining_sponsored);
  // draw order is uniform, so splitting it keeps declared and hidden
  // uniformly spread over accounts and tiers
  for (size_t n = 0; n < chosen.size(); ++n) {
    status[free_slots[chosen[n]]] = n < declared_left ? TrueStatus::Sponsored : TrueStatus::Hidden;
  }

  SynthResult result;
  ingest::Dataset& ds = result.dataset;

  size_t story_counter = 0;
  for (AccountPlan& plan : accounts) {
    bool is_promoter = false;
    for (size_t slot : plan.post_slots) {
      if (status[slot] != TrueStatus::Organic) is_promoter = true;
    }

    // Profile
    Profile profile;
    profile.username = plan.username;
    FollowerBand band = follower_band(plan.tier);
    profile.follower_count = rng.uniform_int(band.lo, band.hi);
    profile.followee_count = rng.uniform_int(50, 4000);
    profile.media_count = plan.post_count + plan.story_count + rng.uniform_int(0, 200);
    profile.is_verified = rng.bernoulli(verified_rate(plan.tier));

    const auto& signals = config.signals;
    std::vector<std::string> bio_parts;
    if (is_promoter) {
      if (rng.bernoulli(signals.bio_sponsor_info)) {
        switch (rng.below(3)) {
          case 0: bio_parts.push_back("sponsor info in dm"); break;
          case 1: bio_parts.push_back("campaign details on request"); break;
          default:
            bio_parts.push_back("promotion code " + make_discount_code(rng));
            break;
        }
      }
      if (rng.bernoulli(signals.bio_tag_or_mention)) {
        const auto& brand = brand_pool()[rng.below(brand_pool().size())];
        bio_parts.push_back(rng.bernoulli(0.5) ? "@" + brand : "#" +
                            product_pool()[rng.below(product_pool().size())].second);
      }
      if (rng.bernoulli(signals.bio_call_to_action)) {
        static const std::vector<std::string> ctas = {
            "check out my latest drop", "follow for more finds", "join the list",
            "watch before you buy",      "more info below"};
        bio_parts.push_back(ctas[rng.below(ctas.size())]);
      }
      if (rng.bernoulli(signals.bio_video_link)) {
        bio_parts.push_back("new video: youtu.be/v" + std::to_string(rng.uniform_int(1000, 9999)));
      }
      if (rng.bernoulli(signals.bio_external_url)) {
        profile.external_url = "https://links.example/" + make_discount_code(rng);
      }
    } else {
      bio_parts.push_back(neutral_bio_pool()[rng.below(neutral_bio_pool().size())]);
      if (rng.bernoulli(0.05)) {
        profile.external_url = "https://blog.example/" + plan.username;
      }
    }
    for (size_t i = 0; i < bio_parts.size(); ++i) {
      if (i > 0) profile.biography += " | ";
      profile.biography += bio_parts[i];
    }

    // Posts
    std::vector<Post> posts;
    for (size_t local = 0; local < plan.post_slots.size(); ++local) {
      size_t slot = plan.post_slots[local];
      TrueStatus post_status = status[slot];
      bool truly_sponsored = post_status != TrueStatus::Organic;

      Post post;
      char idbuf[24];
      std::snprintf(idbuf, sizeof(idbuf), "p%07zu", slot);
      post.id = idbuf;
      post.author = plan.username;
      post.taken_at = rng.uniform_int(kWindowStart, kWindowEnd);

      if (truly_sponsored) {
        const auto& [product, hashtag_base] = product_pool()[rng.below(product_pool().size())];
        const std::string& brand = brand_pool()[rng.below(brand_pool().size())];
        std::vector<std::string> parts;
        bool mentioned = false;
        if (rng.bernoulli(signals.gratitude)) {
          std::string phrase = gratitude_phrase(rng, brand, product);
          mentioned = phrase.find('@') != std::string::npos;
          parts.push_back(std::move(phrase));
        } else {
          parts.push_back("so excited to share this with you");
        }
        if (rng.bernoulli(signals.product_in_caption)) {
          parts.push_back("loving my new " + product);
        }
        if (rng.bernoulli(signals.mention) && !mentioned) {
          parts.push_back("with @" + brand);
        }
        if (rng.bernoulli(signals.call_to_action)) {
          std::string cta = cta_pool()[rng.below(cta_pool().size())];
          if (cta == "use discount code") cta += " " + make_discount_code(rng);
          parts.push_back(std::move(cta));
        }
        if (rng.bernoulli(signals.product_hashtag)) {
          size_t variants = 1 + rng.below(3);
          for (size_t v = 0; v < variants; ++v) {
            std::string tag = "#" + hashtag_variant_prefixes()[rng.below(hashtag_variant_prefixes().size())] +
                              hashtag_base +
                              hashtag_variant_suffixes()[rng.below(hashtag_variant_suffixes().size())];
            parts.push_back(std::move(tag));
          }
        }
        if (post_status == TrueStatus::Sponsored) {
          // disclosure tags; occasionally cased differently
          std::string tag = sponsor_tag_list[rng.below(sponsor_tag_list.size())];
          if (rng.bernoulli(0.15)) tag[0] = static_cast<char>(tag[0] - 'a' + 'A');
          parts.push_back("#" + tag);
          if (rng.bernoulli(0.3)) {
            parts.push_back("#" + sponsor_tag_list[rng.below(sponsor_tag_list.size())]);
          }
        }
        if (rng.bernoulli(0.7)) post.tagged_users.push_back(brand);
        std::string caption;
        for (size_t i = 0; i < parts.size(); ++i) {
          if (i > 0) caption += parts[i][0] == '#' ? " " : ". ";
          caption += parts[i];
        }
        post.caption = caption;
      } else {
        std::string caption =
            fill_placeholders(neutral_templates[rng.below(neutral_templates.size())], rng);
        if (rng.bernoulli(0.4)) {
          size_t n_tags = 1 + rng.below(3);
          for (size_t v = 0; v < n_tags; ++v) {
            caption += " #" + generic_hashtag_pool()[rng.below(generic_hashtag_pool().size())];
          }
        }
        if (rng.bernoulli(0.15)) {
          caption += " with @friend_" + std::to_string(rng.uniform_int(1, 999));
        }
        post.caption = caption;
      }
      post.derive_text_fields();

      const auto& eng = config.engagement;
      auto tier_idx = static_cast<size_t>(plan.tier);
      double comment_mult = truly_sponsored ? eng.sponsored_comment_multiplier : 1.0;
      double like_mult = truly_sponsored ? eng.sponsored_like_multiplier : 1.0;
      post.like_count = rng.poisson(eng.like_mean[tier_idx] * like_mult);
      long long n_comments = rng.poisson(eng.comment_mean[tier_idx] * comment_mult);

      double latency_median = eng.latency_median_minutes[tier_idx] *
                              (truly_sponsored ? eng.sponsored_latency_multiplier : 1.0);
      for (long long c = 0; c < n_comments; ++c) {
        CommentRef ref;
        ref.taken_at =
            post.taken_at + std::llround(rng.exponential_with_median(latency_median) * 60.0);
        post.comments.push_back(std::move(ref));  // commenter filled below
      }

      result.manifest.push_back({post.id, post_status});
      posts.push_back(std::move(post));
    }

    // Commenter identities for this influencer: target repeat fraction r
    // means roughly U = C / (1 + r) distinct users.
    {
      size_t total_comments = 0;
      for (const Post& p : posts) total_comments += p.comments.size();
      if (total_comments > 0) {
        double r = config.engagement.repeat_commenter_fraction;
        size_t unique = std::max<size_t>(
            1, static_cast<size_t>(std::floor(static_cast<double>(total_comments) / (1.0 + r))));
        std::vector<size_t> multiplicity(unique, 1);
        size_t extra = total_comments - unique;
        size_t cursor = 0;
        while (extra > 0) {
          ++multiplicity[cursor % unique];
          ++cursor;
          --extra;
        }
        std::vector<std::string> slots;
        slots.reserve(total_comments);
        for (size_t u = 0; u < unique; ++u) {
          std::string name = "fan_" + plan.username + "_" + std::to_string(u + 1);
          for (size_t m = 0; m < multiplicity[u]; ++m) slots.push_back(name);
        }
        rng.shuffle(slots);
        size_t next_slot = 0;
        for (Post& p : posts) {
          for (CommentRef& ref : p.comments) ref.commenter = slots[next_slot++];
          std::sort(p.comments.begin(), p.comments.end(),
                    [](const CommentRef& a, const CommentRef& b) {
                      if (a.taken_at != b.taken_at) return a.taken_at < b.taken_at;
                      return a.commenter < b.commenter;
                    });
        }
      }
    }

    // Stories
    std::vector<Story> stories;
    std::vector<std::string> category_plan;
    for (int s = 0; s < plan.story_count; ++s) {
      Story story;
      char idbuf[24];
      std::snprintf(idbuf, sizeof(idbuf), "s%07zu", story_counter++);
      story.id = idbuf;
      story.author = plan.username;
      story.taken_at = rng.uniform_int(kWindowStart, kWindowEnd);
      story.expires_at = story.taken_at + kStoryLifetimeSeconds;
      story.paid_partnership =
          rng.bernoulli(config.paid_story_fraction[static_cast<size_t>(plan.tier)]);
      if (story.paid_partnership) {
        if (category_plan.empty()) {
          size_t want = 1;
          if (!rng.bernoulli(config.single_category_fraction[static_cast<size_t>(plan.tier)])) {
            want = 2 + static_cast<size_t>(rng.poisson(0.7));
          }
          want = std::min(want, category_pool().size());
          for (size_t pick : rng.sample_without_replacement(category_pool().size(), want)) {
            category_plan.push_back(category_pool()[pick]);
          }
        }
        // cycle the plan so every planned category is observed when possible
        story.advertiser_category = category_plan[static_cast<size_t>(s) % category_plan.size()];
      }
      stories.push_back(std::move(story));
    }

    ds.profiles.emplace(profile.username, std::move(profile));
    for (Post& p : posts) ds.posts.push_back(std::move(p));
    for (Story& s : stories) ds.stories.push_back(std::move(s));
  }

  ds.sort_canonical();
  ds.validate();
  std::sort(result.manifest.begin(), result.manifest.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) { return a.post_id < b.post_id; });
  return result;
}

void write_corpus(const SynthResult& result, const std::filesystem::path& dir) {
  ingest::write_dataset_dir(result.dataset, dir);
  std::string out;
  for (const ManifestEntry& e : result.manifest) {
    nlohmann::json j;
    j["post_id"] = e.post_id;
    j["true_status"] = to_string(e.status);
    out += j.dump();
    out += '\n';
  }
  write_text_file(dir / "manifest.jsonl", out);
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  std::istringstream in(read_text_file(path));
  std::vector<ManifestEntry> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("post_id") || !j.contains("true_status")) {
      throw DataError("invalid manifest line " + std::to_string(line_no));
    }
    auto status = true_status_from_string(j["true_status"].get<std::string>());
    if (!status.has_value()) {
      throw DataError("unknown true_status (line " + std::to_string(line_no) + ")");
    }
    out.push_back({j["post_id"].get<std::string>(), *status});
  }
  return out;
}

namespace {

template <typename T, size_t N>
void read_array(const nlohmann::json& j, const char* key, std::array<T, N>& out) {
  if (!j.contains(key)) return;
  const auto& arr = j.at(key);
  if (!arr.is_array() || arr.size() != N) {
    throw DataError(std::string(key) + " must be an array of " + std::to_string(N));
  }
  for (size_t i = 0; i < N; ++i) out[i] = arr.at(i).get<T>();
}

template <typename T>
void read_scalar(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

SynthConfig SynthConfig::from_json_string(std::string_view text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw DataError("invalid synth config JSON");
  SynthConfig c;
  read_array(j, "accounts_per_tier", c.accounts_per_tier);
  read_array(j, "posts_per_account", c.posts_per_account);
  read_array(j, "stories_per_account", c.stories_per_account);
  read_scalar(j, "sponsored_fraction", c.sponsored_fraction);
  read_scalar(j, "hidden_fraction", c.hidden_fraction);
  read_scalar(j, "min_declared_per_account", c.min_declared_per_account);
  if (j.contains("signals")) {
    const auto& s = j.at("signals");
    read_scalar(s, "product_in_caption", c.signals.product_in_caption);
    read_scalar(s, "mention", c.signals.mention);
    read_scalar(s, "gratitude", c.signals.gratitude);
    read_scalar(s, "call_to_action", c.signals.call_to_action);
    read_scalar(s, "product_hashtag", c.signals.product_hashtag);
    read_scalar(s, "bio_sponsor_info", c.signals.bio_sponsor_info);
    read_scalar(s, "bio_tag_or_mention", c.signals.bio_tag_or_mention);
    read_scalar(s, "bio_call_to_action", c.signals.bio_call_to_action);
    read_scalar(s, "bio_external_url", c.signals.bio_external_url);
    read_scalar(s, "bio_video_link", c.signals.bio_video_link);
  }
  if (j.contains("engagement")) {
    const auto& e = j.at("engagement");
    read_array(e, "comment_mean", c.engagement.comment_mean);
    read_scalar(e, "sponsored_comment_multiplier", c.engagement.sponsored_comment_multiplier);
    read_array(e, "like_mean", c.engagement.like_mean);
    read_scalar(e, "sponsored_like_multiplier", c.engagement.sponsored_like_multiplier);
    read_array(e, "latency_median_minutes", c.engagement.latency_median_minutes);
    read_scalar(e, "sponsored_latency_multiplier", c.engagement.sponsored_latency_multiplier);
    read_scalar(e, "repeat_commenter_fraction", c.engagement.repeat_commenter_fraction);
  }
  read_array(j, "paid_story_fraction", c.paid_story_fraction);
  read_array(j, "single_category_fraction", c.single_category_fraction);
  if (j.contains("neutral_templates_path") && !j.at("neutral_templates_path").is_null()) {
    c.neutral_templates_path = j.at("neutral_templates_path").get<std::string>();
  }
  read_scalar(j, "seed", c.seed);
  c.validate();
  return c;
}

std::string SynthConfig::to_json_string() const {
  nlohmann::json j;
  j["accounts_per_tier"] = accounts_per_tier;
  j["posts_per_account"] = posts_per_account;
  j["stories_per_account"] = stories_per_account;
  j["sponsored_fraction"] = sponsored_fraction;
  j["hidden_fraction"] = hidden_fraction;
  j["min_declared_per_account"] = min_declared_per_account;
  j["signals"] = {{"product_in_caption", signals.product_in_caption},
                  {"mention", signals.mention},
                  {"gratitude", signals.gratitude},
                  {"call_to_action", signals.call_to_action},
                  {"product_hashtag", signals.product_hashtag},
                  {"bio_sponsor_info", signals.bio_sponsor_info},
                  {"bio_tag_or_mention", signals.bio_tag_or_mention},
                  {"bio_call_to_action", signals.bio_call_to_action},
                  {"bio_external_url", signals.bio_external_url},
                  {"bio_video_link", signals.bio_video_link}};
  j["engagement"] = {{"comment_mean", engagement.comment_mean},
                     {"sponsored_comment_multiplier", engagement.sponsored_comment_multiplier},
                     {"like_mean", engagement.like_mean},
                     {"sponsored_like_multiplier", engagement.sponsored_like_multiplier},
                     {"latency_median_minutes", engagement.latency_median_minutes},
                     {"sponsored_latency_multiplier", engagement.sponsored_latency_multiplier},
                     {"repeat_commenter_fraction", engagement.repeat_commenter_fraction}};
  j["paid_story_fraction"] = paid_story_fraction;
  j["single_category_fraction"] = single_category_fraction;
  if (neutral_templates_path.has_value()) {
    j["neutral_templates_path"] = *neutral_templates_path;
  } else {
    j["neutral_templates_path"] = nullptr;
  }
  j["seed"] = seed;
  return j.dump(2) + "\n";
}

}  // namespace adlens::synth
