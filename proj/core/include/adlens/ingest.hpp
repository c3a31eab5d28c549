#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "adlens/model.hpp"

namespace adlens::ingest {

// An immutable snapshot of one crawl or one generated corpus.
struct Dataset {
  std::map<std::string, Profile> profiles;
  std::vector<Post> posts;     // kept sorted by id
  std::vector<Story> stories;  // kept sorted by id

  const Profile* find_profile(const std::string& username) const;
  void sort_canonical();
  // Checks per-record invariants, id uniqueness and author references.
  void validate() const;
};

std::vector<Profile> read_profiles_jsonl(const std::filesystem::path& path);
std::vector<Post> read_posts_jsonl(const std::filesystem::path& path);
std::vector<Story> read_stories_jsonl(const std::filesystem::path& path);

std::string to_json_line(const Profile& p);
std::string to_json_line(const Post& p);
std::string to_json_line(const Story& s);

void write_profiles_jsonl(const std::filesystem::path& path, const std::vector<Profile>& v);
void write_posts_jsonl(const std::filesystem::path& path, const std::vector<Post>& v);
void write_stories_jsonl(const std::filesystem::path& path, const std::vector<Story>& v);

// Directory layout: profiles.jsonl, posts.jsonl, stories.jsonl.
// stories.jsonl may be absent (treated as empty).
Dataset read_dataset_dir(const std::filesystem::path& dir);
void write_dataset_dir(const Dataset& ds, const std::filesystem::path& dir);

struct CrawlConfig {
  std::vector<std::string> seed_hashtags;
  int page_size = 20;
  int max_pages = 1000;

  static constexpr size_t kMaxSeedHashtags = 30;
  void validate() const;
};

struct ClientConfig {
  std::string host = "127.0.0.1";
  int port = 0;
  int retries = 3;
  int retry_backoff_ms = 100;
};

// In-process HTTP stand-in for the platform API. Serves an immutable
// snapshot; pagination is stable (taken_at descending, then id) with an
// opaque cursor, so concurrent readers always see consistent pages.
class FixtureServer {
 public:
  explicit FixtureServer(Dataset snapshot);
  ~FixtureServer();
  FixtureServer(const FixtureServer&) = delete;
  FixtureServer& operator=(const FixtureServer&) = delete;

  // Returns the bound port (pass port 0 for an ephemeral one).
  int start(const std::string& host, int port);
  void stop();
  int port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct CrawlResult {
  std::vector<Post> posts;            // deduplicated by id, sorted by id
  std::vector<std::string> usernames; // sorted, unique
};

// Pages through every seed hashtag and collects the matching posts plus
// the set of authors behind them.
CrawlResult crawl_hashtags(const ClientConfig& client, const CrawlConfig& crawl);

struct TimelineResult {
  Dataset dataset;
  std::vector<std::string> skipped_users;  // unknown on the server; not fatal
};

// Fetches profile, full post timeline and stories for each username.
TimelineResult crawl_timelines(const ClientConfig& client, const std::vector<std::string>& usernames,
                               int page_size = 50);

// Hashtag discovery followed by per-author timeline collection.
TimelineResult run_pipeline(const ClientConfig& client, const CrawlConfig& crawl);

}  // namespace adlens::ingest
