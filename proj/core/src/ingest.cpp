#include "adlens/ingest.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "adlens/util.hpp"
#include "httplib.h"
#include "json.hpp"

namespace adlens::ingest {

using nlohmann::json;

namespace {

std::string get_string(const json& j, const char* field) {
  auto it = j.find(field);
  if (it == j.end() || !it->is_string()) {
    throw DataError(std::string(field) + " must be a string");
  }
  return it->get<std::string>();
}

int64_t get_int(const json& j, const char* field) {
  auto it = j.find(field);
  if (it == j.end() || !it->is_number_integer()) {
    throw DataError(std::string(field) + " must be an integer");
  }
  return it->get<int64_t>();
}

bool get_bool(const json& j, const char* field) {
  auto it = j.find(field);
  if (it == j.end() || !it->is_boolean()) {
    throw DataError(std::string(field) + " must be a boolean");
  }
  return it->get<bool>();
}

Profile profile_from_json(const json& j) {
  Profile p;
  p.username = get_string(j, "username");
  p.follower_count = get_int(j, "follower_count");
  p.followee_count = get_int(j, "followee_count");
  p.media_count = get_int(j, "media_count");
  p.is_verified = get_bool(j, "is_verified");
  p.biography = get_string(j, "biography");
  if (auto it = j.find("external_url"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw DataError("external_url must be a string");
    p.external_url = it->get<std::string>();
  }
  p.validate();
  return p;
}

Post post_from_json(const json& j) {
  Post p;
  p.id = get_string(j, "id");
  p.author = get_string(j, "username");
  p.taken_at = get_int(j, "taken_at");
  p.caption = get_string(j, "caption");
  p.like_count = get_int(j, "like_count");
  if (auto it = j.find("tagged_users"); it != j.end()) {
    if (!it->is_array()) throw DataError("tagged_users must be an array");
    for (const auto& u : *it) {
      if (!u.is_string()) throw DataError("tagged_users entries must be strings");
      p.tagged_users.push_back(u.get<std::string>());
    }
  }
  if (auto it = j.find("comments"); it != j.end()) {
    if (!it->is_array()) throw DataError("comments must be an array");
    for (const auto& c : *it) {
      CommentRef ref;
      ref.commenter = get_string(c, "username");
      ref.taken_at = get_int(c, "taken_at");
      p.comments.push_back(std::move(ref));
    }
  }
  p.derive_text_fields();
  p.validate();
  return p;
}

Story story_from_json(const json& j) {
  Story s;
  s.id = get_string(j, "id");
  s.author = get_string(j, "username");
  s.taken_at = get_int(j, "taken_at");
  s.paid_partnership = get_bool(j, "paid_partnership");
  if (auto it = j.find("advertiser_category"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw DataError("advertiser_category must be a string");
    s.advertiser_category = it->get<std::string>();
  }
  s.expires_at = s.taken_at + kStoryLifetimeSeconds;
  s.validate();
  return s;
}

json profile_to_json(const Profile& p) {
  json j;
  j["username"] = p.username;
  j["follower_count"] = p.follower_count;
  j["followee_count"] = p.followee_count;
  j["media_count"] = p.media_count;
  j["is_verified"] = p.is_verified;
  j["biography"] = p.biography;
  if (p.external_url.has_value()) j["external_url"] = *p.external_url;
  return j;
}

json post_to_json(const Post& p) {
  json j;
  j["id"] = p.id;
  j["username"] = p.author;
  j["taken_at"] = p.taken_at;
  j["caption"] = p.caption;
  j["like_count"] = p.like_count;
  j["tagged_users"] = p.tagged_users;
  json comments = json::array();
  for (const auto& c : p.comments) {
    comments.push_back({{"username", c.commenter}, {"taken_at", c.taken_at}});
  }
  j["comments"] = std::move(comments);
  return j;
}

json story_to_json(const Story& s) {
  json j;
  j["id"] = s.id;
  j["username"] = s.author;
  j["taken_at"] = s.taken_at;
  j["paid_partnership"] = s.paid_partnership;
  if (s.advertiser_category.has_value()) j["advertiser_category"] = *s.advertiser_category;
  return j;
}

template <typename T, typename ParseFn>
std::vector<T> read_jsonl(const std::filesystem::path& path, ParseFn parse,
                          const char* id_kind) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open file: " + path.string());
  std::vector<T> out;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw DataError("invalid JSON (line " + std::to_string(line_no) + ")");
    }
    try {
      T rec = parse(j);
      std::string key;
      if constexpr (std::is_same_v<T, Profile>) {
        key = rec.username;
      } else {
        key = rec.id;
      }
      if (!seen_ids.insert(key).second) {
        throw DataError("duplicate " + std::string(id_kind) + " '" + key + "'");
      }
      out.push_back(std::move(rec));
    } catch (const DataError& e) {
      throw DataError(std::string(e.what()) + " (line " + std::to_string(line_no) + ")");
    }
  }
  return out;
}

// Pagination order: newest first, id as the tiebreak.
bool page_order(const Post* a, const Post* b) {
  if (a->taken_at != b->taken_at) return a->taken_at > b->taken_at;
  return a->id < b->id;
}

std::string encode_cursor(int64_t taken_at, const std::string& id) {
  return base64_encode(std::to_string(taken_at) + ":" + id);
}

struct Cursor {
  int64_t taken_at = 0;
  std::string id;
};

std::optional<Cursor> decode_cursor(const std::string& text) {
  auto raw = base64_decode(text);
  if (!raw.has_value()) return std::nullopt;
  size_t pos = raw->find(':');
  if (pos == std::string::npos) return std::nullopt;
  Cursor c;
  try {
    c.taken_at = std::stoll(raw->substr(0, pos));
  } catch (...) {
    return std::nullopt;
  }
  c.id = raw->substr(pos + 1);
  return c;
}

}  // namespace

const Profile* Dataset::find_profile(const std::string& username) const {
  auto it = profiles.find(username);
  return it == profiles.end() ? nullptr : &it->second;
}

void Dataset::sort_canonical() {
  std::sort(posts.begin(), posts.end(), [](const Post& a, const Post& b) { return a.id < b.id; });
  std::sort(stories.begin(), stories.end(),
            [](const Story& a, const Story& b) { return a.id < b.id; });
}

void Dataset::validate() const {
  std::unordered_set<std::string> ids;
  for (const auto& [name, p] : profiles) {
    p.validate();
    if (name != p.username) throw DataError("profile map key mismatch for '" + name + "'");
  }
  for (const Post& p : posts) {
    p.validate();
    if (!ids.insert(p.id).second) throw DataError("duplicate post id '" + p.id + "'");
    if (!profiles.contains(p.author)) {
      throw DataError("post " + p.id + " references unknown profile '" + p.author + "'");
    }
  }
  ids.clear();
  for (const Story& s : stories) {
    s.validate();
    if (!ids.insert(s.id).second) throw DataError("duplicate story id '" + s.id + "'");
    if (!profiles.contains(s.author)) {
      throw DataError("story " + s.id + " references unknown profile '" + s.author + "'");
    }
  }
}

std::vector<Profile> read_profiles_jsonl(const std::filesystem::path& path) {
  return read_jsonl<Profile>(path, profile_from_json, "username");
}

std::vector<Post> read_posts_jsonl(const std::filesystem::path& path) {
  return read_jsonl<Post>(path, post_from_json, "post id");
}

std::vector<Story> read_stories_jsonl(const std::filesystem::path& path) {
  return read_jsonl<Story>(path, story_from_json, "story id");
}

std::string to_json_line(const Profile& p) { return profile_to_json(p).dump(); }
std::string to_json_line(const Post& p) { return post_to_json(p).dump(); }
std::string to_json_line(const Story& s) { return story_to_json(s).dump(); }

namespace {
template <typename T>
void write_jsonl(const std::filesystem::path& path, const std::vector<T>& v) {
  std::string out;
  for (const T& rec : v) {
    out += to_json_line(rec);
    out += '\n';
  }
  write_text_file(path, out);
}
}  // namespace

void write_profiles_jsonl(const std::filesystem::path& path, const std::vector<Profile>& v) {
  write_jsonl(path, v);
}
void write_posts_jsonl(const std::filesystem::path& path, const std::vector<Post>& v) {
  write_jsonl(path, v);
}
void write_stories_jsonl(const std::filesystem::path& path, const std::vector<Story>& v) {
  write_jsonl(path, v);
}

Dataset read_dataset_dir(const std::filesystem::path& dir) {
  Dataset ds;
  for (Profile& p : read_profiles_jsonl(dir / "profiles.jsonl")) {
    std::string key = p.username;
    ds.profiles.emplace(std::move(key), std::move(p));
  }
  ds.posts = read_posts_jsonl(dir / "posts.jsonl");
  if (std::filesystem::exists(dir / "stories.jsonl")) {
    ds.stories = read_stories_jsonl(dir / "stories.jsonl");
  }
  ds.sort_canonical();
  ds.validate();
  return ds;
}

void write_dataset_dir(const Dataset& ds, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<Profile> profiles;
  profiles.reserve(ds.profiles.size());
  for (const auto& [name, p] : ds.profiles) profiles.push_back(p);
  write_profiles_jsonl(dir / "profiles.jsonl", profiles);
  write_posts_jsonl(dir / "posts.jsonl", ds.posts);
  write_stories_jsonl(dir / "stories.jsonl", ds.stories);
}

void CrawlConfig::validate() const {
  if (seed_hashtags.size() > kMaxSeedHashtags) {
    throw UsageError("hashtag limit 30 exceeded");
  }
  if (page_size < 1) throw UsageError("page_size must be >= 1");
  if (max_pages < 1) throw UsageError("max_pages must be >= 1");
}

struct FixtureServer::Impl {
  Dataset data;
  std::unordered_map<std::string, std::vector<const Post*>> by_hashtag;
  std::unordered_map<std::string, std::vector<const Post*>> by_user;
  std::unordered_map<std::string, std::vector<const Story*>> stories_by_user;
  httplib::Server server;
  std::thread listener;
  int bound_port = 0;

  explicit Impl(Dataset snapshot) : data(std::move(snapshot)) {
    data.sort_canonical();
    data.validate();
    for (const Post& p : data.posts) {
      by_user[p.author].push_back(&p);
      for (const std::string& h : p.hashtags) by_hashtag[h].push_back(&p);
    }
    for (const Story& s : data.stories) stories_by_user[s.author].push_back(&s);
    for (auto& [_, v] : by_hashtag) std::sort(v.begin(), v.end(), page_order);
    for (auto& [_, v] : by_user) std::sort(v.begin(), v.end(), page_order);
    for (auto& [_, v] : stories_by_user) {
      std::sort(v.begin(), v.end(), [](const Story* a, const Story* b) {
        if (a->taken_at != b->taken_at) return a->taken_at > b->taken_at;
        return a->id < b->id;
      });
    }
    install_routes();
  }

  static void send_json(httplib::Response& res, const json& j, int status = 200) {
    res.status = status;
    res.set_content(j.dump(), "application/json");
  }

  void send_page(const httplib::Request& req, httplib::Response& res,
                 const std::vector<const Post*>* items) {
    static const std::vector<const Post*> kEmpty;
    if (items == nullptr) items = &kEmpty;

    size_t limit = 20;
    if (req.has_param("limit")) {
      try {
        long v = std::stol(req.get_param_value("limit"));
        limit = static_cast<size_t>(std::clamp(v, 1l, 500l));
      } catch (...) {
        send_json(res, {{"error", "invalid limit"}}, 400);
        return;
      }
    }

    size_t start = 0;
    if (req.has_param("cursor") && !req.get_param_value("cursor").empty()) {
      auto cur = decode_cursor(req.get_param_value("cursor"));
      if (!cur.has_value()) {
        send_json(res, {{"error", "invalid cursor"}}, 400);
        return;
      }
      // First item strictly after the cursor position in page order.
      Post probe;
      probe.taken_at = cur->taken_at;
      probe.id = cur->id;
      start = static_cast<size_t>(std::distance(
          items->begin(),
          std::upper_bound(items->begin(), items->end(), &probe, page_order)));
    }

    json out;
    json arr = json::array();
    size_t end = std::min(items->size(), start + limit);
    for (size_t i = start; i < end; ++i) arr.push_back(post_to_json(*(*items)[i]));
    out["items"] = std::move(arr);
    if (end < items->size()) {
      out["next_cursor"] = encode_cursor((*items)[end - 1]->taken_at, (*items)[end - 1]->id);
    } else {
      out["next_cursor"] = nullptr;
    }
    send_json(res, out);
  }

  void install_routes() {
    server.Get("/hashtag/:tag/media", [this](const httplib::Request& req, httplib::Response& res) {
      auto it = by_hashtag.find(lower_ascii(req.path_params.at("tag")));
      send_page(req, res, it == by_hashtag.end() ? nullptr : &it->second);
    });
    server.Get("/user/:name", [this](const httplib::Request& req, httplib::Response& res) {
      const std::string& name = req.path_params.at("name");
      const Profile* p = data.find_profile(name);
      if (p == nullptr) {
        send_json(res, {{"error", "unknown user '" + name + "'"}}, 404);
        return;
      }
      send_json(res, profile_to_json(*p));
    });
    server.Get("/user/:name/media", [this](const httplib::Request& req, httplib::Response& res) {
      const std::string& name = req.path_params.at("name");
      if (data.find_profile(name) == nullptr) {
        send_json(res, {{"error", "unknown user '" + name + "'"}}, 404);
        return;
      }
      auto it = by_user.find(name);
      send_page(req, res, it == by_user.end() ? nullptr : &it->second);
    });
    server.Get("/user/:name/stories", [this](const httplib::Request& req, httplib::Response& res) {
      const std::string& name = req.path_params.at("name");
      if (data.find_profile(name) == nullptr) {
        send_json(res, {{"error", "unknown user '" + name + "'"}}, 404);
        return;
      }
      json arr = json::array();
      if (auto it = stories_by_user.find(name); it != stories_by_user.end()) {
        for (const Story* s : it->second) arr.push_back(story_to_json(*s));
      }
      send_json(res, arr);
    });
  }
};

FixtureServer::FixtureServer(Dataset snapshot) : impl_(std::make_unique<Impl>(std::move(snapshot))) {}

FixtureServer::~FixtureServer() { stop(); }

int FixtureServer::start(const std::string& host, int port) {
  if (port == 0) {
    impl_->bound_port = impl_->server.bind_to_any_port(host);
    if (impl_->bound_port < 0) throw UsageError("cannot bind to " + host);
  } else {
    if (!impl_->server.bind_to_port(host, port)) {
      throw UsageError("cannot bind to " + host + ":" + std::to_string(port));
    }
    impl_->bound_port = port;
  }
  impl_->listener = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return impl_->bound_port;
}

void FixtureServer::stop() {
  if (impl_ && impl_->listener.joinable()) {
    impl_->server.stop();
    impl_->listener.join();
  }
}

int FixtureServer::port() const { return impl_->bound_port; }

namespace {

struct HttpNotFound {};

json http_get_json(const ClientConfig& cfg, const std::string& path, const std::string& context) {
  for (int attempt = 1; attempt <= cfg.retries; ++attempt) {
    httplib::Client cli(cfg.host, cfg.port);
    cli.set_connection_timeout(5, 0);
    cli.set_read_timeout(30, 0);
    auto res = cli.Get(path);
    if (res) {
      if (res->status == 200) {
        json j = json::parse(res->body, nullptr, false);
        if (j.is_discarded()) {
          throw DataError("invalid JSON response for GET " + path + " (" + context + ")");
        }
        return j;
      }
      if (res->status == 404) throw HttpNotFound{};
      // other statuses are retriable
    }
    if (attempt < cfg.retries) {
      std::this_thread::sleep_for(std::chrono::milliseconds(cfg.retry_backoff_ms));
    }
  }
  throw DataError("GET " + path + " failed after " + std::to_string(cfg.retries) +
                  " attempts (" + context + ")");
}

std::vector<Post> fetch_paged_posts(const ClientConfig& cfg, const std::string& base_path,
                                    int page_size, int max_pages, const std::string& context) {
  std::vector<Post> out;
  std::string cursor;
  for (int page = 0; page < max_pages; ++page) {
    std::string path = base_path + "?limit=" + std::to_string(page_size);
    if (!cursor.empty()) path += "&cursor=" + cursor;
    json j = http_get_json(cfg, path, context + ", cursor '" + cursor + "'");
    if (!j.contains("items") || !j["items"].is_array()) {
      throw DataError("malformed page for GET " + path);
    }
    for (const auto& item : j["items"]) out.push_back(post_from_json(item));
    if (!j.contains("next_cursor") || j["next_cursor"].is_null()) break;
    cursor = j["next_cursor"].get<std::string>();
  }
  return out;
}

}  // namespace

CrawlResult crawl_hashtags(const ClientConfig& client, const CrawlConfig& crawl) {
  crawl.validate();
  CrawlResult result;
  std::unordered_set<std::string> post_ids;
  std::set<std::string> users;
  for (const std::string& tag : crawl.seed_hashtags) {
    auto posts = fetch_paged_posts(client, "/hashtag/" + lower_ascii(tag) + "/media",
                                   crawl.page_size, crawl.max_pages, "tag '" + tag + "'");
    for (Post& p : posts) {
      users.insert(p.author);
      if (post_ids.insert(p.id).second) result.posts.push_back(std::move(p));
    }
  }
  std::sort(result.posts.begin(), result.posts.end(),
            [](const Post& a, const Post& b) { return a.id < b.id; });
  result.usernames.assign(users.begin(), users.end());
  return result;
}

TimelineResult crawl_timelines(const ClientConfig& client,
                               const std::vector<std::string>& usernames, int page_size) {
  TimelineResult result;
  std::set<std::string> unique(usernames.begin(), usernames.end());
  for (const std::string& user : unique) {
    json pj;
    try {
      pj = http_get_json(client, "/user/" + user, "user '" + user + "'");
    } catch (const HttpNotFound&) {
      result.skipped_users.push_back(user);
      continue;
    }
    Profile profile = profile_from_json(pj);
    auto posts = fetch_paged_posts(client, "/user/" + user + "/media", page_size,
                                   std::numeric_limits<int>::max(), "user '" + user + "'");
    json sj;
    try {
      sj = http_get_json(client, "/user/" + user + "/stories", "user '" + user + "'");
    } catch (const HttpNotFound&) {
      sj = json::array();
    }
    if (!sj.is_array()) throw DataError("malformed stories for user '" + user + "'");

    result.dataset.profiles.emplace(profile.username, std::move(profile));
    for (Post& p : posts) result.dataset.posts.push_back(std::move(p));
    for (const auto& s : sj) result.dataset.stories.push_back(story_from_json(s));
  }
  result.dataset.sort_canonical();
  result.dataset.validate();
  return result;
}

TimelineResult run_pipeline(const ClientConfig& client, const CrawlConfig& crawl) {
  CrawlResult discovered = crawl_hashtags(client, crawl);
  return crawl_timelines(client, discovered.usernames, crawl.page_size);
}

}  // namespace adlens::ingest
