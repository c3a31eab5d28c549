#include "adlens/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "adlens/util.hpp"
#include "json.hpp"

namespace adlens::sampling {

size_t LabeledSet::count_label(int label) const {
  size_t n = 0;
  for (const LabeledExample& e : examples) {
    if (e.label == label) ++n;
  }
  return n;
}

std::vector<std::string> LabeledSet::ids() const {
  std::vector<std::string> out;
  out.reserve(examples.size());
  for (const LabeledExample& e : examples) out.push_back(e.post.id);
  return out;
}

LabeledSet build_labeled_set(const ingest::Dataset& ds, const labeling::SponsorHashtagSet& tags) {
  LabeledSet set;
  set.examples.reserve(ds.posts.size());
  for (const Post& p : ds.posts) {
    const Profile* profile = ds.find_profile(p.author);
    if (profile == nullptr) throw DataError("post " + p.id + " has no profile");
    LabeledExample e;
    e.post = p;
    e.post.sponsor_label = labeling::label_post(p, tags);
    e.profile = *profile;
    e.label = e.post.sponsor_label == SponsorLabel::Sponsored ? 1 : 0;
    e.tier = labeling::assign_tier(*profile);
    set.examples.push_back(std::move(e));
  }
  return set;
}

LabeledSet undersample_balance(const LabeledSet& set, uint64_t seed) {
  size_t sponsored = set.count_label(1);
  size_t non_sponsored = set.examples.size() - sponsored;
  if (sponsored == 0) throw DataError("nothing to balance: no sponsored examples");
  if (sponsored > non_sponsored) {
    throw DataError("sponsored class is not the minority; cannot under-sample");
  }
  if (sponsored == non_sponsored) {
    LabeledSet out = set;
    out.seed = seed;
    return out;
  }

  // Non-sponsored example indices bucketed per tier and author.
  struct AuthorPool {
    std::vector<size_t> indices;
  };
  std::map<std::string, AuthorPool> pools[4];
  for (size_t i = 0; i < set.examples.size(); ++i) {
    const LabeledExample& e = set.examples[i];
    if (e.label == 0) pools[static_cast<int>(e.tier)][e.profile.username].indices.push_back(i);
  }

  size_t to_remove = non_sponsored - sponsored;
  std::vector<bool> removed(set.examples.size(), false);
  Rng rng(seed);

  for (TierLabel tier : kAllTiers) {
    if (to_remove == 0) break;
    auto& authors = pools[static_cast<int>(tier)];
    // Ordered by remaining count descending, then username.
    auto cmp = [](const std::pair<size_t, std::string>& a,
                  const std::pair<size_t, std::string>& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    };
    std::set<std::pair<size_t, std::string>, decltype(cmp)> queue(cmp);
    for (const auto& [name, pool] : authors) {
      if (!pool.indices.empty()) queue.insert({pool.indices.size(), name});
    }
    while (to_remove > 0 && !queue.empty()) {
      auto top = *queue.begin();
      queue.erase(queue.begin());
      AuthorPool& pool = authors[top.second];
      size_t pick = static_cast<size_t>(rng.below(pool.indices.size()));
      removed[pool.indices[pick]] = true;
      pool.indices[pick] = pool.indices.back();
      pool.indices.pop_back();
      --to_remove;
      if (!pool.indices.empty()) queue.insert({pool.indices.size(), top.second});
    }
  }

  LabeledSet out;
  out.seed = seed;
  out.examples.reserve(set.examples.size() - (non_sponsored - sponsored));
  for (size_t i = 0; i < set.examples.size(); ++i) {
    if (!removed[i]) out.examples.push_back(set.examples[i]);
  }
  return out;
}

namespace {

std::vector<std::vector<size_t>> indices_by_label(const LabeledSet& set) {
  std::vector<std::vector<size_t>> by_label(2);
  for (size_t i = 0; i < set.examples.size(); ++i) {
    int label = set.examples[i].label;
    if (label != 0 && label != 1) throw DataError("labels must be 0 or 1");
    by_label[static_cast<size_t>(label)].push_back(i);
  }
  return by_label;
}

}  // namespace

std::pair<LabeledSet, LabeledSet> split_train_test(const LabeledSet& set, double test_fraction,
                                                   uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw UsageError("test fraction must be in (0, 1)");
  }
  auto by_label = indices_by_label(set);
  for (const auto& cls : by_label) {
    if (cls.size() < 2) throw DataError("train/test split requires at least 2 examples per class");
  }

  Rng rng(seed);
  std::vector<size_t> test_idx, train_idx;
  for (auto& cls : by_label) {
    rng.shuffle(cls);
    auto want = static_cast<size_t>(std::llround(test_fraction * static_cast<double>(cls.size())));
    want = std::clamp<size_t>(want, 1, cls.size() - 1);
    test_idx.insert(test_idx.end(), cls.begin(), cls.begin() + static_cast<long>(want));
    train_idx.insert(train_idx.end(), cls.begin() + static_cast<long>(want), cls.end());
  }
  std::sort(test_idx.begin(), test_idx.end());
  std::sort(train_idx.begin(), train_idx.end());

  LabeledSet train, test;
  train.seed = test.seed = seed;
  for (size_t i : train_idx) train.examples.push_back(set.examples[i]);
  for (size_t i : test_idx) test.examples.push_back(set.examples[i]);
  return {std::move(train), std::move(test)};
}

std::vector<std::vector<size_t>> kfold_partition(const LabeledSet& set, int k, uint64_t seed) {
  if (k < 2) throw UsageError("k must be >= 2");
  if (static_cast<size_t>(k) > set.examples.size()) {
    throw DataError("k exceeds the number of examples");
  }
  auto by_label = indices_by_label(set);
  Rng rng(seed);
  std::vector<std::vector<size_t>> folds(static_cast<size_t>(k));
  size_t cursor = 0;
  for (auto& cls : by_label) {
    rng.shuffle(cls);
    for (size_t idx : cls) {
      folds[cursor % static_cast<size_t>(k)].push_back(idx);
      ++cursor;
    }
  }
  for (auto& fold : folds) std::sort(fold.begin(), fold.end());
  return folds;
}

LabeledSet subset_by_ids(const LabeledSet& set, const std::set<std::string>& ids) {
  LabeledSet out;
  out.seed = set.seed;
  for (const LabeledExample& e : set.examples) {
    if (ids.contains(e.post.id)) out.examples.push_back(e);
  }
  if (out.examples.size() != ids.size()) {
    throw DataError("split manifest references posts missing from the dataset");
  }
  return out;
}

std::string split_manifest_to_json(const LabeledSet& train, const LabeledSet& test,
                                   uint64_t seed) {
  nlohmann::json j;
  j["train"] = train.ids();
  j["test"] = test.ids();
  j["seed"] = seed;
  return j.dump(2) + "\n";
}

SplitManifest parse_split_manifest(std::string_view text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.contains("train") || !j.contains("test")) {
    throw DataError("invalid split manifest JSON");
  }
  SplitManifest m;
  for (const auto& id : j["train"]) m.train_ids.insert(id.get<std::string>());
  for (const auto& id : j["test"]) m.test_ids.insert(id.get<std::string>());
  if (j.contains("seed")) m.seed = j["seed"].get<uint64_t>();
  for (const std::string& id : m.train_ids) {
    if (m.test_ids.contains(id)) {
      throw DataError("split manifest train/test overlap on post '" + id + "'");
    }
  }
  return m;
}

}  // namespace adlens::sampling
