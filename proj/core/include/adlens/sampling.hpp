#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "adlens/ingest.hpp"
#include "adlens/labeling.hpp"
#include "adlens/model.hpp"

namespace adlens::sampling {

// One classifier example: the raw post and author profile plus the
// rule-derived binary label. Featurization happens later so that
// vocabulary and standardization can be refit per split without leakage.
struct LabeledExample {
  Post post;
  Profile profile;
  int label = 0;  // 1 = sponsored
  TierLabel tier = TierLabel::Nano;
};

struct LabeledSet {
  std::vector<LabeledExample> examples;
  uint64_t seed = 0;  // provenance of the last stochastic operation

  size_t count_label(int label) const;
  std::vector<std::string> ids() const;
};

LabeledSet build_labeled_set(const ingest::Dataset& ds, const labeling::SponsorHashtagSet& tags);

// Keeps every sponsored example and removes random non-sponsored ones until
// the classes are equal. Removal walks tiers Nano -> Mega, always taking
// from the author with the most remaining non-sponsored posts (ties by
// username), which preserves author diversity. Deterministic under seed.
LabeledSet undersample_balance(const LabeledSet& set, uint64_t seed);

// Label-stratified split; each side keeps the class ratio within one
// example. Requires at least 2 examples per class.
std::pair<LabeledSet, LabeledSet> split_train_test(const LabeledSet& set, double test_fraction,
                                                   uint64_t seed);

// Label-stratified partition into k folds of near-equal size (difference
// at most one, overall and per class).
std::vector<std::vector<size_t>> kfold_partition(const LabeledSet& set, int k, uint64_t seed);

LabeledSet subset_by_ids(const LabeledSet& set, const std::set<std::string>& ids);

// Split manifest: {"train": [post ids], "test": [post ids], "seed": n}.
std::string split_manifest_to_json(const LabeledSet& train, const LabeledSet& test, uint64_t seed);

struct SplitManifest {
  std::set<std::string> train_ids;
  std::set<std::string> test_ids;
  uint64_t seed = 0;
};

// Parses and rejects manifests whose sides overlap.
SplitManifest parse_split_manifest(std::string_view text);

}  // namespace adlens::sampling
