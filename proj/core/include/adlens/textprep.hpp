#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace adlens::textprep {

using StopwordSet = std::unordered_set<std::string>;

// Single application of the Porter suffix-stripping algorithm (original
// published rules). Expects a lowercase token; words of length <= 2 are
// returned unchanged.
std::string porter_stem(std::string word);

// lowercase -> replace non-alphanumeric bytes with spaces -> split ->
// drop stopwords -> stem. Stemming runs to a fixed point per token so the
// whole pipeline is idempotent over its own joined output.
std::vector<std::string> normalize_text(std::string_view text, const StopwordSet& stopwords);

// One word per line; '#'-prefixed lines and blank lines are skipped.
StopwordSet load_stopwords(const std::filesystem::path& path);

// Resolution order: ADLENS_DATA_DIR env var, then the compiled-in default.
std::filesystem::path default_data_dir();
StopwordSet default_stopwords();

// Token index map. Index 0 is padding, 1 is out-of-vocabulary; real tokens
// start at 2 and are ranked by corpus frequency (ties lexicographic).
class Vocabulary {
 public:
  static constexpr int kPadIndex = 0;
  static constexpr int kOovIndex = 1;
  static constexpr size_t kReservedCount = 2;

  Vocabulary() = default;

  static Vocabulary build(const std::vector<std::vector<std::string>>& corpus, size_t max_size);

  int index_of(const std::string& token) const;  // kOovIndex when absent
  bool contains(const std::string& token) const;
  size_t size() const { return index_.size() + kReservedCount; }

  const std::map<std::string, int>& token_indices() const { return index_; }

  std::string to_json_string() const;
  static Vocabulary from_json_string(std::string_view text);

 private:
  std::map<std::string, int> index_;
};

// Map tokens to indices (unknown -> 1), keep the last max_len, left-pad
// with 0 to exactly max_len.
std::vector<int> encode_sequence(const std::vector<std::string>& tokens, const Vocabulary& vocab,
                                 size_t max_len);

}  // namespace adlens::textprep
