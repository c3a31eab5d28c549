#include "adlens/textprep.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

#include "adlens/util.hpp"
#include "json.hpp"

namespace adlens::textprep {

namespace {

// Port of the classic suffix-stripping algorithm. `word` is mutated in
// place; `end` is the index of the last live letter and `stem_end` marks the
// end of the stem under consideration (the part before a matched suffix).
struct Stemmer {
  std::string& w;
  int end;
  int stem_end = 0;

  explicit Stemmer(std::string& word) : w(word), end(static_cast<int>(word.size()) - 1) {}

  bool is_consonant(int i) const {
    switch (w[static_cast<size_t>(i)]) {
      case 'a': case 'e': case 'i': case 'o': case 'u':
        return false;
      case 'y':
        return i == 0 ? true : !is_consonant(i - 1);
      default:
        return true;
    }
  }

  // Number of vowel-consonant transitions in w[0..stem_end].
  int measure() const {
    int n = 0;
    int i = 0;
    while (true) {
      if (i > stem_end) return n;
      if (!is_consonant(i)) break;
      ++i;
    }
    ++i;
    while (true) {
      while (true) {
        if (i > stem_end) return n;
        if (is_consonant(i)) break;
        ++i;
      }
      ++i;
      ++n;
      while (true) {
        if (i > stem_end) return n;
        if (!is_consonant(i)) break;
        ++i;
      }
      ++i;
    }
  }

  bool vowel_in_stem() const {
    for (int i = 0; i <= stem_end; ++i) {
      if (!is_consonant(i)) return true;
    }
    return false;
  }

  bool double_consonant(int i) const {
    if (i < 1) return false;
    if (w[static_cast<size_t>(i)] != w[static_cast<size_t>(i - 1)]) return false;
    return is_consonant(i);
  }

  // consonant-vowel-consonant ending at i, where the final consonant is not
  // w, x or y. Signals a short root like "hop" that wants a restored 'e'.
  bool cvc(int i) const {
    if (i < 2 || !is_consonant(i) || is_consonant(i - 1) || !is_consonant(i - 2)) return false;
    char c = w[static_cast<size_t>(i)];
    return c != 'w' && c != 'x' && c != 'y';
  }

  bool ends(std::string_view suffix) {
    int len = static_cast<int>(suffix.size());
    if (len > end + 1) return false;
    if (w.compare(static_cast<size_t>(end - len + 1), static_cast<size_t>(len), suffix) != 0) {
      return false;
    }
    stem_end = end - len;
    return true;
  }

  void set_suffix(std::string_view s) {
    w.replace(static_cast<size_t>(stem_end + 1), std::string::npos, s);
    end = stem_end + static_cast<int>(s.size());
    w.resize(static_cast<size_t>(end + 1));
  }

  void replace_if_m_positive(std::string_view s) {
    if (measure() > 0) set_suffix(s);
  }

  void step1ab() {
    if (w[static_cast<size_t>(end)] == 's') {
      if (ends("sses")) {
        end -= 2;
      } else if (ends("ies")) {
        set_suffix("i");
      } else if (w[static_cast<size_t>(end - 1)] != 's') {
        --end;
      }
    }
    if (ends("eed")) {
      if (measure() > 0) --end;
    } else if ((ends("ed") || ends("ing")) && vowel_in_stem()) {
      end = stem_end;
      w.resize(static_cast<size_t>(end + 1));
      if (ends("at")) {
        set_suffix("ate");
      } else if (ends("bl")) {
        set_suffix("ble");
      } else if (ends("iz")) {
        set_suffix("ize");
      } else if (double_consonant(end)) {
        char c = w[static_cast<size_t>(end)];
        if (c != 'l' && c != 's' && c != 'z') {
          --end;
          w.resize(static_cast<size_t>(end + 1));
        }
      } else {
        stem_end = end;
        if (measure() == 1 && cvc(end)) set_suffix("e");
      }
    }
    w.resize(static_cast<size_t>(end + 1));
  }

  void step1c() {
    if (ends("y") && vowel_in_stem()) w[static_cast<size_t>(end)] = 'i';
  }

  void step2() {
    switch (w[static_cast<size_t>(end - 1)]) {
      case 'a':
        if (ends("ational")) { replace_if_m_positive("ate"); break; }
        if (ends("tional")) { replace_if_m_positive("tion"); break; }
        break;
      case 'c':
        if (ends("enci")) { replace_if_m_positive("ence"); break; }
        if (ends("anci")) { replace_if_m_positive("ance"); break; }
        break;
      case 'e':
        if (ends("izer")) { replace_if_m_positive("ize"); break; }
        break;
      case 'l':
        if (ends("abli")) { replace_if_m_positive("able"); break; }
        if (ends("alli")) { replace_if_m_positive("al"); break; }
        if (ends("entli")) { replace_if_m_positive("ent"); break; }
        if (ends("eli")) { replace_if_m_positive("e"); break; }
        if (ends("ousli")) { replace_if_m_positive("ous"); break; }
        break;
      case 'o':
        if (ends("ization")) { replace_if_m_positive("ize"); break; }
        if (ends("ation")) { replace_if_m_positive("ate"); break; }
        if (ends("ator")) { replace_if_m_positive("ate"); break; }
        break;
      case 's':
        if (ends("alism")) { replace_if_m_positive("al"); break; }
        if (ends("iveness")) { replace_if_m_positive("ive"); break; }
        if (ends("fulness")) { replace_if_m_positive("ful"); break; }
        if (ends("ousness")) { replace_if_m_positive("ous"); break; }
        break;
      case 't':
        if (ends("aliti")) { replace_if_m_positive("al"); break; }
        if (ends("iviti")) { replace_if_m_positive("ive"); break; }
        if (ends("biliti")) { replace_if_m_positive("ble"); break; }
        break;
      default:
        break;
    }
  }

  void step3() {
    switch (w[static_cast<size_t>(end)]) {
      case 'e':
        if (ends("icate")) { replace_if_m_positive("ic"); break; }
        if (ends("ative")) { replace_if_m_positive(""); break; }
        if (ends("alize")) { replace_if_m_positive("al"); break; }
        break;
      case 'i':
        if (ends("iciti")) { replace_if_m_positive("ic"); break; }
        break;
      case 'l':
        if (ends("ical")) { replace_if_m_positive("ic"); break; }
        if (ends("ful")) { replace_if_m_positive(""); break; }
        break;
      case 's':
        if (ends("ness")) { replace_if_m_positive(""); break; }
        break;
      default:
        break;
    }
  }

  void step4() {
    switch (w[static_cast<size_t>(end - 1)]) {
      case 'a':
        if (ends("al")) break;
        return;
      case 'c':
        if (ends("ance")) break;
        if (ends("ence")) break;
        return;
      case 'e':
        if (ends("er")) break;
        return;
      case 'i':
        if (ends("ic")) break;
        return;
      case 'l':
        if (ends("able")) break;
        if (ends("ible")) break;
        return;
      case 'n':
        if (ends("ant")) break;
        if (ends("ement")) break;
        if (ends("ment")) break;
        if (ends("ent")) break;
        return;
      case 'o':
        if (ends("ion") && stem_end >= 0 &&
            (w[static_cast<size_t>(stem_end)] == 's' || w[static_cast<size_t>(stem_end)] == 't')) {
          break;
        }
        if (ends("ou")) break;
        return;
      case 's':
        if (ends("ism")) break;
        return;
      case 't':
        if (ends("ate")) break;
        if (ends("iti")) break;
        return;
      case 'u':
        if (ends("ous")) break;
        return;
      case 'v':
        if (ends("ive")) break;
        return;
      case 'z':
        if (ends("ize")) break;
        return;
      default:
        return;
    }
    if (measure() > 1) {
      end = stem_end;
      w.resize(static_cast<size_t>(end + 1));
    }
  }

  void step5() {
    stem_end = end;
    if (w[static_cast<size_t>(end)] == 'e') {
      int m = measure();
      if (m > 1 || (m == 1 && !cvc(end - 1))) {
        --end;
        w.resize(static_cast<size_t>(end + 1));
      }
    }
    stem_end = end;
    if (w[static_cast<size_t>(end)] == 'l' && double_consonant(end) && measure() > 1) {
      --end;
      w.resize(static_cast<size_t>(end + 1));
    }
  }

  void run() {
    if (end <= 1) return;
    step1ab();
    step1c();
    // Step 1 can shrink the word to a single letter ("ies" -> "i"); the
    // later steps index end-1.
    if (end >= 1) step2();
    if (end >= 0) step3();
    if (end >= 1) step4();
    if (end >= 0) step5();
    w.resize(static_cast<size_t>(end + 1));
  }
};

}  // namespace

std::string porter_stem(std::string word) {
  Stemmer s(word);
  s.run();
  return word;
}

std::vector<std::string> normalize_text(std::string_view text, const StopwordSet& stopwords) {
  std::string cleaned;
  cleaned.reserve(text.size());
  for (char c : text) {
    if (c >= 'A' && c <= 'Z') {
      cleaned += static_cast<char>(c - 'A' + 'a');
    } else if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
      cleaned += c;
    } else {
      cleaned += ' ';
    }
  }
  std::vector<std::string> tokens;
  std::istringstream ss(cleaned);
  std::string tok;
  while (ss >> tok) {
    if (stopwords.contains(tok)) continue;
    // Iterate to a fixed point; a single pass is not idempotent
    // (e.g. "agreed" -> "agre" -> "agr").
    for (int i = 0; i < 8; ++i) {
      std::string next = porter_stem(tok);
      if (next == tok) break;
      tok = std::move(next);
    }
    // A stem can land on a stopword ("willing" -> "will"); drop those too,
    // otherwise normalizing the joined output would not be a fixed point.
    if (stopwords.contains(tok)) continue;
    tokens.push_back(tok);
  }
  return tokens;
}

StopwordSet load_stopwords(const std::filesystem::path& path) {
  std::istringstream in(read_text_file(path));
  StopwordSet out;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    out.insert(lower_ascii(line));
  }
  return out;
}

std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("ADLENS_DATA_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
#ifdef ADLENS_DATA_DIR
  return ADLENS_DATA_DIR;
#else
  return "data";
#endif
}

StopwordSet default_stopwords() {
  return load_stopwords(default_data_dir() / "stopwords_en.txt");
}

Vocabulary Vocabulary::build(const std::vector<std::vector<std::string>>& corpus, size_t max_size) {
  if (max_size < kReservedCount + 1) {
    throw UsageError("vocabulary max_size must be >= 3");
  }
  std::map<std::string, long long> freq;
  for (const auto& doc : corpus) {
    for (const auto& tok : doc) ++freq[tok];
  }
  std::vector<std::pair<std::string, long long>> ranked(freq.begin(), freq.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  size_t keep = std::min(ranked.size(), max_size - kReservedCount);
  Vocabulary v;
  for (size_t i = 0; i < keep; ++i) {
    v.index_[ranked[i].first] = static_cast<int>(i + kReservedCount);
  }
  return v;
}

int Vocabulary::index_of(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kOovIndex : it->second;
}

bool Vocabulary::contains(const std::string& token) const { return index_.contains(token); }

std::string Vocabulary::to_json_string() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [tok, idx] : index_) j[tok] = idx;
  return j.dump();
}

Vocabulary Vocabulary::from_json_string(std::string_view text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw DataError("invalid vocabulary JSON");
  Vocabulary v;
  for (auto it = j.begin(); it != j.end(); ++it) {
    v.index_[it.key()] = it.value().get<int>();
  }
  return v;
}

std::vector<int> encode_sequence(const std::vector<std::string>& tokens, const Vocabulary& vocab,
                                 size_t max_len) {
  if (max_len < 1) throw UsageError("max_len must be >= 1");
  std::vector<int> out(max_len, Vocabulary::kPadIndex);
  size_t start = tokens.size() > max_len ? tokens.size() - max_len : 0;
  size_t n = tokens.size() - start;
  for (size_t i = 0; i < n; ++i) {
    out[max_len - n + i] = vocab.index_of(tokens[start + i]);
  }
  return out;
}

}  // namespace adlens::textprep
