#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>

#include "adlens/textprep.hpp"
#include "adlens/util.hpp"

using namespace adlens;
using namespace adlens::textprep;

TEST_CASE("porter stemmer: step-by-step fixture pairs") {
  // Hand-traced through the published rules.
  const std::map<std::string, std::string> fixture = {
      // step 1a
      {"caresses", "caress"},
      {"ponies", "poni"},
      {"ties", "ti"},
      {"caress", "caress"},
      {"cats", "cat"},
      // step 1b
      {"feed", "feed"},
      {"plastered", "plaster"},
      {"bled", "bled"},
      {"motoring", "motor"},
      {"sing", "sing"},
      {"conflated", "conflat"},
      {"troubled", "troubl"},
      {"sized", "size"},
      {"hopping", "hop"},
      {"tanned", "tan"},
      {"falling", "fall"},
      {"hissing", "hiss"},
      {"fizzed", "fizz"},
      {"failing", "fail"},
      {"filing", "file"},
      {"running", "run"},
      // step 1c
      {"happy", "happi"},
      {"sky", "sky"},
      // step 2
      {"relational", "relat"},
      {"conditional", "condit"},
      {"rational", "ration"},
      {"valenci", "valenc"},
      {"hesitanci", "hesit"},
      {"digitizer", "digit"},
      {"conformabli", "conform"},
      {"radicalli", "radic"},
      {"differentli", "differ"},
      {"vileli", "vile"},
      {"analogousli", "analog"},
      {"vietnamization", "vietnam"},
      {"predication", "predic"},
      {"operator", "oper"},
      {"feudalism", "feudal"},
      {"decisiveness", "decis"},
      {"hopefulness", "hope"},
      {"callousness", "callous"},
      {"formaliti", "formal"},
      {"sensitiviti", "sensit"},
      {"sensibiliti", "sensibl"},
      // step 3
      {"triplicate", "triplic"},
      {"formative", "form"},
      {"formalize", "formal"},
      {"electriciti", "electr"},
      {"electrical", "electr"},
      {"hopeful", "hope"},
      {"goodness", "good"},
      // step 4
      {"revival", "reviv"},
      {"allowance", "allow"},
      {"inference", "infer"},
      {"airliner", "airlin"},
      {"gyroscopic", "gyroscop"},
      {"adjustable", "adjust"},
      {"defensible", "defens"},
      {"irritant", "irrit"},
      {"replacement", "replac"},
      {"adjustment", "adjust"},
      {"dependent", "depend"},
      {"adoption", "adopt"},
      {"communism", "commun"},
      {"activate", "activ"},
      {"angulariti", "angular"},
      {"homologous", "homolog"},
      {"effective", "effect"},
      {"bowdlerize", "bowdler"},
      // step 5
      {"probate", "probat"},
      {"rate", "rate"},
      {"cease", "ceas"},
      {"controll", "control"},
      {"roll", "roll"},
      // short words untouched
      {"a", "a"},
      {"is", "is"},
      {"ab", "ab"},
  };
  for (const auto& [word, expected] : fixture) {
    CAPTURE(word);
    CHECK(porter_stem(word) == expected);
  }
}

TEST_CASE("porter stemmer survives degenerate inputs") {
  CHECK(porter_stem("ies") == "i");
  CHECK(porter_stem("sss") == "sss");
  CHECK(porter_stem("ing") == "ing");
  CHECK(porter_stem("eed") == "eed");
  CHECK(porter_stem("x1ing9") == "x1ing9");
}

TEST_CASE("normalize_text examples") {
  StopwordSet the_only{"the"};
  CHECK(normalize_text("Running, the BEST!", the_only) ==
        std::vector<std::string>{"run", "best"});
  CHECK(normalize_text("", the_only) == std::vector<std::string>{});
  CHECK(normalize_text("#AD @brand", {}) == std::vector<std::string>{"ad", "brand"});
  CHECK(normalize_text("caf\xc3\xa9 time", {}) == std::vector<std::string>{"caf", "time"});
}

TEST_CASE("normalize_text is idempotent over its own joined output") {
  StopwordSet stopwords = default_stopwords();
  CHECK(stopwords.size() == 127);
  Rng rng(99);
  static const std::vector<std::string> words = {
      "Running",  "agreed",   "the",      "ponies",   "electrical", "#ad",
      "BEST!!",   "hopeful",  "analogousli", "12x",   "falling",    "@someone",
      "sensibiliti", "its",   "doing",    "abliX",    "rates",      "caresses",
      "willing",  "ands",     "hers"};
  for (int iter = 0; iter < 200; ++iter) {
    std::string text;
    size_t n = 1 + rng.below(12);
    for (size_t i = 0; i < n; ++i) text += words[rng.below(words.size())] + " ";

    auto once = normalize_text(text, stopwords);
    std::string joined;
    for (const auto& t : once) joined += t + " ";
    auto twice = normalize_text(joined, stopwords);
    CAPTURE(text);
    CHECK(once == twice);
  }
}

TEST_CASE("stopword list loads from the shipped file") {
  StopwordSet s = default_stopwords();
  CHECK(s.size() == 127);
  CHECK(s.contains("the"));
  CHECK(s.contains("ourselves"));
  CHECK_FALSE(s.contains("sponsored"));
}

TEST_CASE("vocabulary build: frequency order with lexicographic ties") {
  Vocabulary v = Vocabulary::build({{"a", "b", "a"}}, 10);
  CHECK(v.index_of("a") == 2);
  CHECK(v.index_of("b") == 3);
  CHECK(v.index_of("missing") == Vocabulary::kOovIndex);

  Vocabulary tie = Vocabulary::build({{"y", "x"}}, 10);
  CHECK(tie.index_of("x") == 2);
  CHECK(tie.index_of("y") == 3);

  std::vector<std::vector<std::string>> corpus;
  std::vector<std::string> doc;
  for (int i = 0; i < 100; ++i) doc.push_back("tok" + std::to_string(i));
  corpus.push_back(doc);
  Vocabulary truncated = Vocabulary::build(corpus, 12);
  CHECK(truncated.size() == 12);  // 10 real tokens + pad + oov
  CHECK(truncated.token_indices().size() == 10);
}

TEST_CASE("vocabulary build: empty corpus and bad max_size") {
  Vocabulary v = Vocabulary::build({}, 5);
  CHECK(v.size() == 2);
  CHECK_THROWS_AS(Vocabulary::build({}, 2), UsageError);
}

TEST_CASE("vocabulary build is invariant to document order") {
  std::vector<std::vector<std::string>> docs = {
      {"red", "green", "red"}, {"blue"}, {"green", "blue", "blue", "cyan"}};
  Vocabulary base = Vocabulary::build(docs, 50);
  Rng rng(7);
  for (int iter = 0; iter < 20; ++iter) {
    rng.shuffle(docs);
    Vocabulary shuffled = Vocabulary::build(docs, 50);
    CHECK(shuffled.token_indices() == base.token_indices());
  }
}

TEST_CASE("vocabulary JSON round trip") {
  Vocabulary v = Vocabulary::build({{"alpha", "beta", "alpha"}}, 8);
  Vocabulary loaded = Vocabulary::from_json_string(v.to_json_string());
  CHECK(loaded.token_indices() == v.token_indices());
}

TEST_CASE("encode_sequence: padding, truncation and OOV") {
  Vocabulary v = Vocabulary::build({{"a", "a", "b"}}, 10);
  CHECK(encode_sequence({"a", "b"}, v, 4) == std::vector<int>{0, 0, 2, 3});
  CHECK(encode_sequence({"zzz"}, v, 4) == std::vector<int>{0, 0, 0, 1});

  std::vector<std::string> ten(10, "a");
  ten[9] = "b";
  CHECK(encode_sequence(ten, v, 4) == std::vector<int>{2, 2, 2, 3});
  CHECK_THROWS_AS(encode_sequence({"a"}, v, 0), UsageError);
}

TEST_CASE("encode_sequence output length is always max_len") {
  Vocabulary v = Vocabulary::build({{"a", "b", "c"}}, 10);
  Rng rng(5);
  for (int iter = 0; iter < 100; ++iter) {
    std::vector<std::string> tokens;
    size_t n = rng.below(30);
    for (size_t i = 0; i < n; ++i) tokens.push_back(std::string(1, static_cast<char>('a' + rng.below(4))));
    size_t max_len = 1 + rng.below(20);
    CHECK(encode_sequence(tokens, v, max_len).size() == max_len);
  }
}
