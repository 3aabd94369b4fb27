#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <set>

#include "glmkit/corpus.hpp"
#include "glmkit/util.hpp"

using namespace glmkit;

namespace {

Sentence tokens(std::initializer_list<const char*> ws) {
  Sentence s;
  for (const char* w : ws) s.emplace_back(w);
  return s;
}

}  // namespace

TEST_CASE("terminal punctuation becomes its own token") {
  auto sents = clean_and_tokenize("The cat sat.");
  REQUIRE(sents.size() == 1);
  CHECK(sents[0] == tokens({"The", "cat", "sat", "."}));
}

TEST_CASE("tokens with no letter, digit or punctuation are dropped") {
  TokenizeStats stats;
  auto sents = clean_and_tokenize("\xEF\xBF\xBD\xEF\xBF\xBD \xEF\xBF\xBD", {}, &stats);
  CHECK(sents.empty());  // empty sentences are discarded
  CHECK(stats.dropped_tokens == 2);
}

TEST_CASE("no case folding, diacritics preserved") {
  auto sents = clean_and_tokenize("\xC3\x89ratosth\xC3\xA8ne \xC3\xA9tait grec");
  REQUIRE(sents.size() == 1);
  REQUIRE(sents[0].size() == 3);
  CHECK(sents[0][0] == "\xC3\x89ratosth\xC3\xA8ne");
}

TEST_CASE("malformed bytes are replaced and counted") {
  TokenizeStats stats;
  auto sents = clean_and_tokenize("abc \xFF\xFE def", {}, &stats);
  CHECK(stats.malformed_byte_sequences == 2);
  REQUIRE(sents.size() == 1);
  CHECK(sents[0] == tokens({"abc", "def"}));  // the U+FFFD token filtered out
  CHECK(stats.dropped_tokens == 1);
}

TEST_CASE("sentence segmentation on attached terminal punctuation") {
  auto sents = clean_and_tokenize("One two. Three four! Five?\nSix");
  REQUIRE(sents.size() == 4);
  CHECK(sents[0] == tokens({"One", "two", "."}));
  CHECK(sents[1] == tokens({"Three", "four", "!"}));
  CHECK(sents[2] == tokens({"Five", "?"}));
  CHECK(sents[3] == tokens({"Six"}));
}

TEST_CASE("interior punctuation stays inside the token") {
  auto sents = clean_and_tokenize("pay 3.5 to U.S.A or don't");
  REQUIRE(sents.size() == 1);
  CHECK(sents[0] == tokens({"pay", "3.5", "to", "U.S.A", "or", "don't"}));
}

TEST_CASE("leading and trailing marks split off one by one") {
  auto sents = clean_and_tokenize("\"Go!\" he said (twice).");
  REQUIRE(sents.size() == 1);
  CHECK(sents[0] == tokens({"\"", "Go", "!", "\"", "he", "said", "(", "twice",
                            ")", "."}));
}

TEST_CASE("tokenization is a fixed point of its own detokenized output") {
  const char* raw =
      "\"Stop!\" cried Mrs. Hale. The cart (worth 3.5) rolled on; nobody "
      "cared... Did it rain? It did -- all night.\nAnother line here.";
  auto first = clean_and_tokenize(raw);
  std::string joined;
  for (const Sentence& s : first) joined += detokenize(s) + "\n";
  auto second = clean_and_tokenize(joined);
  CHECK(first == second);
}

TEST_CASE("split is deterministic and complete") {
  std::vector<Sentence> corpus;
  for (int i = 0; i < 200; ++i)
    corpus.push_back(tokens({"w", std::to_string(i).c_str()}));
  CorpusSplit a = split_corpus(corpus, 0.8, 7);
  CorpusSplit b = split_corpus(corpus, 0.8, 7);
  CHECK(a.train == b.train);
  CHECK(a.test == b.test);
  CHECK(a.train.size() + a.test.size() == corpus.size());
  CHECK(a.train.size() > 120);  // loose Bernoulli sanity
  CHECK(a.test.size() > 10);

  CorpusSplit c = split_corpus(corpus, 0.8, 8);
  CHECK(a.train != c.train);
}

TEST_CASE("split rejects degenerate fractions, accepts tiny ones") {
  std::vector<Sentence> corpus{tokens({"a"})};
  CHECK_THROWS(split_corpus(corpus, 0.0, 1));
  CHECK_THROWS(split_corpus(corpus, 1.0, 1));
  CHECK_THROWS(split_corpus(corpus, -0.5, 1));
  CHECK_NOTHROW(split_corpus(corpus, 0.00008, 1));
  CorpusSplit empty = split_corpus(std::vector<Sentence>{}, 0.5, 1);
  CHECK(empty.train.empty());
  CHECK(empty.test.empty());
}

TEST_CASE("sliding windows") {
  Sentence s = tokens({"a", "b", "c"});
  CHECK(sliding_windows(s, 2).size() == 2);
  CHECK(sliding_windows(s, 3).size() == 1);
  CHECK(sliding_windows(tokens({"a", "b"}), 3).empty());
  auto w = sliding_windows(s, 2);
  CHECK(w[0][0] == "a");
  CHECK(w[1][1] == "c");
  for (int m = 1; m <= 6; ++m) {
    auto ws = sliding_windows(s, m);
    CHECK(static_cast<int>(ws.size()) ==
          std::max(0, static_cast<int>(s.size()) - m + 1));
  }
}

TEST_CASE("sampling draws real windows, deterministically") {
  std::vector<Sentence> pool{tokens({"a", "b", "c", "d"}),
                             tokens({"e", "f", "g"}), tokens({"h"})};
  TestSet t = sample_test_sequences(pool, 3, 50, 99);
  CHECK(t.sequences.size() == 50);
  std::set<Sentence> eligible{tokens({"a", "b", "c"}), tokens({"b", "c", "d"}),
                              tokens({"e", "f", "g"})};
  for (const Sentence& s : t.sequences) CHECK(eligible.contains(s));
  CHECK(t.sequences == sample_test_sequences(pool, 3, 50, 99).sequences);
  CHECK(t.sequences != sample_test_sequences(pool, 3, 50, 100).sequences);
}

TEST_CASE("short sentences contribute no windows; empty pool is an error") {
  std::vector<Sentence> pool{tokens({"a", "b", "c", "d"})};
  CHECK_THROWS_WITH(sample_test_sequences(pool, 5, 10, 1),
                    "no eligible windows");
}

TEST_CASE("truncation keeps the last words") {
  std::vector<Sentence> pool{tokens({"a", "b", "c", "d", "e"})};
  TestSet five = sample_test_sequences(pool, 5, 10, 3);
  TestSet three = truncate_test_set(five, 3);
  CHECK(three.length == 3);
  for (std::size_t i = 0; i < five.sequences.size(); ++i) {
    CHECK(three.sequences[i] ==
          Sentence(five.sequences[i].end() - 3, five.sequences[i].end()));
    CHECK(three.sequences[i].back() == five.sequences[i].back());
  }
  CHECK_THROWS(truncate_test_set(five, 6));
}

TEST_CASE("token lines round trip byte for byte") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "glmkit-corpus-test";
  fs::create_directories(dir);
  std::vector<Sentence> lines{tokens({"a", "b"}), tokens({"c"})};
  write_token_lines(dir / "x.txt", lines);
  CHECK(read_token_lines(dir / "x.txt") == lines);
  CHECK(read_file(dir / "x.txt") == "a b\nc\n");
  fs::remove_all(dir);
}
