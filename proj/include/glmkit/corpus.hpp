#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace glmkit {

using Sentence = std::vector<std::string>;

// The accepted punctuation class, defined in one place. A token survives
// cleaning iff it contains at least one letter, digit, or one of these
// marks. Leading and trailing marks split off as their own tokens.
struct TokenizerConfig {
  std::u32string punctuation = U".,;:!?'\"()-—";
};

struct TokenizeStats {
  std::uint64_t malformed_byte_sequences = 0;  // replaced with U+FFFD
  std::uint64_t dropped_tokens = 0;
};

// Sentence segmentation: newline, or '.'/'!'/'?' attached to a letter or
// digit and followed by whitespace. No case folding, no stemming, no
// boundary markers.
std::vector<Sentence> clean_and_tokenize(std::string_view text,
                                         const TokenizerConfig& cfg = {},
                                         TokenizeStats* stats = nullptr);
std::vector<Sentence> clean_and_tokenize(std::istream& in,
                                         const TokenizerConfig& cfg = {},
                                         TokenizeStats* stats = nullptr);

std::string detokenize(const Sentence& s);

struct CorpusSplit {
  std::vector<Sentence> train;
  std::vector<Sentence> test;
  std::uint64_t seed = 0;
  double train_fraction = 0.0;
};

// Per-sentence Bernoulli(train_fraction) assignment keyed on
// (content, index, seed), so shard boundaries cannot change the outcome.
CorpusSplit split_corpus(std::span<const Sentence> sentences,
                         double train_fraction, std::uint64_t seed);

struct TestSet {
  std::vector<Sentence> sequences;  // all of identical length
  int length = 0;
};

// Uniform sample, with replacement, over every within-sentence window of
// the given length. Throws "no eligible windows" on an empty pool.
TestSet sample_test_sequences(std::span<const Sentence> pool, int length,
                              std::uint64_t count, std::uint64_t seed);

// Keep the last `length` words of every sequence so the predicted word is
// stable across model orders.
TestSet truncate_test_set(const TestSet& base, int length);

// All contiguous windows of length n strictly inside the sentence.
std::vector<std::span<const std::string>> sliding_windows(const Sentence& s,
                                                          int n);

// One sentence (or test sequence) per line, tokens separated by single
// spaces, '\n' terminated. Byte-exact reproducible.
void write_token_lines(const std::filesystem::path& path,
                       std::span<const Sentence> lines);
std::vector<Sentence> read_token_lines(const std::filesystem::path& path);

}  // namespace glmkit
