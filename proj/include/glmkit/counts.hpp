#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "glmkit/corpus.hpp"
#include "glmkit/pattern.hpp"

namespace glmkit {

enum class CountKind { kAbsolute, kContinuation };
std::string_view to_string(CountKind kind);

struct DiscountSet {
  double y = 0.0;
  double d1 = 0.5;
  double d2 = 1.0;
  double d3plus = 1.5;

  double for_count(std::uint64_t c) const {
    if (c == 0) return 0.0;
    if (c == 1) return d1;
    if (c == 2) return d2;
    return d3plus;
  }
  bool operator==(const DiscountSet&) const = default;
};

// Y = n1/(n1+n2), D1 = 1-2Y*n2/n1, D2 = 2-3Y*n3/n2, D3+ = 3-4Y*n4/n3.
// Zero denominators fall back to the defaults above; negative values
// clamp to zero. Total on all inputs.
DiscountSet discounts(std::uint64_t n1, std::uint64_t n2, std::uint64_t n3,
                      std::uint64_t n4);

struct DiscountStats {
  Pattern pattern;
  CountKind kind = CountKind::kAbsolute;
  std::uint64_t n1 = 0, n2 = 0, n3 = 0, n4 = 0;
  DiscountSet d;
  bool operator==(const DiscountStats&) const = default;
};

// Words joined by '\t'; tokens never contain whitespace.
using Table = std::unordered_map<std::string, std::uint64_t>;

std::string key_of(std::span<const std::string> words);
std::vector<std::string> words_of(std::string_view key);

// Immutable after build. Tables exist for exactly the patterns of
// lattice(order); continuation tables for every pattern except the top.
struct CountStore {
  int order = 0;
  std::uint64_t corpus_hash = 0;
  std::uint64_t seed = 0;
  std::uint64_t total_tokens = 0;

  std::map<Pattern, Table> counts;    // aggregate counts
  std::map<Pattern, Table> cont_num;  // distinct fillers, target fixed
  std::map<Pattern, Table> cont_den;  // distinct (filler, target); key = context
  std::map<std::pair<Pattern, CountKind>, DiscountStats> discount_stats;

  std::size_t vocab_size() const {
    auto it = counts.find(Pattern::counted(1));
    return it == counts.end() ? 0 : it->second.size();
  }
  bool operator==(const CountStore&) const = default;
};

// One corpus scan builds the full n-gram tables; internal-gap patterns
// derive by aggregation, continuation tables by one pass over the filled
// pattern's table. Sharded counting merges by key, so thread count cannot
// change the result.
CountStore build_counts(std::span<const Sentence> train, int order,
                        int threads = 1, std::uint64_t seed = 0);

std::uint64_t lookup_count(const CountStore& store, const Pattern& pattern,
                           std::span<const std::string> words);

// Directory layout: manifest, counts/<pattern>.tsv, cont-num/<pattern>.tsv,
// cont-den/<pattern>.tsv, discounts.tsv. Records are key words joined by
// tabs, then the count; lines sorted bytewise by key. The manifest holds
// the format version, order, corpus hash, seed, totals, and a checksum per
// file.
void persist(const CountStore& store, const std::filesystem::path& dir);
CountStore load_store(const std::filesystem::path& dir, int expected_order = 0);

struct SparsityRow {
  Pattern pattern;
  std::uint64_t singletons = 0;
  std::uint64_t unique_keys = 0;
  std::uint64_t total = 0;
  double pct_total = 0.0;   // singletons / total occurrences
  double pct_unique = 0.0;  // singletons / unique keys
};

// Rows in lattice order: words used, then length, then mask value.
std::vector<SparsityRow> sparsity_report(const CountStore& store);
std::string format_sparsity(std::span<const SparsityRow> rows);
std::string sparsity_tsv(std::span<const SparsityRow> rows);

}  // namespace glmkit
