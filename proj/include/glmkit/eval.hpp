#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "glmkit/corpus.hpp"
#include "glmkit/counts.hpp"
#include "glmkit/estimator.hpp"

namespace glmkit {

struct EvalReport {
  int order = 0;
  std::string model_name;  // "mkn", "glm", or a caller label
  EvalMode eval_mode = EvalMode::kLastWord;
  std::vector<double> log2_probs;  // per sequence, input order
  double cross_entropy = 0.0;      // bits
  double perplexity = 0.0;
  std::uint64_t sequences = 0;
  std::uint64_t oov_sequences = 0;
};

using SeqLogProb = std::function<double(const Sentence&)>;
using VocabTest = std::function<bool(const std::string&)>;

// H = -sum over the test multiset of (1/|T|) log2 P(s); duplicates carry
// their multiplicity. The per-sequence values are summed in sorted order,
// so the total is permutation invariant and thread-count independent.
EvalReport cross_entropy(const TestSet& test, const SeqLogProb& seq_log2prob,
                         const VocabTest& in_vocab, int threads = 1);
EvalReport cross_entropy(const Model& model, const TestSet& test,
                         EvalMode mode = EvalMode::kLastWord, int threads = 1);

struct SeenSplit {
  TestSet observed;
  TestSet unseen;
};

// A sequence is observed iff its full-length window occurs in training.
SeenSplit split_seen(const TestSet& test, const CountStore& store);

struct SweepCell {
  int order = 0;
  Mode mode = Mode::kMKN;
  double cross_entropy = 0.0;
  double perplexity = 0.0;
  std::uint64_t oov_sequences = 0;
};

struct SweepTable {
  std::vector<int> orders;
  std::vector<Mode> modes;
  std::vector<SweepCell> cells;

  const SweepCell* find(int order, Mode mode) const;
  // (MKN - GLM) / MKN; positive when GLM is better.
  std::optional<double> rel_change(int order) const;
};

// One store per order, shared by both modes; test sequences are truncated
// to the order being evaluated (keeping the last words).
SweepTable order_sweep(std::span<const Sentence> train, const TestSet& base,
                       std::span<const int> orders, std::span<const Mode> modes,
                       EvalMode eval_mode = EvalMode::kLastWord,
                       int threads = 1);

struct AblationRow {
  double fraction = 0.0;
  std::uint64_t train_tokens = 0;
  bool skipped = false;
  SweepTable table;
};

// Fresh split and fresh test sample per fraction; every order and mode of
// a fraction is evaluated on that same sample. Fractions whose training
// side comes out empty are skipped with a warning.
std::vector<AblationRow> size_ablation(
    std::span<const Sentence> corpus, std::span<const double> fractions,
    std::span<const int> orders, std::span<const Mode> modes, int test_length,
    std::uint64_t test_count, std::uint64_t seed,
    EvalMode eval_mode = EvalMode::kLastWord, int threads = 1,
    std::ostream* warnings = nullptr);

std::string format_sweep(const SweepTable& table);
// Columns: order, mode, perplexity, cross_entropy, rel_change, oov_sequences.
std::string sweep_tsv(const SweepTable& table);
std::string format_ablation(std::span<const AblationRow> rows);
std::string ablation_tsv(std::span<const AblationRow> rows);

}  // namespace glmkit
