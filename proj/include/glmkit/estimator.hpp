#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "glmkit/counts.hpp"
#include "glmkit/pattern.hpp"

namespace glmkit {

// MKN interpolates along the suffix edge only; GLM gives every one-skip
// child the same weight. The two are identical for orders 1 and 2.
enum class Mode { kMKN, kGLM };
std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view text);

enum class EvalMode { kLastWord, kChain };

// Conditional-probability queries over a CountStore. Immutable and safe
// to share across threads once constructed.
//
// Each lattice node discounts its observed mass and hands exactly the
// subtracted amount to its children, so sums over the vocabulary plus the
// out-of-vocabulary slot come out at one. A node whose denominator is
// zero backs off with weight one. The unigram node interpolates with the
// uniform distribution over |V|+1 slots.
class Model {
 public:
  Model(const CountStore& store, Mode mode);  // store must outlive the model

  double prob(std::span<const std::string> context,
              const std::string& target) const;

  // Interpolation weight of a node for a given context: the discount mass
  // actually subtracted from the node's numerators, over the denominator.
  // Requires a nonzero denominator.
  double gamma(const Pattern& node,
               std::span<const std::string> context) const;

  // log2 probability. Last-word mode scores the final word given the
  // rest; chain mode sums over every position with the history capped at
  // order-1 words.
  double seq_logprob(std::span<const std::string> sequence,
                     EvalMode mode = EvalMode::kLastWord) const;

  Mode mode() const { return mode_; }
  int order() const { return store_.order; }
  std::size_t vocab_size() const { return vocab_; }
  bool in_vocab(const std::string& word) const;
  const CountStore& store() const { return store_; }

 private:
  struct GammaTally {
    std::uint64_t c1 = 0, c2 = 0, c3 = 0;  // targets per discount bucket
    std::uint64_t clamped = 0;             // numerators smaller than their discount
  };
  struct Node {
    Pattern pattern;
    bool top = false;
    const Table* agg = nullptr;
    const Table* num = nullptr;  // null for the top node
    const Table* den = nullptr;  // null for the top node
    Table top_marginal;          // top only: context -> sum over targets
    std::unordered_map<std::string, GammaTally> gamma_mass;
    DiscountSet disc;
    std::vector<Pattern> kids;        // ascending skip position
  };

  const Node& node_at(const Pattern& p) const;
  double node_prob(const Node& node, std::span<const std::string> query,
                   std::map<Pattern, double>& memo) const;
  double gamma_value(const Node& node, const GammaTally& t, double den) const;
  std::uint64_t denominator(const Node& node, const std::string& ctx_key) const;

  static std::string node_key(const Pattern& p,
                              std::span<const std::string> query);
  static std::string node_ctx(const Pattern& p,
                              std::span<const std::string> query);

  const CountStore& store_;
  Mode mode_;
  std::size_t vocab_ = 0;
  std::map<Pattern, Node> nodes_;
};

}  // namespace glmkit
