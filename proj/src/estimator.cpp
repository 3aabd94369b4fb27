#include "glmkit/estimator.hpp"

#include <cmath>
#include <stdexcept>

#include "glmkit/util.hpp"

namespace glmkit {

std::string_view to_string(Mode mode) {
  return mode == Mode::kMKN ? "mkn" : "glm";
}

Mode parse_mode(std::string_view text) {
  if (text == "mkn") return Mode::kMKN;
  if (text == "glm") return Mode::kGLM;
  throw std::invalid_argument("unknown mode: " + std::string(text));
}

namespace {

std::uint64_t table_get(const Table& t, const std::string& key) {
  auto it = t.find(key);
  return it == t.end() ? 0 : it->second;
}

std::string drop_last_word(std::string_view key) {
  std::size_t cut = key.rfind('\t');
  return cut == std::string_view::npos ? std::string()
                                       : std::string(key.substr(0, cut));
}

}  // namespace

Model::Model(const CountStore& store, Mode mode)
    : store_(store), mode_(mode), vocab_(store.vocab_size()) {
  Pattern top = Pattern::counted(store_.order);
  for (const Pattern& p : lattice(store_.order)) {
    Node node;
    node.pattern = p;
    node.top = (p == top);
    node.agg = &store_.counts.at(p);
    for (const LatticeEdge& e : children(p)) node.kids.push_back(e.child);

    if (node.top) {
      node.disc = store_.discount_stats.at({p, CountKind::kAbsolute}).d;
      // The top denominator is the sum over targets, not the raw context
      // window count; sentence-final contexts would otherwise leak mass.
      for (const auto& [key, c] : *node.agg) {
        std::string ctx = drop_last_word(key);
        node.top_marginal[ctx] += c;
        GammaTally& t = node.gamma_mass[ctx];
        // Numerator and bucket coincide here and D(c) <= c, so the
        // subtracted amount is always the full bucket discount.
        if (c == 1) ++t.c1;
        else if (c == 2) ++t.c2;
        else ++t.c3;
      }
    } else {
      node.num = &store_.cont_num.at(p);
      node.den = &store_.cont_den.at(p);
      node.disc = store_.discount_stats.at({p, CountKind::kContinuation}).d;
      for (const auto& [key, numv] : *node.num) {
        std::uint64_t bucket = table_get(*node.agg, key);
        double d = node.disc.for_count(bucket);
        GammaTally& t = node.gamma_mass[drop_last_word(key)];
        if (static_cast<double>(numv) >= d) {
          if (bucket == 1) ++t.c1;
          else if (bucket == 2) ++t.c2;
          else ++t.c3;
        } else {
          t.clamped += numv;  // whole numerator gets subtracted
        }
      }
    }
    nodes_.emplace(p, std::move(node));
  }
}

const Model::Node& Model::node_at(const Pattern& p) const {
  auto it = nodes_.find(p);
  if (it == nodes_.end())
    throw std::invalid_argument("pattern not in model lattice: " + p.to_string());
  return it->second;
}

std::string Model::node_key(const Pattern& p,
                            std::span<const std::string> query) {
  // A node of length m aligns with the last m positions of the query.
  std::size_t base = query.size() - static_cast<std::size_t>(p.length());
  std::string key;
  bool first = true;
  for (int slot = 1; slot <= p.length(); ++slot) {
    if (!p.is_counted(slot)) continue;
    if (!first) key.push_back('\t');
    key += query[base + slot - 1];
    first = false;
  }
  return key;
}

std::string Model::node_ctx(const Pattern& p,
                            std::span<const std::string> query) {
  return drop_last_word(node_key(p, query));
}

std::uint64_t Model::denominator(const Node& node,
                                 const std::string& ctx_key) const {
  return node.top ? table_get(node.top_marginal, ctx_key)
                  : table_get(*node.den, ctx_key);
}

double Model::gamma_value(const Node& node, const GammaTally& t,
                          double den) const {
  const DiscountSet& d = node.disc;
  return (static_cast<double>(t.c1) * d.d1 + static_cast<double>(t.c2) * d.d2 +
          static_cast<double>(t.c3) * d.d3plus +
          static_cast<double>(t.clamped)) /
         den;
}

double Model::node_prob(const Node& node, std::span<const std::string> query,
                        std::map<Pattern, double>& memo) const {
  if (auto it = memo.find(node.pattern); it != memo.end()) return it->second;

  const Pattern& p = node.pattern;
  double value;
  if (p.length() == 1) {
    const std::string& word = query.back();
    double base = 1.0 / static_cast<double>(vocab_ + 1);
    std::uint64_t den_count = denominator(node, std::string());
    std::uint64_t num_raw, bucket;
    if (node.top) {  // order-1 model: absolute unigram counts
      num_raw = table_get(*node.agg, word);
      bucket = num_raw;
    } else {
      num_raw = table_get(*node.num, word);
      bucket = table_get(*node.agg, word);
    }
    if (den_count == 0) {
      value = base;
    } else {
      double den = static_cast<double>(den_count);
      double numer = std::max(
          static_cast<double>(num_raw) - node.disc.for_count(bucket), 0.0);
      auto it = node.gamma_mass.find(std::string());
      double g = it == node.gamma_mass.end() ? 0.0
                                             : gamma_value(node, it->second, den);
      value = numer / den + g * base;
    }
  } else {
    double lower = 0.0;
    if (mode_ == Mode::kMKN) {
      lower = node_prob(node_at(node.kids.front()), query, memo);
    } else {
      for (const Pattern& kid : node.kids)
        lower += node_prob(node_at(kid), query, memo);
      lower /= static_cast<double>(node.kids.size());
    }

    std::string ctx = node_ctx(p, query);
    std::uint64_t den_count = denominator(node, ctx);
    if (den_count == 0) {
      value = lower;  // pure backoff
    } else {
      std::string key = node_key(p, query);
      std::uint64_t bucket = table_get(*node.agg, key);
      std::uint64_t num_raw = node.top ? bucket : table_get(*node.num, key);
      double den = static_cast<double>(den_count);
      double numer = std::max(
          static_cast<double>(num_raw) - node.disc.for_count(bucket), 0.0);
      auto it = node.gamma_mass.find(ctx);
      double g = it == node.gamma_mass.end() ? 0.0
                                             : gamma_value(node, it->second, den);
      value = numer / den + g * lower;
    }
  }
  memo.emplace(node.pattern, value);
  return value;
}

double Model::prob(std::span<const std::string> context,
                   const std::string& target) const {
  if (static_cast<int>(context.size()) > store_.order - 1)
    throw std::invalid_argument("context longer than order-1");
  std::vector<std::string> query(context.begin(), context.end());
  query.push_back(target);
  std::map<Pattern, double> memo;
  return node_prob(node_at(Pattern::counted(static_cast<int>(query.size()))),
                   query, memo);
}

double Model::gamma(const Pattern& node_pattern,
                    std::span<const std::string> context) const {
  const Node& node = node_at(node_pattern);
  if (static_cast<int>(context.size()) != node_pattern.counted_slots() - 1)
    throw std::invalid_argument("context arity does not match pattern");
  std::string ctx = key_of(context);
  std::uint64_t den_count = denominator(node, ctx);
  if (den_count == 0)
    throw std::invalid_argument("gamma undefined for zero denominator");
  auto it = node.gamma_mass.find(ctx);
  if (it == node.gamma_mass.end()) return 0.0;
  return gamma_value(node, it->second, static_cast<double>(den_count));
}

double Model::seq_logprob(std::span<const std::string> sequence,
                          EvalMode mode) const {
  if (sequence.empty())
    throw std::invalid_argument("sequence must have at least one word");
  if (mode == EvalMode::kLastWord) {
    return std::log2(
        prob(sequence.subspan(0, sequence.size() - 1), sequence.back()));
  }
  double total = 0.0;
  std::size_t max_ctx = static_cast<std::size_t>(store_.order - 1);
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    std::size_t len = std::min(i, max_ctx);
    total += std::log2(prob(sequence.subspan(i - len, len), sequence[i]));
  }
  return total;
}

bool Model::in_vocab(const std::string& word) const {
  return store_.counts.at(Pattern::counted(1)).contains(word);
}

}  // namespace glmkit
