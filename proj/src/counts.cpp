#include "glmkit/counts.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <thread>

#include "glmkit/util.hpp"

namespace glmkit {

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s) {
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw std::runtime_error("bad number in store file: " + s);
  return v;
}

std::uint64_t parse_u64(const std::string& s) {
  char* end = nullptr;
  std::uint64_t v = std::strtoull(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0')
    throw std::runtime_error("bad count in store file: " + s);
  return v;
}

// Key with the word at `word_idx` removed; -1 keeps all words.
std::string drop_word(std::string_view key, int word_idx) {
  std::vector<std::string> w = words_of(key);
  w.erase(w.begin() + word_idx);
  return join(w, '\t');
}

DiscountStats stats_for(const Pattern& p, CountKind kind, const Table& table) {
  DiscountStats st;
  st.pattern = p;
  st.kind = kind;
  for (const auto& [key, c] : table) {
    if (c == 1) ++st.n1;
    else if (c == 2) ++st.n2;
    else if (c == 3) ++st.n3;
    else if (c == 4) ++st.n4;
  }
  st.d = discounts(st.n1, st.n2, st.n3, st.n4);
  return st;
}

}  // namespace

std::string_view to_string(CountKind kind) {
  return kind == CountKind::kAbsolute ? "absolute" : "continuation";
}

DiscountSet discounts(std::uint64_t n1, std::uint64_t n2, std::uint64_t n3,
                      std::uint64_t n4) {
  DiscountSet d;
  if (n1 + n2 == 0) return d;  // all defaults
  double y = static_cast<double>(n1) / static_cast<double>(n1 + n2);
  d.y = y;
  if (n1 > 0) d.d1 = std::max(0.0, 1.0 - 2.0 * y * static_cast<double>(n2) / static_cast<double>(n1));
  if (n2 > 0) d.d2 = std::max(0.0, 2.0 - 3.0 * y * static_cast<double>(n3) / static_cast<double>(n2));
  if (n3 > 0) d.d3plus = std::max(0.0, 3.0 - 4.0 * y * static_cast<double>(n4) / static_cast<double>(n3));
  return d;
}

std::string key_of(std::span<const std::string> words) {
  return join(words, '\t');
}

std::vector<std::string> words_of(std::string_view key) {
  if (key.empty()) return {};
  return split(key, '\t');
}

CountStore build_counts(std::span<const Sentence> train, int order,
                        int threads, std::uint64_t seed) {
  if (order < 1 || order > 5) throw std::invalid_argument("order must be in [1,5]");
  std::size_t tokens = 0;
  for (const Sentence& s : train) tokens += s.size();
  if (tokens == 0) throw std::runtime_error("empty corpus");

  CountStore store;
  store.order = order;
  store.seed = seed;
  store.total_tokens = tokens;
  {
    std::uint64_t h = fnv1a64_u64(static_cast<std::uint64_t>(order));
    for (const Sentence& s : train) {
      for (const std::string& tok : s) {
        h = fnv1a64(tok, h);
        h = fnv1a64(std::string_view(" ", 1), h);
      }
      h = fnv1a64(std::string_view("\n", 1), h);
    }
    store.corpus_hash = h;
  }

  // All-counted tables for every length, sharded over sentences. Merge
  // is a sum by key, so shard boundaries cannot change the result.
  int shards = std::max(1, threads);
  std::vector<std::vector<Table>> partial(
      static_cast<std::size_t>(shards), std::vector<Table>(order + 1));
  {
    std::vector<std::thread> workers;
    std::size_t chunk = (train.size() + shards - 1) / std::max<std::size_t>(1, shards);
    for (int w = 0; w < shards; ++w) {
      std::size_t begin = w * chunk;
      std::size_t end = std::min(train.size(), begin + chunk);
      if (begin >= end) continue;
      workers.emplace_back([&, w, begin, end] {
        std::string key;
        for (std::size_t si = begin; si < end; ++si) {
          const Sentence& s = train[si];
          for (int m = 1; m <= order; ++m) {
            if (s.size() < static_cast<std::size_t>(m)) break;
            Table& t = partial[w][m];
            for (std::size_t off = 0; off + m <= s.size(); ++off) {
              key.assign(s[off]);
              for (int k = 1; k < m; ++k) {
                key.push_back('\t');
                key.append(s[off + k]);
              }
              ++t[key];
            }
          }
        }
      });
    }
    for (std::thread& t : workers) t.join();
  }
  for (int m = 1; m <= order; ++m) {
    Table& dst = store.counts[Pattern::counted(m)];
    for (int w = 0; w < shards; ++w)
      for (auto& [key, c] : partial[w][m]) dst[key] += c;
  }
  partial.clear();

  // Internal-gap tables aggregate over the words filling the leftmost
  // gap; ordering by gap count keeps the source table already built.
  std::vector<Pattern> patterns = lattice(order);
  std::vector<Pattern> gapped(patterns.begin(), patterns.end());
  std::erase_if(gapped, [](const Pattern& p) { return p.all_counted(); });
  std::sort(gapped.begin(), gapped.end(), [](const Pattern& a, const Pattern& b) {
    if (a.skipped_slots() != b.skipped_slots())
      return a.skipped_slots() < b.skipped_slots();
    return a < b;
  });
  for (const Pattern& p : gapped) {
    int gap = continuation_slot(p).slot;
    Pattern q = p.with_slot_counted(gap);
    int filler_idx = q.word_index(gap);
    const Table& src = store.counts.at(q);
    Table& dst = store.counts[p];
    dst.reserve(src.size());
    for (const auto& [key, c] : src) dst[drop_word(key, filler_idx)] += c;
  }

  // Continuation tables for every pattern below the top. Each entry of
  // the filled (or left-extended) table is one distinct filler, and one
  // distinct (filler, target) pair for its context.
  Pattern top = Pattern::counted(order);
  for (const Pattern& p : patterns) {
    if (p == top) continue;
    ContinuationSlot cs = continuation_slot(p);
    Pattern q = cs.left_extension ? Pattern::counted(p.length() + 1)
                                  : p.with_slot_counted(cs.slot);
    int filler_idx = cs.left_extension ? 0 : q.word_index(cs.slot);
    const Table& src = store.counts.at(q);
    Table& num = store.cont_num[p];
    Table& den = store.cont_den[p];
    num.reserve(src.size());
    for (const auto& [key, c] : src) {
      std::vector<std::string> w = words_of(key);
      w.erase(w.begin() + filler_idx);
      ++num[join(w, '\t')];
      w.pop_back();  // drop the target
      ++den[join(w, '\t')];
    }
  }

  for (const Pattern& p : patterns) {
    store.discount_stats[{p, CountKind::kAbsolute}] =
        stats_for(p, CountKind::kAbsolute, store.counts.at(p));
    if (p != top)
      store.discount_stats[{p, CountKind::kContinuation}] =
          stats_for(p, CountKind::kContinuation, store.cont_num.at(p));
  }
  return store;
}

std::uint64_t lookup_count(const CountStore& store, const Pattern& pattern,
                           std::span<const std::string> words) {
  if (static_cast<int>(words.size()) != pattern.counted_slots())
    throw std::invalid_argument("word arity does not match pattern");
  auto table = store.counts.find(pattern);
  if (table == store.counts.end())
    throw std::invalid_argument("pattern not in store: " + pattern.to_string());
  auto it = table->second.find(key_of(words));
  return it == table->second.end() ? 0 : it->second;
}

namespace {

constexpr std::string_view kMagic = "glmkit-store";
constexpr int kFormatVersion = 1;

std::string table_tsv(const Table& table) {
  std::vector<std::string_view> keys;
  keys.reserve(table.size());
  for (const auto& [key, c] : table) keys.push_back(key);
  std::sort(keys.begin(), keys.end());
  std::string out;
  char buf[32];
  for (std::string_view key : keys) {
    out += key;
    if (!key.empty()) out.push_back('\t');
    std::snprintf(buf, sizeof buf, "%" PRIu64, table.at(std::string(key)));
    out += buf;
    out.push_back('\n');
  }
  return out;
}

Table parse_table_tsv(const std::string& text, int arity,
                      const std::string& what) {
  Table out;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string::npos) nl = text.size();
    std::string_view line(text.data() + start, nl - start);
    start = nl + 1;
    if (line.empty()) continue;
    std::size_t cut = line.rfind('\t');
    std::string_view key = cut == std::string_view::npos ? std::string_view() : line.substr(0, cut);
    std::string_view count = cut == std::string_view::npos ? line : line.substr(cut + 1);
    int words = key.empty() ? 0 : 1 + static_cast<int>(std::count(key.begin(), key.end(), '\t'));
    if (words != arity)
      throw std::runtime_error("wrong key arity in " + what);
    out[std::string(key)] = parse_u64(std::string(count));
  }
  return out;
}

}  // namespace

void persist(const CountStore& store, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "counts");
  fs::create_directories(dir / "cont-num");
  fs::create_directories(dir / "cont-den");

  std::vector<std::pair<std::string, std::uint64_t>> checksums;
  auto emit = [&](const std::string& rel, const std::string& content) {
    write_file(dir / rel, content);
    checksums.emplace_back(rel, fnv1a64(content));
  };

  for (const auto& [p, table] : store.counts)
    emit("counts/" + p.to_string() + ".tsv", table_tsv(table));
  for (const auto& [p, table] : store.cont_num)
    emit("cont-num/" + p.to_string() + ".tsv", table_tsv(table));
  for (const auto& [p, table] : store.cont_den)
    emit("cont-den/" + p.to_string() + ".tsv", table_tsv(table));

  {
    std::string out;
    for (const auto& [key, st] : store.discount_stats) {
      char buf[256];
      std::snprintf(buf, sizeof buf, "%s\t%s\t%" PRIu64 "\t%" PRIu64 "\t%" PRIu64
                    "\t%" PRIu64 "\t%s\t%s\t%s\t%s\n",
                    st.pattern.to_string().c_str(),
                    std::string(to_string(st.kind)).c_str(), st.n1, st.n2,
                    st.n3, st.n4, format_double(st.d.y).c_str(),
                    format_double(st.d.d1).c_str(),
                    format_double(st.d.d2).c_str(),
                    format_double(st.d.d3plus).c_str());
      out += buf;
    }
    emit("discounts.tsv", out);
  }

  std::sort(checksums.begin(), checksums.end());
  std::string manifest;
  char buf[128];
  std::snprintf(buf, sizeof buf, "%s\t%d\n", std::string(kMagic).c_str(), kFormatVersion);
  manifest += buf;
  std::snprintf(buf, sizeof buf, "order\t%d\n", store.order);
  manifest += buf;
  std::snprintf(buf, sizeof buf, "corpus_hash\t%016" PRIx64 "\n", store.corpus_hash);
  manifest += buf;
  std::snprintf(buf, sizeof buf, "seed\t%" PRIu64 "\n", store.seed);
  manifest += buf;
  std::snprintf(buf, sizeof buf, "total_tokens\t%" PRIu64 "\n", store.total_tokens);
  manifest += buf;
  std::snprintf(buf, sizeof buf, "vocab\t%zu\n", store.vocab_size());
  manifest += buf;
  for (const auto& [rel, sum] : checksums) {
    std::snprintf(buf, sizeof buf, "file\t%s\t%016" PRIx64 "\n", rel.c_str(), sum);
    manifest += buf;
  }
  write_file(dir / "manifest", manifest);
}

CountStore load_store(const std::filesystem::path& dir, int expected_order) {
  std::string manifest = read_file(dir / "manifest");
  CountStore store;
  std::vector<std::pair<std::string, std::uint64_t>> checksums;
  std::uint64_t declared_tokens = 0, declared_vocab = 0;
  bool magic_ok = false;

  std::size_t start = 0;
  while (start < manifest.size()) {
    std::size_t nl = manifest.find('\n', start);
    if (nl == std::string::npos) nl = manifest.size();
    std::vector<std::string> f = split(std::string_view(manifest).substr(start, nl - start), '\t');
    start = nl + 1;
    if (f.size() < 2) continue;
    if (f[0] == kMagic) {
      if (parse_u64(f[1]) != kFormatVersion)
        throw std::runtime_error("unsupported store format version " + f[1]);
      magic_ok = true;
    } else if (f[0] == "order") {
      store.order = static_cast<int>(parse_u64(f[1]));
    } else if (f[0] == "corpus_hash") {
      store.corpus_hash = std::strtoull(f[1].c_str(), nullptr, 16);
    } else if (f[0] == "seed") {
      store.seed = parse_u64(f[1]);
    } else if (f[0] == "total_tokens") {
      declared_tokens = parse_u64(f[1]);
    } else if (f[0] == "vocab") {
      declared_vocab = parse_u64(f[1]);
    } else if (f[0] == "file" && f.size() == 3) {
      checksums.emplace_back(f[1], std::strtoull(f[2].c_str(), nullptr, 16));
    }
  }
  if (!magic_ok) throw std::runtime_error("not a glmkit store: " + dir.string());
  if (store.order < 1 || store.order > 5)
    throw std::runtime_error("store manifest has invalid order");
  if (expected_order != 0 && store.order != expected_order)
    throw std::runtime_error("store was built with order " +
                             std::to_string(store.order) + ", requested " +
                             std::to_string(expected_order));
  store.total_tokens = declared_tokens;

  std::map<std::string, std::string> contents;
  for (const auto& [rel, sum] : checksums) {
    std::string text = read_file(dir / rel);
    if (fnv1a64(text) != sum)
      throw std::runtime_error("checksum mismatch for " + rel);
    contents[rel] = std::move(text);
  }

  Pattern top = Pattern::counted(store.order);
  for (const Pattern& p : lattice(store.order)) {
    std::string name = p.to_string() + ".tsv";
    auto want = [&](const std::string& rel) -> const std::string& {
      auto it = contents.find(rel);
      if (it == contents.end())
        throw std::runtime_error("store is missing " + rel);
      return it->second;
    };
    store.counts[p] = parse_table_tsv(want("counts/" + name), p.counted_slots(),
                                      "counts/" + name);
    if (p != top) {
      store.cont_num[p] = parse_table_tsv(want("cont-num/" + name),
                                          p.counted_slots(), "cont-num/" + name);
      store.cont_den[p] = parse_table_tsv(want("cont-den/" + name),
                                          p.counted_slots() - 1, "cont-den/" + name);
    }
  }

  {
    const std::string& text = contents.at("discounts.tsv");
    std::size_t pos = 0;
    while (pos < text.size()) {
      std::size_t nl = text.find('\n', pos);
      if (nl == std::string::npos) nl = text.size();
      std::vector<std::string> f = split(std::string_view(text).substr(pos, nl - pos), '\t');
      pos = nl + 1;
      if (f.size() == 1 && f[0].empty()) continue;
      if (f.size() != 10) throw std::runtime_error("malformed discounts.tsv line");
      DiscountStats st;
      st.pattern = Pattern::parse(f[0]);
      st.kind = f[1] == "absolute" ? CountKind::kAbsolute : CountKind::kContinuation;
      st.n1 = parse_u64(f[2]);
      st.n2 = parse_u64(f[3]);
      st.n3 = parse_u64(f[4]);
      st.n4 = parse_u64(f[5]);
      st.d.y = parse_double(f[6]);
      st.d.d1 = parse_double(f[7]);
      st.d.d2 = parse_double(f[8]);
      st.d.d3plus = parse_double(f[9]);
      store.discount_stats[{st.pattern, st.kind}] = st;
    }
  }

  if (store.vocab_size() != declared_vocab)
    throw std::runtime_error("store vocab does not match manifest");
  return store;
}

std::vector<SparsityRow> sparsity_report(const CountStore& store) {
  std::vector<SparsityRow> rows;
  for (const Pattern& p : lattice(store.order)) {
    SparsityRow row;
    row.pattern = p;
    const Table& t = store.counts.at(p);
    row.unique_keys = t.size();
    for (const auto& [key, c] : t) {
      row.total += c;
      if (c == 1) ++row.singletons;
    }
    if (row.total > 0)
      row.pct_total = 100.0 * static_cast<double>(row.singletons) /
                      static_cast<double>(row.total);
    if (row.unique_keys > 0)
      row.pct_unique = 100.0 * static_cast<double>(row.singletons) /
                       static_cast<double>(row.unique_keys);
    rows.push_back(row);
  }
  return rows;
}

std::string format_sparsity(std::span<const SparsityRow> rows) {
  std::string out = "pattern  total    unique\n";
  char buf[128];
  for (const SparsityRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%-8s %6.1f%%  %6.1f%%\n",
                  r.pattern.to_string().c_str(), r.pct_total, r.pct_unique);
    out += buf;
  }
  return out;
}

std::string sparsity_tsv(std::span<const SparsityRow> rows) {
  std::string out = "pattern\tsingletons\tunique\ttotal\tpct_total\tpct_unique\n";
  char buf[192];
  for (const SparsityRow& r : rows) {
    std::snprintf(buf, sizeof buf,
                  "%s\t%" PRIu64 "\t%" PRIu64 "\t%" PRIu64 "\t%.10g\t%.10g\n",
                  r.pattern.to_string().c_str(), r.singletons, r.unique_keys,
                  r.total, r.pct_total, r.pct_unique);
    out += buf;
  }
  return out;
}

}  // namespace glmkit
