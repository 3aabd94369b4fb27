#include "glmkit/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "glmkit/util.hpp"

namespace glmkit {

EvalReport cross_entropy(const TestSet& test, const SeqLogProb& seq_log2prob,
                         const VocabTest& in_vocab, int threads) {
  if (test.sequences.empty()) throw std::invalid_argument("empty test set");

  EvalReport report;
  report.sequences = test.sequences.size();
  report.log2_probs.resize(test.sequences.size());

  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
      report.log2_probs[i] = seq_log2prob(test.sequences[i]);
  };
  int workers = std::max(1, threads);
  if (workers == 1 || test.sequences.size() < 512) {
    run(0, test.sequences.size());
  } else {
    std::vector<std::thread> pool;
    std::size_t chunk = (test.sequences.size() + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      std::size_t begin = w * chunk;
      std::size_t end = std::min(test.sequences.size(), begin + chunk);
      if (begin < end) pool.emplace_back(run, begin, end);
    }
    for (std::thread& t : pool) t.join();
  }

  if (in_vocab) {
    for (const Sentence& s : test.sequences) {
      bool oov = std::any_of(s.begin(), s.end(),
                             [&](const std::string& w) { return !in_vocab(w); });
      if (oov) ++report.oov_sequences;
    }
  }

  // Sorted summation: permutation invariant and independent of threading.
  std::vector<double> sorted = report.log2_probs;
  std::sort(sorted.begin(), sorted.end());
  double sum = 0.0;
  for (double v : sorted) sum += v;
  report.cross_entropy = -sum / static_cast<double>(report.sequences);
  report.perplexity = std::exp2(report.cross_entropy);
  return report;
}

EvalReport cross_entropy(const Model& model, const TestSet& test,
                         EvalMode mode, int threads) {
  if (mode == EvalMode::kLastWord && test.length > model.order())
    throw std::invalid_argument(
        "last-word evaluation needs model order >= sequence length");
  EvalReport report = cross_entropy(
      test,
      [&](const Sentence& s) { return model.seq_logprob(s, mode); },
      [&](const std::string& w) { return model.in_vocab(w); }, threads);
  report.order = model.order();
  report.model_name = std::string(to_string(model.mode()));
  report.eval_mode = mode;
  return report;
}

SeenSplit split_seen(const TestSet& test, const CountStore& store) {
  if (test.length > store.order)
    throw std::invalid_argument("store order below test sequence length");
  const Table& full = store.counts.at(Pattern::counted(test.length));
  SeenSplit out;
  out.observed.length = test.length;
  out.unseen.length = test.length;
  for (const Sentence& s : test.sequences) {
    bool seen = full.contains(key_of(s));
    (seen ? out.observed : out.unseen).sequences.push_back(s);
  }
  return out;
}

const SweepCell* SweepTable::find(int order, Mode mode) const {
  for (const SweepCell& c : cells)
    if (c.order == order && c.mode == mode) return &c;
  return nullptr;
}

std::optional<double> SweepTable::rel_change(int order) const {
  const SweepCell* mkn = find(order, Mode::kMKN);
  const SweepCell* glm = find(order, Mode::kGLM);
  if (!mkn || !glm || mkn->perplexity == 0.0) return std::nullopt;
  return (mkn->perplexity - glm->perplexity) / mkn->perplexity;
}

SweepTable order_sweep(std::span<const Sentence> train, const TestSet& base,
                       std::span<const int> orders, std::span<const Mode> modes,
                       EvalMode eval_mode, int threads) {
  SweepTable table;
  table.orders.assign(orders.begin(), orders.end());
  table.modes.assign(modes.begin(), modes.end());
  for (int order : orders) {
    CountStore store = build_counts(train, order, threads);
    TestSet test = truncate_test_set(base, std::min(order, base.length));
    for (Mode mode : modes) {
      Model model(store, mode);
      EvalReport report = cross_entropy(model, test, eval_mode, threads);
      table.cells.push_back({order, mode, report.cross_entropy,
                             report.perplexity, report.oov_sequences});
    }
  }
  return table;
}

std::vector<AblationRow> size_ablation(
    std::span<const Sentence> corpus, std::span<const double> fractions,
    std::span<const int> orders, std::span<const Mode> modes, int test_length,
    std::uint64_t test_count, std::uint64_t seed, EvalMode eval_mode,
    int threads, std::ostream* warnings) {
  std::vector<AblationRow> rows;
  for (std::size_t fi = 0; fi < fractions.size(); ++fi) {
    double fraction = fractions[fi];
    AblationRow row;
    row.fraction = fraction;
    std::uint64_t frac_seed = fnv1a64_u64(fi, fnv1a64_u64(seed));
    CorpusSplit split = split_corpus(corpus, fraction, frac_seed);
    for (const Sentence& s : split.train) row.train_tokens += s.size();
    if (row.train_tokens == 0) {
      row.skipped = true;
      if (warnings)
        *warnings << "warning: fraction " << fraction
                  << " left the training set empty; skipped\n";
      rows.push_back(std::move(row));
      continue;
    }
    TestSet sample;
    try {
      sample = sample_test_sequences(split.test, test_length, test_count,
                                     frac_seed);
    } catch (const std::exception& e) {
      row.skipped = true;
      if (warnings)
        *warnings << "warning: fraction " << fraction << ": " << e.what()
                  << "; skipped\n";
      rows.push_back(std::move(row));
      continue;
    }
    row.table = order_sweep(split.train, sample, orders, modes, eval_mode,
                            threads);
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::string format_cells(const SweepTable& table, const std::string& label) {
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-18s", label.c_str());
  out += buf;
  for (int order : table.orders) {
    std::snprintf(buf, sizeof buf, "  n=%-10d", order);
    out += buf;
  }
  out.push_back('\n');
  for (Mode mode : table.modes) {
    std::snprintf(buf, sizeof buf, "%-18s", std::string(to_string(mode)).c_str());
    out += buf;
    for (int order : table.orders) {
      const SweepCell* cell = table.find(order, mode);
      if (cell)
        std::snprintf(buf, sizeof buf, "  %-12.1f", cell->perplexity);
      else
        std::snprintf(buf, sizeof buf, "  %-12s", "-");
      out += buf;
    }
    out.push_back('\n');
  }
  std::snprintf(buf, sizeof buf, "%-18s", "rel. change");
  out += buf;
  for (int order : table.orders) {
    if (auto rel = table.rel_change(order))
      std::snprintf(buf, sizeof buf, "  %-11.1f%%", *rel * 100.0);
    else
      std::snprintf(buf, sizeof buf, "  %-12s", "-");
    out += buf;
  }
  out.push_back('\n');
  return out;
}

}  // namespace

std::string format_sweep(const SweepTable& table) {
  return format_cells(table, "perplexity");
}

std::string sweep_tsv(const SweepTable& table) {
  std::string out =
      "order\tmode\tperplexity\tcross_entropy\trel_change\toov_sequences\n";
  char buf[192];
  for (const SweepCell& cell : table.cells) {
    std::string rel = "-";
    if (cell.mode == Mode::kGLM) {
      if (auto r = table.rel_change(cell.order)) {
        std::snprintf(buf, sizeof buf, "%.10g", *r);
        rel = buf;
      }
    }
    std::snprintf(buf, sizeof buf, "%d\t%s\t%.10g\t%.10g\t%s\t%llu\n",
                  cell.order, std::string(to_string(cell.mode)).c_str(),
                  cell.perplexity, cell.cross_entropy, rel.c_str(),
                  static_cast<unsigned long long>(cell.oov_sequences));
    out += buf;
  }
  return out;
}

std::string format_ablation(std::span<const AblationRow> rows) {
  std::string out;
  char buf[160];
  for (const AblationRow& row : rows) {
    std::snprintf(buf, sizeof buf, "train fraction %g (%llu tokens)%s\n",
                  row.fraction,
                  static_cast<unsigned long long>(row.train_tokens),
                  row.skipped ? " [skipped]" : "");
    out += buf;
    if (!row.skipped) out += format_cells(row.table, "perplexity");
    out.push_back('\n');
  }
  return out;
}

std::string ablation_tsv(std::span<const AblationRow> rows) {
  std::string out =
      "fraction\torder\tmode\tperplexity\tcross_entropy\trel_change\toov_sequences\n";
  char buf[224];
  for (const AblationRow& row : rows) {
    if (row.skipped) continue;
    for (const SweepCell& cell : row.table.cells) {
      std::string rel = "-";
      if (cell.mode == Mode::kGLM) {
        if (auto r = row.table.rel_change(cell.order)) {
          std::snprintf(buf, sizeof buf, "%.10g", *r);
          rel = buf;
        }
      }
      std::snprintf(buf, sizeof buf, "%.10g\t%d\t%s\t%.10g\t%.10g\t%s\t%llu\n",
                    row.fraction, cell.order,
                    std::string(to_string(cell.mode)).c_str(), cell.perplexity,
                    cell.cross_entropy, rel.c_str(),
                    static_cast<unsigned long long>(cell.oov_sequences));
      out += buf;
    }
  }
  return out;
}

}  // namespace glmkit
