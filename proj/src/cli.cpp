#include "glmkit/cli.hpp"

#include <cinttypes>
#include <cstdio>
#include <iostream>
#include <sstream>

#include "glmkit/corpus.hpp"
#include "glmkit/counts.hpp"
#include "glmkit/estimator.hpp"
#include "glmkit/eval.hpp"
#include "glmkit/util.hpp"

namespace glmkit {

namespace {

std::vector<Mode> parse_modes(const std::string& text) {
  if (text == "both") return {Mode::kMKN, Mode::kGLM};
  return {parse_mode(text)};
}

EvalMode parse_eval_mode(const std::string& text) {
  if (text == "last-word") return EvalMode::kLastWord;
  if (text == "chain") return EvalMode::kChain;
  throw std::invalid_argument("unknown eval mode: " + text);
}

std::string read_inputs(const std::vector<std::filesystem::path>& inputs) {
  if (inputs.empty()) throw std::invalid_argument("no input files given");
  std::string text;
  for (const auto& path : inputs) {
    text += read_file(path);
    if (!text.empty() && text.back() != '\n') text.push_back('\n');
  }
  return text;
}

// Run manifest: semantic parameters only, never output paths, so two runs
// with the same seed write identical bytes.
void write_run_manifest(const RunConfig& config,
                        const std::filesystem::path& path) {
  std::ostringstream out;
  out << "glmkit-run\t1\n";
  out << "command\t" << config.command << '\n';
  for (const auto& input : config.inputs)
    out << "input\t" << input.filename().string() << '\t' << std::hex
        << file_fnv(input) << std::dec << '\n';
  if (!config.train_file.empty())
    out << "train_file\t" << config.train_file.filename().string() << '\t'
        << std::hex << file_fnv(config.train_file) << std::dec << '\n';
  if (!config.test_file.empty())
    out << "test_file\t" << config.test_file.filename().string() << '\t'
        << std::hex << file_fnv(config.test_file) << std::dec << '\n';
  out << "order\t" << config.order << '\n';
  out << "modes\t" << config.modes << '\n';
  out << "seed\t" << config.seed << '\n';
  out << "train_fraction\t" << config.train_fraction << '\n';
  out << "test_length\t" << config.test_length << '\n';
  out << "test_count\t" << config.test_count << '\n';
  out << "eval_mode\t" << config.eval_mode << '\n';
  out << "split_seen\t" << (config.split_seen ? 1 : 0) << '\n';
  if (config.command == "ablate") {
    out << "fractions";
    for (double f : config.fractions) out << '\t' << f;
    out << '\n';
    out << "orders";
    for (int n : config.orders) out << '\t' << n;
    out << '\n';
  }
  write_file(path, out.str());
}

int guarded(const char* command, const std::function<int()>& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    std::cerr << "glmkit " << command << ": " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int cmd_split(const RunConfig& config) {
  return guarded("split", [&] {
    std::filesystem::create_directories(config.out_dir);
    TokenizeStats stats;
    std::vector<Sentence> sentences =
        clean_and_tokenize(read_inputs(config.inputs), {}, &stats);
    if (stats.malformed_byte_sequences)
      std::cerr << "warning: replaced " << stats.malformed_byte_sequences
                << " malformed byte sequences\n";
    CorpusSplit split =
        split_corpus(sentences, config.train_fraction, config.seed);
    write_token_lines(config.out_dir / "train.txt", split.train);
    write_token_lines(config.out_dir / "test.txt", split.test);
    if (config.test_count > 0) {
      TestSet sample = sample_test_sequences(split.test, config.test_length,
                                             config.test_count, config.seed);
      write_token_lines(config.out_dir / "sequences.txt", sample.sequences);
    }
    write_run_manifest(config, config.out_dir / "manifest");
    return 0;
  });
}

int cmd_train(const RunConfig& config) {
  return guarded("train", [&] {
    std::vector<Sentence> train = read_token_lines(config.train_file);
    CountStore store =
        build_counts(train, config.order, config.threads, config.seed);
    std::filesystem::create_directories(config.out_dir);
    persist(store, config.out_dir);
    return 0;
  });
}

int cmd_eval(const RunConfig& config) {
  return guarded("eval", [&] {
    CountStore store = load_store(config.store_dir);
    std::vector<Sentence> sequences = read_token_lines(config.test_file);
    if (sequences.empty()) throw std::runtime_error("empty test set");
    TestSet test;
    test.length = static_cast<int>(sequences.front().size());
    for (const Sentence& s : sequences)
      if (static_cast<int>(s.size()) != test.length)
        throw std::runtime_error("test sequences have mixed lengths");
    test.sequences = std::move(sequences);
    if (test.length > store.order)
      test = truncate_test_set(test, store.order);

    EvalMode eval_mode = parse_eval_mode(config.eval_mode);
    std::vector<Mode> modes = parse_modes(config.modes);

    auto evaluate = [&](const TestSet& t) {
      SweepTable table;
      table.orders = {store.order};
      table.modes = modes;
      for (Mode mode : modes) {
        Model model(store, mode);
        EvalReport report = cross_entropy(model, t, eval_mode, config.threads);
        table.cells.push_back({store.order, mode, report.cross_entropy,
                               report.perplexity, report.oov_sequences});
      }
      return table;
    };

    std::filesystem::create_directories(config.out_dir);
    SweepTable complete = evaluate(test);
    write_file(config.out_dir / "report.tsv", sweep_tsv(complete));
    std::cout << format_sweep(complete);
    if (config.split_seen) {
      SeenSplit parts = split_seen(test, store);
      for (auto& [name, part] :
           {std::pair<const char*, TestSet&>{"observed", parts.observed},
            {"unseen", parts.unseen}}) {
        if (part.sequences.empty()) {
          std::cerr << "warning: " << name << " partition is empty\n";
          continue;
        }
        SweepTable t = evaluate(part);
        write_file(config.out_dir / ("report-" + std::string(name) + ".tsv"),
                   sweep_tsv(t));
        std::cout << name << ":\n" << format_sweep(t);
      }
    }
    write_run_manifest(config, config.out_dir / "manifest");
    return 0;
  });
}

int cmd_stats(const RunConfig& config) {
  return guarded("stats", [&] {
    CountStore store = load_store(config.store_dir);
    std::vector<SparsityRow> rows = sparsity_report(store);
    std::cout << format_sparsity(rows);
    if (!config.out_dir.empty()) {
      std::filesystem::create_directories(config.out_dir);
      write_file(config.out_dir / "stats.tsv", sparsity_tsv(rows));
      write_run_manifest(config, config.out_dir / "manifest");
    }
    return 0;
  });
}

int cmd_ablate(const RunConfig& config) {
  return guarded("ablate", [&] {
    std::vector<Sentence> sentences =
        clean_and_tokenize(read_inputs(config.inputs));
    std::vector<Mode> modes = parse_modes(config.modes);
    std::vector<AblationRow> rows = size_ablation(
        sentences, config.fractions, config.orders, modes, config.test_length,
        config.test_count, config.seed, parse_eval_mode(config.eval_mode),
        config.threads, &std::cerr);
    std::filesystem::create_directories(config.out_dir);
    write_file(config.out_dir / "ablation.tsv", ablation_tsv(rows));
    write_file(config.out_dir / "ablation.txt", format_ablation(rows));
    std::cout << format_ablation(rows);
    write_run_manifest(config, config.out_dir / "manifest");
    return 0;
  });
}

int run_command(const RunConfig& config) {
  if (config.command == "split") return cmd_split(config);
  if (config.command == "train") return cmd_train(config);
  if (config.command == "eval") return cmd_eval(config);
  if (config.command == "stats") return cmd_stats(config);
  if (config.command == "ablate") return cmd_ablate(config);
  std::cerr << "glmkit: unknown command " << config.command << '\n';
  return 1;
}

}  // namespace glmkit
