#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>

#include "glmkit/cli.hpp"
#include "glmkit/corpus.hpp"
#include "glmkit/counts.hpp"
#include "glmkit/estimator.hpp"
#include "glmkit/eval.hpp"
#include "glmkit/util.hpp"
#include "textgen.hpp"

using namespace glmkit;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const char* name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

RunConfig base_config(const TempDir& dir) {
  RunConfig config;
  config.out_dir = dir.path / "out";
  config.seed = 5;
  config.test_length = 3;
  config.test_count = 300;
  return config;
}

}  // namespace

TEST_CASE("split, train, eval pipeline round trips through the cli layer") {
  TempDir dir("glmkit-cli-test");
  fs::path corpus_file = dir.path / "corpus.txt";
  write_file(corpus_file, textgen::english_like_text(9, 60000));

  RunConfig split_cfg = base_config(dir);
  split_cfg.command = "split";
  split_cfg.inputs = {corpus_file};
  split_cfg.train_fraction = 0.8;
  REQUIRE(cmd_split(split_cfg) == 0);
  REQUIRE(fs::exists(split_cfg.out_dir / "train.txt"));
  REQUIRE(fs::exists(split_cfg.out_dir / "test.txt"));
  REQUIRE(fs::exists(split_cfg.out_dir / "sequences.txt"));

  SUBCASE("rerunning the split writes identical bytes") {
    std::string train_a = read_file(split_cfg.out_dir / "train.txt");
    std::string seq_a = read_file(split_cfg.out_dir / "sequences.txt");
    RunConfig again = split_cfg;
    again.out_dir = dir.path / "out2";
    REQUIRE(cmd_split(again) == 0);
    CHECK(read_file(again.out_dir / "train.txt") == train_a);
    CHECK(read_file(again.out_dir / "sequences.txt") == seq_a);
    CHECK(read_file(again.out_dir / "manifest") ==
          read_file(split_cfg.out_dir / "manifest"));
  }

  RunConfig train_cfg = base_config(dir);
  train_cfg.command = "train";
  train_cfg.train_file = split_cfg.out_dir / "train.txt";
  train_cfg.order = 3;
  train_cfg.out_dir = dir.path / "store";
  REQUIRE(cmd_train(train_cfg) == 0);
  CountStore store = load_store(train_cfg.out_dir, 3);

  RunConfig eval_cfg = base_config(dir);
  eval_cfg.command = "eval";
  eval_cfg.store_dir = train_cfg.out_dir;
  eval_cfg.test_file = split_cfg.out_dir / "sequences.txt";
  eval_cfg.modes = "both";
  eval_cfg.out_dir = dir.path / "report";
  eval_cfg.split_seen = true;
  REQUIRE(cmd_eval(eval_cfg) == 0);

  SUBCASE("cli-obtained numbers equal direct library calls") {
    std::string tsv = read_file(eval_cfg.out_dir / "report.tsv");
    TestSet test;
    test.sequences = read_token_lines(eval_cfg.test_file);
    test.length = 3;
    for (Mode mode : {Mode::kMKN, Mode::kGLM}) {
      Model model(store, mode);
      EvalReport direct = cross_entropy(model, test);
      char expect[128];
      std::snprintf(expect, sizeof expect, "3\t%s\t%.10g\t%.10g",
                    std::string(to_string(mode)).c_str(), direct.perplexity,
                    direct.cross_entropy);
      CHECK(tsv.find(expect) != std::string::npos);
    }
    CHECK(fs::exists(eval_cfg.out_dir / "report-observed.tsv"));
    CHECK(fs::exists(eval_cfg.out_dir / "report-unseen.tsv"));
  }

  SUBCASE("stats command prints every lattice pattern") {
    RunConfig stats_cfg = base_config(dir);
    stats_cfg.command = "stats";
    stats_cfg.store_dir = train_cfg.out_dir;
    stats_cfg.out_dir = dir.path / "stats";
    REQUIRE(cmd_stats(stats_cfg) == 0);
    std::string tsv = read_file(stats_cfg.out_dir / "stats.tsv");
    for (const Pattern& p : lattice(3))
      CHECK(tsv.find(p.to_string() + "\t") != std::string::npos);
  }
}

TEST_CASE("modes agree at order two through the cli as well") {
  TempDir dir("glmkit-cli-order2");
  fs::path corpus_file = dir.path / "corpus.txt";
  write_file(corpus_file, textgen::english_like_text(10, 30000));

  RunConfig split_cfg = base_config(dir);
  split_cfg.command = "split";
  split_cfg.inputs = {corpus_file};
  split_cfg.test_length = 2;
  REQUIRE(cmd_split(split_cfg) == 0);

  RunConfig train_cfg = base_config(dir);
  train_cfg.command = "train";
  train_cfg.train_file = split_cfg.out_dir / "train.txt";
  train_cfg.order = 2;
  train_cfg.out_dir = dir.path / "store";
  REQUIRE(cmd_train(train_cfg) == 0);

  RunConfig eval_cfg = base_config(dir);
  eval_cfg.command = "eval";
  eval_cfg.store_dir = train_cfg.out_dir;
  eval_cfg.test_file = split_cfg.out_dir / "sequences.txt";
  eval_cfg.out_dir = dir.path / "report";
  REQUIRE(cmd_eval(eval_cfg) == 0);

  std::string tsv = read_file(eval_cfg.out_dir / "report.tsv");
  std::vector<std::string> lines = split(tsv, '\n');
  REQUIRE(lines.size() >= 3);
  std::vector<std::string> mkn = split(lines[1], '\t');
  std::vector<std::string> glm = split(lines[2], '\t');
  CHECK(mkn[1] == "mkn");
  CHECK(glm[1] == "glm");
  CHECK(mkn[2] == glm[2]);  // identical perplexity text
  CHECK(glm[4] == "0");     // rel change exactly zero
}

TEST_CASE("failures exit nonzero with a one-line diagnostic") {
  TempDir dir("glmkit-cli-errors");
  RunConfig config = base_config(dir);
  config.command = "train";
  config.train_file = dir.path / "missing.txt";
  config.order = 3;
  CHECK(cmd_train(config) == 1);

  write_file(dir.path / "empty.txt", "");
  config.train_file = dir.path / "empty.txt";
  CHECK(cmd_train(config) == 1);

  RunConfig eval_cfg = base_config(dir);
  eval_cfg.command = "eval";
  eval_cfg.store_dir = dir.path / "nostore";
  eval_cfg.test_file = dir.path / "empty.txt";
  CHECK(cmd_eval(eval_cfg) == 1);

  RunConfig bad;
  bad.command = "frobnicate";
  CHECK(run_command(bad) == 1);
}

TEST_CASE("ablate command produces the table files") {
  TempDir dir("glmkit-cli-ablate");
  fs::path corpus_file = dir.path / "corpus.txt";
  write_file(corpus_file, textgen::english_like_text(12, 40000));
  RunConfig config = base_config(dir);
  config.command = "ablate";
  config.inputs = {corpus_file};
  config.fractions = {0.5, 0.05};
  config.orders = {2, 3};
  config.test_count = 200;
  REQUIRE(cmd_ablate(config) == 0);
  std::string tsv = read_file(config.out_dir / "ablation.tsv");
  CHECK(tsv.find("fraction\torder\tmode") == 0);
  // 2 fractions x 2 orders x 2 modes rows plus header
  CHECK(std::count(tsv.begin(), tsv.end(), '\n') == 9);
  CHECK(fs::exists(config.out_dir / "ablation.txt"));
  CHECK(fs::exists(config.out_dir / "manifest"));
}

TEST_CASE("the installed binary wires flags and env fallbacks") {
  TempDir dir("glmkit-cli-bin");
  fs::path corpus_file = dir.path / "corpus.txt";
  write_file(corpus_file, textgen::english_like_text(13, 20000));
  std::string bin = GLMKIT_BIN;

  std::string cmd = bin + " split --input " + corpus_file.string() + " --out " +
                    (dir.path / "out").string() +
                    " --train-fraction 0.8 --seed 3 --test-length 2" +
                    " --test-count 50 >/dev/null 2>&1";
  REQUIRE(std::system(cmd.c_str()) == 0);
  CHECK(fs::exists(dir.path / "out" / "sequences.txt"));

  std::string train = "GLMKIT_THREADS=2 " + bin + " train --train " +
                      (dir.path / "out" / "train.txt").string() + " --order 2" +
                      " --out " + (dir.path / "store").string() +
                      " >/dev/null 2>&1";
  REQUIRE(std::system(train.c_str()) == 0);
  CHECK_NOTHROW(load_store(dir.path / "store", 2));

  std::string bad = bin + " eval --store " + (dir.path / "store").string() +
                    " >/dev/null 2>&1";
  CHECK(std::system(bad.c_str()) != 0);  // missing required --test/--out
}
